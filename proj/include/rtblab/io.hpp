// Copyright 2026 The rtblab Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef RTBLAB_IO_HPP_
#define RTBLAB_IO_HPP_

#include <string>

namespace rtblab {

// Reads a whole file; throws DataError if it cannot be opened.
std::string read_file(const std::string& path);

// Writes to a sibling temporary file and renames it over `path`, so readers
// never observe a partial document.
void write_file_atomic(const std::string& path, const std::string& contents);

}  // namespace rtblab

#endif  // RTBLAB_IO_HPP_
