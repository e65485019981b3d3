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

// JSON checkpoints of a PolicyBundle. Doubles are written in shortest
// round-trip form, so save(load(x)) reproduces x byte for byte. Replay buffer
// contents are not stored, only its cursor metadata.

#ifndef RTBLAB_SAC_CHECKPOINT_HPP_
#define RTBLAB_SAC_CHECKPOINT_HPP_

#include <cstddef>
#include <string>

#include "rtblab/sac/sac.hpp"

namespace rtblab::sac {

inline constexpr int kCheckpointVersion = 1;

struct BufferMeta {
  std::size_t capacity = 0;
  std::size_t size = 0;
  std::size_t cursor = 0;
  std::size_t total_pushed = 0;
};

struct Checkpoint {
  PolicyBundle bundle;
  BufferMeta buffer;
};

std::string checkpoint_to_string(const PolicyBundle& bundle, const BufferMeta& buffer);

// Throws DataError on malformed documents, unknown versions or shape mismatches.
Checkpoint checkpoint_from_string(const std::string& text);

void save_checkpoint(const std::string& path, const PolicyBundle& bundle, const BufferMeta& buffer);
Checkpoint load_checkpoint(const std::string& path);

BufferMeta buffer_meta(const ReplayBuffer& buffer);

}  // namespace rtblab::sac

#endif  // RTBLAB_SAC_CHECKPOINT_HPP_
