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

#ifndef RTBLAB_TYPES_HPP_
#define RTBLAB_TYPES_HPP_

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace rtblab {

// Prices and budgets are integer 10^-3 CNY fen.
using Currency = std::int64_t;

// Rounds half away from zero; bids are non-negative so this is half-up.
inline Currency round_half_up(double value) {
  return static_cast<Currency>(std::floor(value + 0.5));
}

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed or out-of-range input data.
class DataError : public Error {
 public:
  using Error::Error;
};

class ParseError : public DataError {
 public:
  ParseError(std::size_t line, const std::string& what)
      : DataError("line " + std::to_string(line) + ": " + what), line_(line) {}

  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

class EmptyInputError : public DataError {
 public:
  using DataError::DataError;
};

// Bad parameters handed to a generator, strategy or trainer.
class InvalidSpecError : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace rtblab

#endif  // RTBLAB_TYPES_HPP_
