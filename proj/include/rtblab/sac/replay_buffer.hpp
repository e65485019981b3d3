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

#ifndef RTBLAB_SAC_REPLAY_BUFFER_HPP_
#define RTBLAB_SAC_REPLAY_BUFFER_HPP_

#include <cstddef>
#include <random>
#include <stdexcept>
#include <vector>

#include "rtblab/env.hpp"

namespace rtblab::sac {

// Fixed-capacity ring of transitions; the oldest entry is overwritten first.
class ReplayBuffer {
 public:
  explicit ReplayBuffer(std::size_t capacity) : capacity_(capacity) {
    if (capacity == 0) throw std::invalid_argument("ReplayBuffer capacity must be positive");
  }

  void push(const Transition& transition) {
    if (storage_.size() < capacity_) {
      storage_.push_back(transition);
    } else {
      storage_[cursor_] = transition;
    }
    cursor_ = (cursor_ + 1) % capacity_;
    ++pushed_;
  }

  std::size_t size() const { return storage_.size(); }
  std::size_t capacity() const { return capacity_; }
  std::size_t cursor() const { return cursor_; }
  std::size_t total_pushed() const { return pushed_; }
  bool empty() const { return storage_.empty(); }

  // Physical slot i, 0 <= i < size().
  const Transition& operator[](std::size_t i) const { return storage_[i]; }

  // n indices drawn uniformly with replacement.
  template <typename Rng>
  std::vector<std::size_t> sample_indices(std::size_t n, Rng& rng) const {
    if (storage_.empty()) throw std::logic_error("ReplayBuffer::sample_indices on empty buffer");
    std::uniform_int_distribution<std::size_t> pick(0, storage_.size() - 1);
    std::vector<std::size_t> indices(n);
    for (auto& index : indices) index = pick(rng);
    return indices;
  }

 private:
  std::size_t capacity_;
  std::size_t cursor_ = 0;
  std::size_t pushed_ = 0;
  std::vector<Transition> storage_;
};

}  // namespace rtblab::sac

#endif  // RTBLAB_SAC_REPLAY_BUFFER_HPP_
