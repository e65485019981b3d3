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

#ifndef RTBLAB_REPORT_HPP_
#define RTBLAB_REPORT_HPP_

#include <cstdint>
#include <optional>

#include "rtblab/types.hpp"

namespace rtblab {

// Outcome of replaying one delivery period with one strategy and budget.
struct EpisodeReport {
  std::int64_t clicks_won = 0;
  double pctr_sum_won = 0.0;
  std::int64_t imps_won = 0;
  Currency cost = 0;
  Currency budget = 0;
  std::int64_t lost_clicks_early_stop = 0;
  std::int64_t lost_clicks_underbid = 0;

  std::int64_t impressions = 0;
  std::int64_t total_clicks = 0;

  // Zero budget reports a ratio of 0.
  double cost_ratio() const {
    return budget > 0 ? static_cast<double>(cost) / static_cast<double>(budget) : 0.0;
  }
  std::optional<double> avg_market_price_won() const {
    if (imps_won == 0) return std::nullopt;
    return static_cast<double>(cost) / static_cast<double>(imps_won);
  }

  EpisodeReport& operator+=(const EpisodeReport& other);
  friend bool operator==(const EpisodeReport&, const EpisodeReport&) = default;
};

}  // namespace rtblab

#endif  // RTBLAB_REPORT_HPP_
