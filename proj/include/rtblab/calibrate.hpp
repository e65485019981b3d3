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

// Grid-search calibration of the static strategies. Every candidate is
// replayed over all training periods under the same slot pacing used for
// evaluation and scored by total clicks won.

#ifndef RTBLAB_CALIBRATE_HPP_
#define RTBLAB_CALIBRATE_HPP_

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "rtblab/env.hpp"
#include "rtblab/logstore.hpp"
#include "rtblab/strategies.hpp"

namespace rtblab {

using BudgetMap = std::map<std::string, Currency>;

// budget = floor(fraction * actual cost) for every episode.
BudgetMap budgets_for_fraction(std::span<const Episode> episodes, std::int64_t numerator,
                               std::int64_t denominator);

struct LinCalibration {
  LinParams params;
  // clicks[i] is the total for base bid i + 1.
  std::vector<std::int64_t> clicks;
};

// Candidates 1..300; ties go to the smaller base bid.
LinCalibration calibrate_lin(std::span<const Episode> train, const BudgetMap& budget_per_period,
                             const ReplayOptions& options = {});

struct OrtbGrid {
  std::vector<double> c_values;
  std::vector<double> lambda_values;

  // c in {5, 10, ..., 100}; lambda log-spaced over [1e-7, 1e-3], 4 per decade.
  static OrtbGrid defaults();
};

struct OrtbCalibration {
  OrtbParams params;
  std::int64_t clicks = 0;
  // clicks[li * c_values.size() + ci]
  std::vector<std::int64_t> grid_clicks;
};

// Ties go to the smaller lambda, then the smaller c.
OrtbCalibration calibrate_ortb(std::span<const Episode> train, const BudgetMap& budget_per_period,
                               const OrtbGrid& grid = OrtbGrid::defaults(), const ReplayOptions& options = {});

// Total clicks of a static bidder over a set of periods.
std::int64_t total_clicks(std::span<const Episode> episodes, const StaticBidder& bidder,
                          const BudgetMap& budget_per_period, const ReplayOptions& options = {});

nlohmann::json to_json(const LinCalibration& calibration);
nlohmann::json to_json(const OrtbCalibration& calibration, const OrtbGrid& grid);
LinParams lin_params_from_json(const nlohmann::json& doc);
OrtbParams ortb_params_from_json(const nlohmann::json& doc);

}  // namespace rtblab

#endif  // RTBLAB_CALIBRATE_HPP_
