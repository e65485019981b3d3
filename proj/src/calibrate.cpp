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

#include "rtblab/calibrate.hpp"

#include <algorithm>
#include <cmath>

#include "rtblab/parallel.hpp"

namespace rtblab {

BudgetMap budgets_for_fraction(std::span<const Episode> episodes, std::int64_t numerator,
                               std::int64_t denominator) {
  if (numerator < 0 || denominator <= 0) throw InvalidSpecError("budget fraction must be non-negative");
  BudgetMap budgets;
  for (const auto& episode : episodes) {
    budgets[episode.period_id] = episode.actual_cost() * numerator / denominator;
  }
  return budgets;
}

std::int64_t total_clicks(std::span<const Episode> episodes, const StaticBidder& bidder,
                          const BudgetMap& budget_per_period, const ReplayOptions& options) {
  std::int64_t clicks = 0;
  for (const auto& episode : episodes) {
    const auto it = budget_per_period.find(episode.period_id);
    if (it == budget_per_period.end()) throw InvalidSpecError("no budget for period " + episode.period_id);
    clicks += replay_static(episode, bidder, it->second, options).clicks_won;
  }
  return clicks;
}

LinCalibration calibrate_lin(std::span<const Episode> train, const BudgetMap& budget_per_period,
                             const ReplayOptions& options) {
  if (train.empty()) throw InvalidSpecError("calibrate_lin: no training episodes");
  LinCalibration result;
  result.params.avg_pctr = stats(train).avg_pctr;
  if (!(result.params.avg_pctr > 0.0)) throw DataError("calibrate_lin: training avg pCTR is not positive");

  constexpr std::size_t kCandidates = kMaxBaseBid - kMinBaseBid + 1;
  result.clicks.assign(kCandidates, 0);
  parallel_for(kCandidates, [&](std::size_t i) {
    LinParams candidate{static_cast<int>(i) + kMinBaseBid, result.params.avg_pctr};
    result.clicks[i] = total_clicks(train, make_lin_bidder(candidate), budget_per_period, options);
  });

  std::size_t best = 0;
  for (std::size_t i = 1; i < kCandidates; ++i) {
    if (result.clicks[i] > result.clicks[best]) best = i;
  }
  result.params.base_bid = static_cast<int>(best) + kMinBaseBid;
  return result;
}

OrtbGrid OrtbGrid::defaults() {
  OrtbGrid grid;
  for (int c = 5; c <= 100; c += 5) grid.c_values.push_back(c);
  for (int k = 0; k <= 16; ++k) grid.lambda_values.push_back(std::pow(10.0, -7.0 + 0.25 * k));
  return grid;
}

OrtbCalibration calibrate_ortb(std::span<const Episode> train, const BudgetMap& budget_per_period,
                               const OrtbGrid& grid, const ReplayOptions& options) {
  if (train.empty()) throw InvalidSpecError("calibrate_ortb: no training episodes");
  if (grid.c_values.empty() || grid.lambda_values.empty()) throw InvalidSpecError("calibrate_ortb: empty grid");
  // Visit lambda-major with both axes ascending so "first best" is the tie-break.
  std::vector<double> lambdas = grid.lambda_values;
  std::vector<double> cs = grid.c_values;
  std::sort(lambdas.begin(), lambdas.end());
  std::sort(cs.begin(), cs.end());

  OrtbCalibration result;
  result.grid_clicks.assign(lambdas.size() * cs.size(), 0);
  parallel_for(result.grid_clicks.size(), [&](std::size_t k) {
    const OrtbParams candidate{cs[k % cs.size()], lambdas[k / cs.size()]};
    result.grid_clicks[k] = total_clicks(train, make_ortb_bidder(candidate), budget_per_period, options);
  });

  std::size_t best = 0;
  for (std::size_t k = 1; k < result.grid_clicks.size(); ++k) {
    if (result.grid_clicks[k] > result.grid_clicks[best]) best = k;
  }
  result.params = {cs[best % cs.size()], lambdas[best / cs.size()]};
  result.clicks = result.grid_clicks[best];
  return result;
}

nlohmann::json to_json(const LinCalibration& calibration) {
  return {
      {"base_bid", calibration.params.base_bid},
      {"avg_pctr", calibration.params.avg_pctr},
      {"search", {{"candidates", {kMinBaseBid, kMaxBaseBid}}, {"clicks", calibration.clicks}}},
  };
}

nlohmann::json to_json(const OrtbCalibration& calibration, const OrtbGrid& grid) {
  return {
      {"c", calibration.params.c},
      {"lambda", calibration.params.lambda},
      {"clicks", calibration.clicks},
      {"search", {{"c_values", grid.c_values}, {"lambda_values", grid.lambda_values}}},
  };
}

LinParams lin_params_from_json(const nlohmann::json& doc) {
  LinParams params;
  params.base_bid = doc.at("base_bid").get<int>();
  params.avg_pctr = doc.at("avg_pctr").get<double>();
  params.validate();
  return params;
}

OrtbParams ortb_params_from_json(const nlohmann::json& doc) {
  OrtbParams params;
  params.c = doc.at("c").get<double>();
  params.lambda = doc.at("lambda").get<double>();
  params.validate();
  return params;
}

}  // namespace rtblab
