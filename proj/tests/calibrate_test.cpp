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


#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "rtblab/calibrate.hpp"
#include "support/oracles.hpp"

namespace rtblab {
namespace {

// Every impression is clicked, so winning all clicks means winning all impressions.
Episode flat_market(std::int64_t n, Currency market, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> logit(-4.0, -3.0);
  Episode episode;
  episode.period_id = "d";
  for (std::int64_t i = 0; i < n; ++i) {
    const double pctr = 1.0 / (1.0 + std::exp(-logit(rng)));
    episode.impressions.push_back({i, pctr, market, 1, "d"});
  }
  episode.budget = episode.actual_cost();
  return episode;
}

TEST(Budgets, FractionOfActualCost) {
  Episode a, b;
  a.period_id = "a";
  a.impressions = {{0, 0.1, 15036900, 0, "a"}};
  b.period_id = "b";
  b.impressions = {{0, 0.1, 7, 0, "b"}};
  const std::vector<Episode> episodes = {a, b};
  const auto half = budgets_for_fraction(episodes, 1, 2);
  EXPECT_EQ(half.at("a"), 7518450);
  EXPECT_EQ(half.at("b"), 3);
  EXPECT_THROW(budgets_for_fraction(episodes, 1, 0), InvalidSpecError);
}

TEST(CalibrateLin, UnlimitedBudgetFlatMarketPicksSmallestWinningBase) {
  std::mt19937_64 rng(1);
  const std::vector<Episode> train = {flat_market(800, 50, rng)};
  BudgetMap budgets{{"d", train[0].actual_cost() * 100}};
  const auto result = calibrate_lin(train, budgets);
  // Smallest base whose lowest-pctr bid reaches 50.
  double min_pctr = 1.0;
  for (const auto& imp : train[0].impressions) min_pctr = std::min(min_pctr, imp.pctr);
  int expected = 0;
  for (int base = 1; base <= 300 && expected == 0; ++base) {
    if (std::floor(min_pctr * base / result.params.avg_pctr + 0.5) >= 50) expected = base;
  }
  ASSERT_GT(expected, 0);
  EXPECT_EQ(result.params.base_bid, expected);
  EXPECT_EQ(result.clicks[expected - 1], train[0].total_clicks());
  EXPECT_LT(result.clicks[expected - 2], train[0].total_clicks());
}

TEST(CalibrateLin, NoWinnableImpressionTiesToOne) {
  Episode episode;
  episode.period_id = "d";
  episode.impressions = {{0, 0.01, 301, 1, "d"}};
  const std::vector<Episode> train = {episode};
  const auto result = calibrate_lin(train, {{"d", 1000}});
  EXPECT_EQ(result.params.base_bid, 1);
  EXPECT_DOUBLE_EQ(result.params.avg_pctr, 0.01);
}

TEST(CalibrateLin, MatchesExhaustiveOracle) {
  std::mt19937_64 rng(2);
  for (int trial = 0; trial < 6; ++trial) {
    std::vector<Episode> train;
    std::vector<std::int64_t> budgets;
    BudgetMap budget_map;
    const int periods = 1 + static_cast<int>(rng() % 3);
    for (int p = 0; p < periods; ++p) {
      train.push_back(testing::random_episode(rng, 200 + static_cast<std::int64_t>(rng() % 1500),
                                              "p" + std::to_string(p), 120));
      budgets.push_back(train.back().actual_cost() / (2 + static_cast<std::int64_t>(rng() % 15)));
      budget_map[train.back().period_id] = budgets.back();
    }
    const auto result = calibrate_lin(train, budget_map);
    double sum = 0.0;
    std::int64_t n = 0;
    for (const auto& e : train) {
      for (const auto& imp : e.impressions) sum += imp.pctr, ++n;
    }
    EXPECT_NEAR(result.params.avg_pctr, sum / n, 1e-12 * sum / n);
    const auto oracle = testing::ref_search_lin(train, budgets, result.params.avg_pctr);
    EXPECT_EQ(result.params.base_bid, oracle.base_bid);
    EXPECT_EQ(result.clicks, oracle.clicks);
  }
}

TEST(CalibrateLin, JsonRoundTrip) {
  std::mt19937_64 rng(3);
  const std::vector<Episode> train = {testing::random_episode(rng, 500, "d")};
  const auto result = calibrate_lin(train, budgets_for_fraction(train, 1, 4));
  const auto params = lin_params_from_json(nlohmann::json::parse(to_json(result).dump()));
  EXPECT_EQ(params.base_bid, result.params.base_bid);
  EXPECT_EQ(params.avg_pctr, result.params.avg_pctr);
}

// Grid oracle: every (c, lambda) pair through the reference replay, with the
// smallest lambda and then the smallest c winning ties.
OrtbParams ortb_oracle(const std::vector<Episode>& train, const std::vector<std::int64_t>& budgets,
                       const OrtbGrid& grid, std::int64_t* best_clicks) {
  OrtbParams best{};
  std::int64_t best_value = -1;
  for (double lambda : grid.lambda_values) {
    for (double c : grid.c_values) {
      std::int64_t clicks = 0;
      for (std::size_t e = 0; e < train.size(); ++e) {
        std::vector<std::int64_t> bids;
        for (const auto& imp : train[e].impressions) {
          const double bid = std::sqrt(c / lambda * imp.pctr + c * c) - c;
          bids.push_back(std::max<std::int64_t>(0, static_cast<std::int64_t>(std::floor(bid + 0.5))));
        }
        clicks += testing::ref_replay(testing::to_ref(train[e]), bids, budgets[e]).clicks;
      }
      if (clicks > best_value) {
        best_value = clicks;
        best = {c, lambda};
      }
    }
  }
  *best_clicks = best_value;
  return best;
}

TEST(CalibrateOrtb, UnlimitedBudgetFlatMarket) {
  std::mt19937_64 rng(4);
  const std::vector<Episode> train = {flat_market(600, 50, rng)};
  const std::vector<std::int64_t> budgets = {train[0].actual_cost() * 100};
  const OrtbGrid grid = OrtbGrid::defaults();
  const auto result = calibrate_ortb(train, {{"d", budgets[0]}}, grid);
  std::int64_t clicks = 0;
  const auto expected = ortb_oracle(train, budgets, grid, &clicks);
  EXPECT_EQ(result.clicks, train[0].total_clicks());
  EXPECT_EQ(result.clicks, clicks);
  EXPECT_EQ(result.params.c, expected.c);
  EXPECT_EQ(result.params.lambda, expected.lambda);
}

TEST(CalibrateOrtb, DegenerateLogTiesToFirstCell) {
  Episode episode;
  episode.period_id = "d";
  episode.impressions = {{0, 0.01, 100000, 1, "d"}};
  const std::vector<Episode> train = {episode};
  const OrtbGrid grid = OrtbGrid::defaults();
  const auto result = calibrate_ortb(train, {{"d", 1000}}, grid);
  EXPECT_EQ(result.clicks, 0);
  EXPECT_EQ(result.params.c, 5.0);
  EXPECT_EQ(result.params.lambda, grid.lambda_values.front());
}

TEST(CalibrateOrtb, MatchesGridOracle) {
  std::mt19937_64 rng(5);
  OrtbGrid grid;
  grid.c_values = {5, 20, 60};
  grid.lambda_values = {1e-6, 1e-5, 3e-5, 1e-4};
  for (int trial = 0; trial < 5; ++trial) {
    std::vector<Episode> train;
    std::vector<std::int64_t> budgets;
    BudgetMap budget_map;
    for (int p = 0; p < 2; ++p) {
      train.push_back(testing::random_episode(rng, 300 + static_cast<std::int64_t>(rng() % 1500),
                                              "p" + std::to_string(p), 150));
      budgets.push_back(train.back().actual_cost() / (2 + static_cast<std::int64_t>(rng() % 10)));
      budget_map[train.back().period_id] = budgets.back();
    }
    const auto result = calibrate_ortb(train, budget_map, grid);
    std::int64_t clicks = 0;
    const auto expected = ortb_oracle(train, budgets, grid, &clicks);
    EXPECT_EQ(result.clicks, clicks);
    EXPECT_EQ(result.params.c, expected.c);
    EXPECT_EQ(result.params.lambda, expected.lambda);
  }
}

TEST(CalibrateOrtb, DefaultGridShape) {
  const OrtbGrid grid = OrtbGrid::defaults();
  ASSERT_EQ(grid.c_values.size(), 20u);
  EXPECT_EQ(grid.c_values.front(), 5.0);
  EXPECT_EQ(grid.c_values.back(), 100.0);
  ASSERT_EQ(grid.lambda_values.size(), 17u);
  EXPECT_NEAR(grid.lambda_values.front(), 1e-7, 1e-20);
  EXPECT_NEAR(grid.lambda_values.back(), 1e-3, 1e-16);
}

}  // namespace
}  // namespace rtblab
