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

#include "rtblab/strategies.hpp"

namespace rtblab {
namespace {

TEST(LinBid, Examples) {
  EXPECT_EQ(lin_bid(0.0008, {100, 0.0008}), 100);
  EXPECT_EQ(lin_bid(0.0, {100, 0.0008}), 0);
  // 0.002 / 0.0008 * 111 = 277.5, rounded half-up.
  EXPECT_EQ(lin_bid(0.002, {111, 0.0008}), 278);
}

TEST(LinParams, ValidateBounds) {
  EXPECT_THROW((LinParams{0, 0.001}).validate(), InvalidSpecError);
  EXPECT_THROW((LinParams{301, 0.001}).validate(), InvalidSpecError);
  EXPECT_THROW((LinParams{100, 0.0}).validate(), InvalidSpecError);
  EXPECT_NO_THROW((LinParams{300, 0.001}).validate());
}

TEST(OrtbBid, Examples) {
  EXPECT_EQ(ortb_bid(0.0, {20, 1e-5}), 0);
  // sqrt(20 / 1e-5 * 0.001 + 400) - 20 = sqrt(2400) - 20 = 28.99
  EXPECT_EQ(ortb_bid(0.001, {20, 1e-5}), 29);
  EXPECT_THROW((OrtbParams{0.0, 1e-5}).validate(), InvalidSpecError);
  EXPECT_THROW((OrtbParams{1.0, 0.0}).validate(), InvalidSpecError);
}

TEST(StaticBids, MonotoneAndNonNegative) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int trial = 0; trial < 10000; ++trial) {
    const LinParams lin{1 + static_cast<int>(rng() % 300), 1e-4 + 0.01 * unit(rng)};
    const OrtbParams ortb{1 + 99 * unit(rng), std::pow(10.0, -7 + 4 * unit(rng))};
    double p1 = unit(rng) * 0.1, p2 = unit(rng) * 0.1;
    if (p1 > p2) std::swap(p1, p2);
    EXPECT_GE(lin_bid(p1, lin), 0);
    EXPECT_GE(ortb_bid(p1, ortb), 0);
    EXPECT_LE(lin_bid(p1, lin), lin_bid(p2, lin));
    EXPECT_LE(ortb_bid(p1, ortb), ortb_bid(p2, ortb));
  }
}

TEST(ScheduledLambda, ZeroRegulatorsGiveConstantBid) {
  const LambdaSchedule schedule{2e-4, std::vector<double>(9, 0.0)};
  for (std::size_t slot = 0; slot < schedule.slots(); ++slot) {
    EXPECT_EQ(scheduled_lambda_bid(0.003, slot, schedule), round_half_up(0.003 / 2e-4));
  }
}

TEST(ScheduledLambda, FirstStepUsesFirstRegulator) {
  const LambdaSchedule schedule{1e-4, {0.08}};
  EXPECT_EQ(scheduled_lambda_bid(0.001, 0, schedule), 10);
  // 0.001 / 1.08e-4 = 9.26
  EXPECT_EQ(scheduled_lambda_bid(0.001, 1, schedule), 9);
}

TEST(ScheduledLambda, NegativeRegulatorInduction) {
  const LambdaSchedule schedule{1e-4, std::vector<double>(30, -0.08)};
  double expected = 1e-4;
  for (std::size_t slot = 1; slot < schedule.slots(); ++slot) {
    expected *= 0.92;
    EXPECT_LT(schedule.lambda_at(slot), schedule.lambda_at(slot - 1));
    EXPECT_NEAR(schedule.lambda_at(slot), expected, 1e-15);
    EXPECT_GT(scheduled_lambda_bid(0.01, slot, schedule), scheduled_lambda_bid(0.01, slot - 1, schedule));
  }
}

TEST(ScheduledLambda, RejectsBadInput) {
  const LambdaSchedule schedule{1e-4, {0.01, 0.03}};
  EXPECT_THROW(scheduled_lambda_bid(0.01, 3, schedule), InvalidSpecError);
  EXPECT_THROW((LambdaSchedule{1e-4, {0.05}}).validate(), InvalidSpecError);
  EXPECT_THROW((LambdaSchedule{0.0, {}}).validate(), InvalidSpecError);
}

TEST(Bidders, WrapBidFunctions) {
  const Impression imp{0, 0.002, 10, 0, "d"};
  EXPECT_EQ(make_lin_bidder({111, 0.0008})(imp, 0), 278);
  EXPECT_EQ(make_ortb_bidder({20, 1e-5})(Impression{0, 0.001, 10, 0, "d"}, 0), 29);
  EXPECT_EQ(make_fixed_price_bidder(300)(imp, 5), 300);
  EXPECT_EQ(make_scheduled_lambda_bidder({1e-4, {0.08}})(Impression{0, 0.001, 0, 0, "d"}, 1), 9);
}

}  // namespace
}  // namespace rtblab
