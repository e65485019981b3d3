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

// Static bid functions. Calibration lives in calibrate.hpp because it needs
// the replay environment.

#ifndef RTBLAB_STRATEGIES_HPP_
#define RTBLAB_STRATEGIES_HPP_

#include <array>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "rtblab/logstore.hpp"
#include "rtblab/types.hpp"

namespace rtblab {

inline constexpr int kMinBaseBid = 1;
inline constexpr int kMaxBaseBid = 300;

struct LinParams {
  int base_bid = 1;
  double avg_pctr = 0.0;

  void validate() const;
};

struct OrtbParams {
  double c = 1.0;
  double lambda = 1e-5;

  void validate() const;
};

// Regulating rates a slot's lambda may move by.
inline constexpr std::array<double, 7> kLambdaRegulators = {-0.08, -0.03, -0.01, 0.0, 0.01, 0.03, 0.08};

struct LambdaSchedule {
  double lambda0 = 1e-4;
  // regulators[t-1] moves lambda from slot t-1 to slot t.
  std::vector<double> regulators;

  void validate() const;
  std::size_t slots() const { return regulators.size() + 1; }
  double lambda_at(std::size_t slot_index) const;
};

Currency lin_bid(double pctr, const LinParams& params);
Currency ortb_bid(double pctr, const OrtbParams& params);
Currency scheduled_lambda_bid(double pctr, std::size_t slot_index, const LambdaSchedule& schedule);

// A static strategy: bid given the impression and the index of its pacing
// slot. Must be pure so replays stay deterministic.
using StaticBidder = std::function<Currency(const Impression&, std::int64_t slot_index)>;

StaticBidder make_lin_bidder(const LinParams& params);
StaticBidder make_ortb_bidder(const OrtbParams& params);
StaticBidder make_fixed_price_bidder(Currency price);
StaticBidder make_scheduled_lambda_bidder(LambdaSchedule schedule);

}  // namespace rtblab

#endif  // RTBLAB_STRATEGIES_HPP_
