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

#include "rtblab/strategies.hpp"

#include <algorithm>
#include <cmath>

namespace rtblab {

void LinParams::validate() const {
  if (base_bid < kMinBaseBid || base_bid > kMaxBaseBid) {
    throw InvalidSpecError("LIN base bid outside [1,300]: " + std::to_string(base_bid));
  }
  if (!(avg_pctr > 0.0)) throw InvalidSpecError("LIN avg_pctr must be positive");
}

void OrtbParams::validate() const {
  if (!(c > 0.0) || !(lambda > 0.0)) throw InvalidSpecError("ORTB c and lambda must be positive");
}

void LambdaSchedule::validate() const {
  if (!(lambda0 > 0.0)) throw InvalidSpecError("lambda0 must be positive");
  for (double beta : regulators) {
    const bool allowed = std::any_of(kLambdaRegulators.begin(), kLambdaRegulators.end(),
                                     [&](double r) { return std::abs(r - beta) < 1e-12; });
    if (!allowed) throw InvalidSpecError("regulator " + std::to_string(beta) + " not in the allowed set");
  }
}

double LambdaSchedule::lambda_at(std::size_t slot_index) const {
  if (slot_index >= slots()) {
    throw InvalidSpecError("slot " + std::to_string(slot_index) + " beyond lambda schedule of " +
                           std::to_string(slots()) + " slots");
  }
  double lambda = lambda0;
  for (std::size_t t = 1; t <= slot_index; ++t) lambda *= 1.0 + regulators[t - 1];
  return lambda;
}

Currency lin_bid(double pctr, const LinParams& params) {
  return round_half_up(pctr * params.base_bid / params.avg_pctr);
}

Currency ortb_bid(double pctr, const OrtbParams& params) {
  const double c = params.c;
  const double bid = std::sqrt(c / params.lambda * pctr + c * c) - c;
  return std::max<Currency>(0, round_half_up(bid));
}

Currency scheduled_lambda_bid(double pctr, std::size_t slot_index, const LambdaSchedule& schedule) {
  return round_half_up(pctr / schedule.lambda_at(slot_index));
}

StaticBidder make_lin_bidder(const LinParams& params) {
  params.validate();
  return [params](const Impression& imp, std::int64_t) { return lin_bid(imp.pctr, params); };
}

StaticBidder make_ortb_bidder(const OrtbParams& params) {
  params.validate();
  return [params](const Impression& imp, std::int64_t) { return ortb_bid(imp.pctr, params); };
}

StaticBidder make_fixed_price_bidder(Currency price) {
  if (price < 0) throw InvalidSpecError("fixed bid must be non-negative");
  return [price](const Impression&, std::int64_t) { return price; };
}

StaticBidder make_scheduled_lambda_bidder(LambdaSchedule schedule) {
  schedule.validate();
  // Precompute lambda per slot; lookups past the end throw like the free function.
  std::vector<double> lambdas(schedule.slots());
  for (std::size_t t = 0; t < lambdas.size(); ++t) lambdas[t] = schedule.lambda_at(t);
  return [lambdas = std::move(lambdas)](const Impression& imp, std::int64_t slot) {
    if (slot < 0 || static_cast<std::size_t>(slot) >= lambdas.size()) {
      throw InvalidSpecError("slot " + std::to_string(slot) + " beyond lambda schedule");
    }
    return round_half_up(imp.pctr / lambdas[static_cast<std::size_t>(slot)]);
  };
}

}  // namespace rtblab
