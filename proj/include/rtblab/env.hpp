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

// Delivery-period replay: slot-budget pacing, the three-feature bidding
// state, adjusted-bid composition, second-price settlement and the
// per-impression reward used for training.
//
// A replay walks impressions in logged order. Impressions are grouped into
// slots of `slot_size`; when a slot opens it is allocated
//
//   slot 1:    daily_budget / number_of_slots
//   slot k>1:  1000 * (average price paid so far), or the slot-1 rule on the
//              remaining budget if nothing has been bought yet
//
// always capped by the remaining daily budget. Money left in a slot when it
// closes stays in the daily budget.

#ifndef RTBLAB_ENV_HPP_
#define RTBLAB_ENV_HPP_

#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "rtblab/logstore.hpp"
#include "rtblab/report.hpp"
#include "rtblab/strategies.hpp"
#include "rtblab/types.hpp"

namespace rtblab {

struct PacingConfig {
  std::int64_t slot_size = 1000;
};

struct PacingState {
  std::int64_t t = 0;            // impressions received this episode
  double pctr_sum = 0.0;         // over received impressions
  Currency slot_budget = 0;
  Currency slot_avail = 0;
  std::int64_t slot_imps_left = 0;
  Currency daily_avail = 0;
  Currency cost_spent = 0;
  std::int64_t imps_won = 0;
  std::int64_t slot_index = -1;  // -1 before the first slot opens
  std::int64_t slot_size = 1000;
  std::int64_t slots_total = 0;
  std::int64_t episode_imps = 0;
  double default_avg_pctr = 0.0;  // reported while t == 0

  // Average price of impressions bought so far; empty before the first win.
  std::optional<double> cpm_running() const;
};

PacingState begin_episode(std::int64_t episode_imps, Currency budget, double default_avg_pctr,
                          const PacingConfig& config = {});

// Opens the next slot if the current one is exhausted (or none is open).
void maybe_open_slot(PacingState& pacing);

// Registers an arriving impression: slot rollover then running pCTR sum.
void receive(PacingState& pacing, const Impression& imp);

struct BidState {
  double avg_pctr_t = 0.0;
  double avbudget_ratio = 1.0;
  double avimps_ratio = 1.0;

  friend bool operator==(const BidState&, const BidState&) = default;
};

BidState observe(const PacingState& pacing);

struct BidBounds {
  Currency price_min = 0;
  Currency price_max = 300;

  void validate() const;
};

// Counts base prices that had to be clamped into the bounds.
struct ComposeDiagnostics {
  std::int64_t clamped_base = 0;
};

Currency compose_bid(Currency b_lin, double action, const BidBounds& bounds,
                     ComposeDiagnostics* diagnostics = nullptr);

enum class Outcome { kWon, kUnderbid, kBudgetInsufficient };

struct AuctionOutcome {
  Outcome outcome = Outcome::kUnderbid;
  Currency charge = 0;
  int click = 0;  // only set when won

  bool won() const { return outcome == Outcome::kWon; }
};

// Second-price settlement against the logged market price; consumes the
// impression from the current slot.
AuctionOutcome settle(Currency bid, const Impression& imp, PacingState& pacing);

struct RewardConfig {
  // Replace avbudget by avbudget/slot_budget in the both-win case.
  bool normalize_avbudget = false;
};

enum class RewardCase { kOursOnlyWin = 1, kBothWin = 2, kBothLose = 3, kLinOnlyWin = 4, kBudgetShort = 5 };

RewardCase classify_reward(Currency b, Currency b_lin, const Impression& imp, const PacingState& pacing);

// Uses the pacing state as it was before settling this impression.
double reward(Currency b, Currency b_lin, double action, const Impression& imp, const PacingState& pacing,
              const RewardConfig& config = {});

struct Transition {
  BidState state;
  double action = 0.0;
  double reward = 0.0;
  BidState next_state;
  bool terminal = false;
};

struct BidRecord {
  std::int64_t slot_index = 0;
  Currency slot_budget = 0;
  Currency bid = 0;
  Currency market_price = 0;
  int click = 0;
  Outcome outcome = Outcome::kUnderbid;
  Currency charge = 0;
};

struct ReplayOptions {
  BidBounds bounds;
  PacingConfig pacing;
  RewardConfig reward;
  // avg_pctr value observed before any impression arrives.
  double default_avg_pctr = 0.0;
  // Optional sink for compose_bid clamp counts (learning replays only).
  ComposeDiagnostics* diagnostics = nullptr;
};

EpisodeReport replay_static(const Episode& episode, const StaticBidder& bidder, Currency budget,
                            const ReplayOptions& options = {}, std::vector<BidRecord>* trace = nullptr);

// Maps a state to an adjustment factor in (-1, 1).
using ActionFn = std::function<double(const BidState&)>;

struct LearningHooks {
  // Called in replay order, once per impression.
  std::function<void(const Transition&)> on_transition;
};

EpisodeReport replay_learning(const Episode& episode, const ActionFn& policy, const LinParams& lin,
                              Currency budget, const ReplayOptions& options = {},
                              const LearningHooks& hooks = {}, std::vector<BidRecord>* trace = nullptr);

}  // namespace rtblab

#endif  // RTBLAB_ENV_HPP_
