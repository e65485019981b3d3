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

#include "rtblab/env.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>

namespace rtblab {

EpisodeReport& EpisodeReport::operator+=(const EpisodeReport& other) {
  clicks_won += other.clicks_won;
  pctr_sum_won += other.pctr_sum_won;
  imps_won += other.imps_won;
  cost += other.cost;
  budget += other.budget;
  lost_clicks_early_stop += other.lost_clicks_early_stop;
  lost_clicks_underbid += other.lost_clicks_underbid;
  impressions += other.impressions;
  total_clicks += other.total_clicks;
  return *this;
}

std::optional<double> PacingState::cpm_running() const {
  if (imps_won == 0) return std::nullopt;
  return static_cast<double>(cost_spent) / static_cast<double>(imps_won);
}

PacingState begin_episode(std::int64_t episode_imps, Currency budget, double default_avg_pctr,
                          const PacingConfig& config) {
  if (config.slot_size <= 0) throw InvalidSpecError("slot_size must be positive");
  if (budget < 0) throw InvalidSpecError("negative budget");
  PacingState pacing;
  pacing.slot_size = config.slot_size;
  pacing.episode_imps = episode_imps;
  pacing.slots_total = (episode_imps + config.slot_size - 1) / config.slot_size;
  pacing.daily_avail = budget;
  pacing.default_avg_pctr = default_avg_pctr;
  return pacing;
}

void maybe_open_slot(PacingState& pacing) {
  if (pacing.slot_index >= 0 && pacing.slot_imps_left > 0) return;
  ++pacing.slot_index;
  const std::int64_t remaining_imps = pacing.episode_imps - pacing.t;
  pacing.slot_imps_left = std::clamp<std::int64_t>(remaining_imps, 0, pacing.slot_size);

  Currency allocation = 0;
  if (pacing.slot_index > 0 && pacing.imps_won > 0) {
    allocation = pacing.cost_spent * pacing.slot_size / pacing.imps_won;
  } else {
    const std::int64_t remaining_slots = std::max<std::int64_t>(1, pacing.slots_total - pacing.slot_index);
    allocation = pacing.daily_avail / remaining_slots;
  }
  pacing.slot_budget = std::min(allocation, pacing.daily_avail);
  pacing.slot_avail = pacing.slot_budget;
}

void receive(PacingState& pacing, const Impression& imp) {
  if (!imp.has_pctr()) throw DataError("impression without pCTR; estimate CTR before replay");
  maybe_open_slot(pacing);
  ++pacing.t;
  pacing.pctr_sum += imp.pctr;
}

BidState observe(const PacingState& pacing) {
  BidState state;
  state.avg_pctr_t = pacing.t > 0 ? pacing.pctr_sum / static_cast<double>(pacing.t) : pacing.default_avg_pctr;
  // A zero-sized allocation has nothing available.
  state.avbudget_ratio = pacing.slot_budget > 0 ? static_cast<double>(pacing.slot_avail) /
                                                      static_cast<double>(pacing.slot_budget)
                                                : 0.0;
  state.avimps_ratio = static_cast<double>(pacing.slot_imps_left) / static_cast<double>(pacing.slot_size);
  if (pacing.slot_index < 0) {
    state.avbudget_ratio = 1.0;
    state.avimps_ratio = 1.0;
  }
  return state;
}

void BidBounds::validate() const {
  if (price_min < 0 || price_min >= price_max) throw InvalidSpecError("bid bounds need 0 <= min < max");
}

Currency compose_bid(Currency b_lin, double action, const BidBounds& bounds, ComposeDiagnostics* diagnostics) {
  if (b_lin < bounds.price_min || b_lin > bounds.price_max) {
    b_lin = std::clamp(b_lin, bounds.price_min, bounds.price_max);
    if (diagnostics != nullptr) ++diagnostics->clamped_base;
  }
  const Currency range = std::min(bounds.price_max - b_lin, b_lin - bounds.price_min);
  const Currency bid = round_half_up(static_cast<double>(b_lin) + action * static_cast<double>(range));
  return std::clamp(bid, bounds.price_min, bounds.price_max);
}

AuctionOutcome settle(Currency bid, const Impression& imp, PacingState& pacing) {
  AuctionOutcome result;
  const Currency market = imp.market_price;
  if (bid < market) {
    result.outcome = Outcome::kUnderbid;
  } else if (pacing.slot_avail < market) {
    result.outcome = Outcome::kBudgetInsufficient;
  } else {
    result.outcome = Outcome::kWon;
    result.charge = market;
    result.click = imp.click;
    pacing.slot_avail -= market;
    pacing.daily_avail -= market;
    pacing.cost_spent += market;
    ++pacing.imps_won;
  }
  if (pacing.slot_imps_left > 0) --pacing.slot_imps_left;
  return result;
}

RewardCase classify_reward(Currency b, Currency b_lin, const Impression& imp, const PacingState& pacing) {
  if (pacing.slot_avail < b) return RewardCase::kBudgetShort;
  const bool lin_wins = b_lin >= imp.market_price;
  const bool ours_wins = b >= imp.market_price;
  if (ours_wins) return lin_wins ? RewardCase::kBothWin : RewardCase::kOursOnlyWin;
  return lin_wins ? RewardCase::kLinOnlyWin : RewardCase::kBothLose;
}

double reward(Currency b, Currency b_lin, double action, const Impression& imp, const PacingState& pacing,
              const RewardConfig& config) {
  const double pctr = imp.pctr;
  switch (classify_reward(b, b_lin, imp, pacing)) {
    case RewardCase::kBudgetShort:
      return -pctr;
    case RewardCase::kOursOnlyWin:
      return pctr;
    case RewardCase::kBothWin: {
      double avbudget = static_cast<double>(pacing.slot_avail);
      if (config.normalize_avbudget) {
        avbudget = pacing.slot_budget > 0 ? avbudget / static_cast<double>(pacing.slot_budget) : 0.0;
      }
      return pctr * avbudget / (static_cast<double>(std::llabs(b - b_lin)) + 1.0);
    }
    case RewardCase::kBothLose:
      return pctr * (action - 1.0);
    case RewardCase::kLinOnlyWin:
      return pctr * action;
  }
  return 0.0;
}

namespace {

void tally(EpisodeReport& report, const Impression& imp, const AuctionOutcome& outcome) {
  switch (outcome.outcome) {
    case Outcome::kWon:
      report.clicks_won += imp.click;
      report.pctr_sum_won += imp.pctr;
      ++report.imps_won;
      report.cost += outcome.charge;
      break;
    case Outcome::kUnderbid:
      report.lost_clicks_underbid += imp.click;
      break;
    case Outcome::kBudgetInsufficient:
      report.lost_clicks_early_stop += imp.click;
      break;
  }
}

EpisodeReport empty_report(const Episode& episode, Currency budget) {
  EpisodeReport report;
  report.budget = budget;
  report.impressions = static_cast<std::int64_t>(episode.impressions.size());
  report.total_clicks = episode.total_clicks();
  return report;
}

}  // namespace

EpisodeReport replay_static(const Episode& episode, const StaticBidder& bidder, Currency budget,
                            const ReplayOptions& options, std::vector<BidRecord>* trace) {
  EpisodeReport report = empty_report(episode, budget);
  PacingState pacing = begin_episode(report.impressions, budget, options.default_avg_pctr, options.pacing);
  if (trace != nullptr) trace->reserve(trace->size() + episode.impressions.size());
  for (const auto& imp : episode.impressions) {
    receive(pacing, imp);
    const Currency bid = bidder(imp, pacing.slot_index);
    const Currency slot_budget = pacing.slot_budget;
    const AuctionOutcome outcome = settle(bid, imp, pacing);
    tally(report, imp, outcome);
    if (trace != nullptr) {
      trace->push_back({pacing.slot_index, slot_budget, bid, imp.market_price, imp.click, outcome.outcome,
                        outcome.charge});
    }
  }
  return report;
}

EpisodeReport replay_learning(const Episode& episode, const ActionFn& policy, const LinParams& lin,
                              Currency budget, const ReplayOptions& options, const LearningHooks& hooks,
                              std::vector<BidRecord>* trace) {
  lin.validate();
  EpisodeReport report = empty_report(episode, budget);
  PacingState pacing = begin_episode(report.impressions, budget, options.default_avg_pctr, options.pacing);
  if (trace != nullptr) trace->reserve(trace->size() + episode.impressions.size());
  const std::size_t n = episode.impressions.size();
  for (std::size_t i = 0; i < n; ++i) {
    const Impression& imp = episode.impressions[i];
    receive(pacing, imp);
    Transition transition;
    transition.state = observe(pacing);
    const double action = policy(transition.state);
    if (!(action > -1.0 && action < 1.0)) throw Error("policy action outside (-1, 1)");
    const Currency b_lin = lin_bid(imp.pctr, lin);
    const Currency bid = compose_bid(b_lin, action, options.bounds, options.diagnostics);
    transition.action = action;
    transition.reward = reward(bid, b_lin, action, imp, pacing, options.reward);
    const Currency slot_budget = pacing.slot_budget;
    const AuctionOutcome outcome = settle(bid, imp, pacing);
    tally(report, imp, outcome);
    if (trace != nullptr) {
      trace->push_back({pacing.slot_index, slot_budget, bid, imp.market_price, imp.click, outcome.outcome,
                        outcome.charge});
    }
    transition.next_state = observe(pacing);
    transition.terminal = i + 1 == n;
    if (hooks.on_transition) hooks.on_transition(transition);
  }
  return report;
}

}  // namespace rtblab
