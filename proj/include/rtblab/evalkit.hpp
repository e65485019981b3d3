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

// Experiment orchestration: budget sweeps, lost-click attribution, the CTR
// stand-in model, the SAC train/evaluate protocol and report rendering.

#ifndef RTBLAB_EVALKIT_HPP_
#define RTBLAB_EVALKIT_HPP_

#include <Eigen/Dense>

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "rtblab/calibrate.hpp"
#include "rtblab/env.hpp"
#include "rtblab/logstore.hpp"
#include "rtblab/report.hpp"
#include "rtblab/sac/sac.hpp"
#include "rtblab/strategies.hpp"

namespace rtblab {

// Budget fraction num/den of an episode's actual cost.
struct Fraction {
  std::int64_t num = 1;
  std::int64_t den = 1;

  double value() const { return static_cast<double>(num) / static_cast<double>(den); }
  std::string label() const;
  Currency apply(Currency actual_cost) const { return actual_cost * num / den; }

  friend bool operator==(const Fraction&, const Fraction&) = default;
};

// Accepts "num/den" or a whole number.
Fraction parse_fraction(const std::string& text);
std::vector<Fraction> parse_fractions(const std::string& comma_separated);
std::vector<Fraction> default_fractions();  // 1/2, 1/4, 1/8, 1/16

// One named strategy: replays an episode under a budget. Must be safe to call
// concurrently on distinct episodes.
struct StrategyRun {
  std::string name;
  std::function<EpisodeReport(const Episode&, Currency budget)> run;
};

StrategyRun static_strategy(std::string name, StaticBidder bidder, const ReplayOptions& options = {});
// LIN bid composed with a fixed action; 0 reproduces LIN.
StrategyRun fixed_action_strategy(std::string name, const LinParams& lin, double action,
                                  const ReplayOptions& options = {});
// Frozen actor acting greedily. The bundle must outlive the strategy.
StrategyRun greedy_sac_strategy(std::string name, const sac::PolicyBundle& bundle, const LinParams& lin,
                                const ReplayOptions& options = {});

struct SweepCell {
  std::string strategy;
  Fraction fraction;
  std::string period_id;
  EpisodeReport report;
};

struct ComparisonTable {
  std::vector<std::string> strategies;  // display order
  std::vector<Fraction> fractions;      // display order
  std::vector<std::string> periods;     // sorted
  // Sorted by (strategy order, fraction order, period_id).
  std::vector<SweepCell> cells;

  // Sum over periods of one (strategy, fraction).
  EpisodeReport total(const std::string& strategy, const Fraction& fraction) const;
};

ComparisonTable budget_sweep(std::span<const Episode> episodes, std::span<const StrategyRun> strategies,
                             std::span<const Fraction> fractions);

struct LostClicks {
  std::int64_t early_stop = 0;
  std::int64_t underbid = 0;
};

// The trace must be the one recorded while replaying `episode`.
LostClicks attribute_lost_clicks(const Episode& episode, std::span<const BidRecord> trace);

// Logistic regression on dense features.
struct LogisticModel {
  Eigen::VectorXd weights;
  double bias = 0.0;

  double score(const Eigen::Ref<const Eigen::VectorXd>& x) const;
  Eigen::VectorXd score_all(const Eigen::Ref<const Eigen::MatrixXd>& rows) const;
};

struct CtrTrainConfig {
  int iterations = 300;
  double learning_rate = 0.5;
  double l2 = 1e-4;
  double holdout_fraction = 0.2;  // last share of rows held out for AUC
};

struct CtrTrainResult {
  LogisticModel model;
  double auc = 0.5;  // on the held-out rows
  std::size_t train_rows = 0;
  std::size_t holdout_rows = 0;
};

// Full-batch gradient descent on rows x features with 0/1 labels.
CtrTrainResult train_ctr(const Eigen::Ref<const Eigen::MatrixXd>& features, std::span<const int> labels,
                         const CtrTrainConfig& config = {});

// Area under the ROC curve by the rank statistic; tied scores count one half.
double auc(std::span<const double> scores, std::span<const int> labels);

// Writes model scores into each impression's pctr, rows in episode-major order.
void populate_pctr(std::vector<Episode>& episodes, const Eigen::Ref<const Eigen::MatrixXd>& features,
                   const LogisticModel& model);

// Training protocol for the learning strategy: sweep the training episodes
// in order for `epochs` passes with a persistent buffer, acting
// stochastically and training every k transitions.
struct SacProtocol {
  int epochs = 5;
  sac::SacConfig sac;
  std::uint64_t seed = 0;
};

struct EpochLog {
  int epoch = 0;
  std::int64_t clicks = 0;
  double reward_sum = 0.0;
  std::size_t trainings = 0;  // train_rounds calls that ran
};

struct SacTrainResult {
  sac::SacAgent agent;
  std::vector<EpochLog> epochs;
};

SacTrainResult train_sac(std::span<const Episode> train, const LinParams& lin, const BudgetMap& budgets,
                         const SacProtocol& protocol, const ReplayOptions& options = {});

enum class ReportFormat { kCsv, kJson, kMarkdown };

ReportFormat parse_report_format(const std::string& name);
std::string emit_report(const ComparisonTable& table, ReportFormat format);

}  // namespace rtblab

#endif  // RTBLAB_EVALKIT_HPP_
