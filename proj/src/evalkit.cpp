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

#include "rtblab/evalkit.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "rtblab/parallel.hpp"

namespace rtblab {
namespace {

std::int64_t parse_int(const std::string& text, const std::string& whole) {
  std::size_t used = 0;
  std::int64_t value = 0;
  try {
    value = std::stoll(text, &used);
  } catch (const std::exception&) {
    throw ConfigError("invalid budget fraction '" + whole + "'");
  }
  if (used != text.size()) throw ConfigError("invalid budget fraction '" + whole + "'");
  return value;
}

std::string format_double(double value, const char* spec = "%.6f") {
  char buf[64];
  std::snprintf(buf, sizeof(buf), spec, value);
  return buf;
}

double sigmoid(double z) { return 1.0 / (1.0 + std::exp(-z)); }

}  // namespace

std::string Fraction::label() const {
  if (den == 1) return std::to_string(num);
  return std::to_string(num) + "/" + std::to_string(den);
}

Fraction parse_fraction(const std::string& text) {
  Fraction f;
  const auto slash = text.find('/');
  if (slash == std::string::npos) {
    f.num = parse_int(text, text);
    f.den = 1;
  } else {
    f.num = parse_int(text.substr(0, slash), text);
    f.den = parse_int(text.substr(slash + 1), text);
  }
  if (f.num < 0 || f.den <= 0) throw ConfigError("budget fraction must be non-negative: '" + text + "'");
  return f;
}

std::vector<Fraction> parse_fractions(const std::string& comma_separated) {
  std::vector<Fraction> out;
  std::stringstream in(comma_separated);
  std::string item;
  while (std::getline(in, item, ',')) {
    item.erase(0, item.find_first_not_of(" \t"));
    item.erase(item.find_last_not_of(" \t") + 1);
    if (!item.empty()) out.push_back(parse_fraction(item));
  }
  if (out.empty()) throw ConfigError("no budget fractions given");
  return out;
}

std::vector<Fraction> default_fractions() { return {{1, 2}, {1, 4}, {1, 8}, {1, 16}}; }

StrategyRun static_strategy(std::string name, StaticBidder bidder, const ReplayOptions& options) {
  return {std::move(name), [bidder = std::move(bidder), options](const Episode& episode, Currency budget) {
            return replay_static(episode, bidder, budget, options);
          }};
}

StrategyRun fixed_action_strategy(std::string name, const LinParams& lin, double action,
                                  const ReplayOptions& options) {
  lin.validate();
  return {std::move(name), [lin, action, options](const Episode& episode, Currency budget) {
            return replay_learning(
                episode, [action](const BidState&) { return action; }, lin, budget, options);
          }};
}

StrategyRun greedy_sac_strategy(std::string name, const sac::PolicyBundle& bundle, const LinParams& lin,
                                const ReplayOptions& options) {
  lin.validate();
  const sac::PolicyBundle* frozen = &bundle;
  return {std::move(name), [frozen, lin, options](const Episode& episode, Currency budget) {
            const double bound = std::nextafter(1.0, 0.0);
            auto policy = [frozen, bound](const BidState& s) {
              return std::clamp(sac::greedy_action(frozen->actor, s, frozen->pctr_scale), -bound, bound);
            };
            return replay_learning(episode, policy, lin, budget, options);
          }};
}

EpisodeReport ComparisonTable::total(const std::string& strategy, const Fraction& fraction) const {
  EpisodeReport sum;
  for (const auto& cell : cells) {
    if (cell.strategy == strategy && cell.fraction == fraction) sum += cell.report;
  }
  return sum;
}

ComparisonTable budget_sweep(std::span<const Episode> episodes, std::span<const StrategyRun> strategies,
                             std::span<const Fraction> fractions) {
  ComparisonTable table;
  for (const auto& s : strategies) {
    if (std::find(table.strategies.begin(), table.strategies.end(), s.name) != table.strategies.end()) {
      throw ConfigError("duplicate strategy name " + s.name);
    }
    table.strategies.push_back(s.name);
  }
  table.fractions.assign(fractions.begin(), fractions.end());
  std::vector<std::size_t> order(episodes.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return episodes[a].period_id < episodes[b].period_id; });
  for (std::size_t i : order) table.periods.push_back(episodes[i].period_id);

  const std::size_t per_strategy = fractions.size() * order.size();
  table.cells.resize(strategies.size() * per_strategy);
  parallel_for(table.cells.size(), [&](std::size_t k) {
    const std::size_t s = k / per_strategy;
    const std::size_t f = (k % per_strategy) / order.size();
    const Episode& episode = episodes[order[k % order.size()]];
    SweepCell& cell = table.cells[k];
    cell.strategy = strategies[s].name;
    cell.fraction = fractions[f];
    cell.period_id = episode.period_id;
    cell.report = strategies[s].run(episode, fractions[f].apply(episode.actual_cost()));
  });
  return table;
}

LostClicks attribute_lost_clicks(const Episode& episode, std::span<const BidRecord> trace) {
  if (trace.size() != episode.impressions.size()) {
    throw InvalidSpecError("attribute_lost_clicks: trace length differs from episode");
  }
  LostClicks lost;
  for (std::size_t i = 0; i < trace.size(); ++i) {
    const Impression& imp = episode.impressions[i];
    if (imp.click == 0 || trace[i].outcome == Outcome::kWon) continue;
    if (trace[i].bid >= imp.market_price) {
      ++lost.early_stop;
    } else {
      ++lost.underbid;
    }
  }
  return lost;
}

double LogisticModel::score(const Eigen::Ref<const Eigen::VectorXd>& x) const {
  return sigmoid(weights.dot(x) + bias);
}

Eigen::VectorXd LogisticModel::score_all(const Eigen::Ref<const Eigen::MatrixXd>& rows) const {
  Eigen::VectorXd z = rows * weights;
  z.array() += bias;
  return z.unaryExpr([](double v) { return sigmoid(v); });
}

double auc(std::span<const double> scores, std::span<const int> labels) {
  if (scores.size() != labels.size()) throw InvalidSpecError("auc: scores and labels differ in length");
  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });
  double positive_rank_sum = 0.0;
  std::int64_t positives = 0;
  for (std::size_t i = 0; i < order.size();) {
    std::size_t j = i;
    while (j < order.size() && scores[order[j]] == scores[order[i]]) ++j;
    const double mid_rank = 0.5 * static_cast<double>(i + 1 + j);  // ranks i+1..j
    for (std::size_t k = i; k < j; ++k) {
      if (labels[order[k]] != 0) {
        positive_rank_sum += mid_rank;
        ++positives;
      }
    }
    i = j;
  }
  const auto negatives = static_cast<std::int64_t>(scores.size()) - positives;
  if (positives == 0 || negatives == 0) throw DataError("auc: need both positive and negative labels");
  const double p = static_cast<double>(positives);
  return (positive_rank_sum - p * (p + 1.0) / 2.0) / (p * static_cast<double>(negatives));
}

CtrTrainResult train_ctr(const Eigen::Ref<const Eigen::MatrixXd>& features, std::span<const int> labels,
                         const CtrTrainConfig& config) {
  const auto n = static_cast<std::size_t>(features.rows());
  if (labels.size() != n) throw InvalidSpecError("train_ctr: feature rows and labels differ");
  if (!(config.holdout_fraction >= 0.0 && config.holdout_fraction < 1.0)) {
    throw InvalidSpecError("train_ctr: holdout fraction must be in [0, 1)");
  }
  if (config.iterations < 0 || !(config.learning_rate > 0.0) || config.l2 < 0.0) {
    throw InvalidSpecError("train_ctr: invalid optimizer settings");
  }
  const auto holdout = static_cast<std::size_t>(std::floor(config.holdout_fraction * static_cast<double>(n)));
  const std::size_t train_n = n - holdout;
  if (train_n == 0) throw EmptyInputError("train_ctr: no training rows");

  const auto rows = features.topRows(static_cast<Eigen::Index>(train_n));
  Eigen::VectorXd y(static_cast<Eigen::Index>(train_n));
  for (std::size_t i = 0; i < train_n; ++i) y[static_cast<Eigen::Index>(i)] = labels[i] != 0 ? 1.0 : 0.0;

  CtrTrainResult result;
  result.train_rows = train_n;
  result.holdout_rows = holdout;
  LogisticModel& m = result.model;
  m.weights = Eigen::VectorXd::Zero(features.cols());
  const double base_rate = std::clamp(y.mean(), 1e-6, 1.0 - 1e-6);
  m.bias = std::log(base_rate / (1.0 - base_rate));
  const double inv_n = 1.0 / static_cast<double>(train_n);
  for (int it = 0; it < config.iterations; ++it) {
    const Eigen::VectorXd err = m.score_all(rows) - y;
    const Eigen::VectorXd grad_w = rows.transpose() * err * inv_n + config.l2 * m.weights;
    m.weights -= config.learning_rate * grad_w;
    m.bias -= config.learning_rate * err.sum() * inv_n;
  }

  const std::size_t eval_from = holdout > 0 ? train_n : 0;
  const auto eval_rows = features.bottomRows(static_cast<Eigen::Index>(n - eval_from));
  const Eigen::VectorXd scores = m.score_all(eval_rows);
  try {
    result.auc = auc(std::span<const double>(scores.data(), static_cast<std::size_t>(scores.size())),
                     labels.subspan(eval_from));
  } catch (const DataError&) {
    result.auc = std::numeric_limits<double>::quiet_NaN();
  }
  return result;
}

void populate_pctr(std::vector<Episode>& episodes, const Eigen::Ref<const Eigen::MatrixXd>& features,
                   const LogisticModel& model) {
  std::size_t total = 0;
  for (const auto& e : episodes) total += e.impressions.size();
  if (static_cast<std::size_t>(features.rows()) != total) {
    throw InvalidSpecError("populate_pctr: feature rows do not match impressions");
  }
  const Eigen::VectorXd scores = model.score_all(features);
  Eigen::Index row = 0;
  for (auto& e : episodes) {
    for (auto& imp : e.impressions) imp.pctr = scores[row++];
  }
}

SacTrainResult train_sac(std::span<const Episode> train, const LinParams& lin, const BudgetMap& budgets,
                         const SacProtocol& protocol, const ReplayOptions& options) {
  if (train.empty()) throw InvalidSpecError("train_sac: no training episodes");
  if (protocol.epochs < 0) throw ConfigError("epochs must be non-negative");
  lin.validate();
  ReplayOptions opts = options;
  if (!(opts.default_avg_pctr > 0.0)) opts.default_avg_pctr = lin.avg_pctr;

  SacTrainResult result{sac::SacAgent(protocol.sac, 1.0 / lin.avg_pctr, protocol.seed), {}};
  sac::SacAgent& agent = result.agent;
  LearningHooks hooks;
  double reward_sum = 0.0;
  hooks.on_transition = [&](const Transition& t) {
    reward_sum += t.reward;
    agent.observe(t);
  };
  auto policy = [&](const BidState& s) { return agent.act(s); };

  for (int epoch = 1; epoch <= protocol.epochs; ++epoch) {
    EpochLog log;
    log.epoch = epoch;
    reward_sum = 0.0;
    const std::size_t history_before = agent.train_history().size();
    for (const auto& episode : train) {
      const auto it = budgets.find(episode.period_id);
      if (it == budgets.end()) throw InvalidSpecError("no budget for period " + episode.period_id);
      log.clicks += replay_learning(episode, policy, lin, it->second, opts, hooks).clicks_won;
    }
    log.reward_sum = reward_sum;
    for (std::size_t i = history_before; i < agent.train_history().size(); ++i) {
      if (!agent.train_history()[i].skipped) ++log.trainings;
    }
    result.epochs.push_back(log);
  }
  return result;
}

ReportFormat parse_report_format(const std::string& name) {
  if (name == "csv") return ReportFormat::kCsv;
  if (name == "json") return ReportFormat::kJson;
  if (name == "markdown" || name == "md") return ReportFormat::kMarkdown;
  throw ConfigError("unknown report format '" + name + "'");
}

namespace {

std::string cpm_text(const EpisodeReport& r) {
  const auto cpm = r.avg_market_price_won();
  return cpm ? format_double(*cpm) : std::string();
}

std::string emit_csv(const ComparisonTable& table) {
  std::string out =
      "strategy,fraction,period_id,clicks,pctr_sum,imps_won,cost,budget,cost_ratio,cpm_won,lost_early_stop,"
      "lost_underbid\n";
  for (const auto& c : table.cells) {
    const EpisodeReport& r = c.report;
    out += c.strategy + "," + c.fraction.label() + "," + c.period_id + "," + std::to_string(r.clicks_won) + "," +
           format_double(r.pctr_sum_won) + "," + std::to_string(r.imps_won) + "," + std::to_string(r.cost) + "," +
           std::to_string(r.budget) + "," + format_double(r.cost_ratio()) + "," + cpm_text(r) + "," +
           std::to_string(r.lost_clicks_early_stop) + "," + std::to_string(r.lost_clicks_underbid) + "\n";
  }
  return out;
}

nlohmann::ordered_json report_json(const EpisodeReport& r) {
  nlohmann::ordered_json j;
  j["clicks"] = r.clicks_won;
  j["pctr_sum"] = r.pctr_sum_won;
  j["imps_won"] = r.imps_won;
  j["cost"] = r.cost;
  j["budget"] = r.budget;
  j["cost_ratio"] = r.cost_ratio();
  const auto cpm = r.avg_market_price_won();
  j["cpm_won"] = cpm ? nlohmann::ordered_json(*cpm) : nlohmann::ordered_json(nullptr);
  j["lost_early_stop"] = r.lost_clicks_early_stop;
  j["lost_underbid"] = r.lost_clicks_underbid;
  j["impressions"] = r.impressions;
  j["total_clicks"] = r.total_clicks;
  return j;
}

std::string emit_json(const ComparisonTable& table) {
  nlohmann::ordered_json doc;
  doc["strategies"] = table.strategies;
  std::vector<std::string> labels;
  for (const auto& f : table.fractions) labels.push_back(f.label());
  doc["fractions"] = labels;
  doc["periods"] = table.periods;
  auto cells = nlohmann::ordered_json::array();
  for (const auto& c : table.cells) {
    nlohmann::ordered_json j;
    j["strategy"] = c.strategy;
    j["fraction"] = c.fraction.label();
    j["period_id"] = c.period_id;
    j["report"] = report_json(c.report);
    cells.push_back(std::move(j));
  }
  doc["cells"] = std::move(cells);
  auto totals = nlohmann::ordered_json::array();
  for (const auto& s : table.strategies) {
    for (const auto& f : table.fractions) {
      nlohmann::ordered_json j;
      j["strategy"] = s;
      j["fraction"] = f.label();
      j["report"] = report_json(table.total(s, f));
      totals.push_back(std::move(j));
    }
  }
  doc["totals"] = std::move(totals);
  return doc.dump(2) + "\n";
}

std::string emit_markdown(const ComparisonTable& table) {
  struct Metric {
    const char* title;
    std::function<std::string(const EpisodeReport&)> cell;
  };
  const std::vector<Metric> metrics = {
      {"Clicks", [](const EpisodeReport& r) { return std::to_string(r.clicks_won); }},
      {"pCTR sum", [](const EpisodeReport& r) { return format_double(r.pctr_sum_won, "%.4f"); }},
      {"Impressions won", [](const EpisodeReport& r) { return std::to_string(r.imps_won); }},
      {"Average market price of won impressions",
       [](const EpisodeReport& r) {
         const auto cpm = r.avg_market_price_won();
         return cpm ? format_double(*cpm, "%.4f") : std::string("-");
       }},
      {"Cost ratio", [](const EpisodeReport& r) { return format_double(r.cost_ratio(), "%.4f"); }},
      {"Lost clicks (early stop)", [](const EpisodeReport& r) { return std::to_string(r.lost_clicks_early_stop); }},
      {"Lost clicks (underbid)", [](const EpisodeReport& r) { return std::to_string(r.lost_clicks_underbid); }},
  };
  std::string out = "# Budget sweep\n\nPeriods: ";
  for (std::size_t i = 0; i < table.periods.size(); ++i) out += (i ? ", " : "") + table.periods[i];
  out += "\n";
  for (const auto& metric : metrics) {
    out += "\n## " + std::string(metric.title) + "\n\n| Strategy |";
    for (const auto& f : table.fractions) out += " " + f.label() + " |";
    out += "\n|---|";
    for (std::size_t i = 0; i < table.fractions.size(); ++i) out += "---:|";
    out += "\n";
    for (const auto& s : table.strategies) {
      out += "| " + s + " |";
      for (const auto& f : table.fractions) out += " " + metric.cell(table.total(s, f)) + " |";
      out += "\n";
    }
  }
  return out;
}

}  // namespace

std::string emit_report(const ComparisonTable& table, ReportFormat format) {
  switch (format) {
    case ReportFormat::kCsv:
      return emit_csv(table);
    case ReportFormat::kJson:
      return emit_json(table);
    case ReportFormat::kMarkdown:
      return emit_markdown(table);
  }
  throw std::logic_error("emit_report: bad format");
}

}  // namespace rtblab
