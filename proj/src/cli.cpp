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

#include "rtblab/cli.hpp"

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <map>
#include <ostream>
#include <sstream>

#include "rtblab/calibrate.hpp"
#include "rtblab/evalkit.hpp"
#include "rtblab/io.hpp"
#include "rtblab/logstore.hpp"
#include "rtblab/sac/checkpoint.hpp"
#include "rtblab/types.hpp"

namespace rtblab::cli {
namespace {

using nlohmann::json;

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> out;
  std::stringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) {
    item.erase(0, item.find_first_not_of(" \t"));
    item.erase(item.find_last_not_of(" \t") + 1);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

std::vector<double> parse_doubles(const std::string& text, const char* key) {
  std::vector<double> out;
  for (const auto& item : split_list(text)) {
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(item, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != item.size()) throw ConfigError(std::string(key) + ": not a number: '" + item + "'");
    out.push_back(v);
  }
  return out;
}

void require_path(const std::string& value, const char* key) {
  if (value.empty()) throw ConfigError(std::string("missing required key '") + key + "'");
}

std::vector<Episode> load_archive(const std::string& path) {
  return ingest_log(path, LogFormat::kNativeCsv);
}

std::string archive_text(const std::vector<Episode>& episodes) {
  std::ostringstream out;
  write_native_csv(out, episodes);
  return out.str();
}

json load_json(const std::string& path) {
  try {
    return json::parse(read_file(path));
  } catch (const json::exception& e) {
    throw DataError(path + ": " + e.what());
  }
}

ReplayOptions replay_options(const RunConfig& c) {
  ReplayOptions o;
  o.bounds = {c.price_min, c.price_max};
  o.bounds.validate();
  o.reward.normalize_avbudget = c.normalize_avbudget;
  return o;
}

sac::SacConfig sac_config(const RunConfig& c) {
  auto positive = [](std::int64_t v, const char* key) {
    if (v <= 0) throw ConfigError(std::string(key) + " must be positive");
    return static_cast<std::size_t>(v);
  };
  sac::SacConfig s;
  s.hidden = {static_cast<int>(positive(c.hidden, "hidden")), static_cast<int>(c.hidden)};
  s.gamma = c.gamma;
  s.tau = c.tau;
  s.buffer_capacity = positive(c.buffer_size, "buffer-size");
  s.batch_size = positive(c.batch_size, "batch-size");
  s.train_every = positive(c.train_every, "train-every");
  s.rounds = positive(c.rounds, "rounds");
  s.target_every = positive(c.target_every, "target-every");
  s.lr_critic = c.lr_critic;
  s.lr_actor = c.lr_actor;
  s.lr_alpha = c.lr_alpha;
  s.init_log_alpha = c.init_log_alpha;
  s.entropy_target = c.entropy_target;
  s.reward_scale = c.reward_scale;
  s.validate();
  return s;
}

// Calibration document: {"avg_pctr": x, "fractions": {"1/4": {"lin": ..., "ortb": ...}}}.
struct FractionParams {
  LinParams lin;
  std::optional<OrtbParams> ortb;
};

FractionParams params_for(const json& doc, const Fraction& f) {
  try {
    const json& entry = doc.at("fractions").at(f.label());
    FractionParams p;
    p.lin = lin_params_from_json(entry.at("lin"));
    if (entry.contains("ortb")) p.ortb = ortb_params_from_json(entry.at("ortb"));
    return p;
  } catch (const json::exception& e) {
    throw DataError("calibration has no usable entry for fraction " + f.label() + ": " + e.what());
  } catch (const InvalidSpecError& e) {
    throw DataError(std::string("calibration: ") + e.what());
  }
}

int cmd_ingest(const RunConfig& c, std::ostream& out) {
  require_path(c.input, "input");
  require_path(c.output, "output");
  const auto episodes = ingest_log(c.input, parse_log_format(c.format));
  const std::string text = archive_text(episodes);
  write_file_atomic(c.output, text);
  std::int64_t imps = 0;
  for (const auto& e : episodes) imps += static_cast<std::int64_t>(e.impressions.size());
  out << "ingested " << episodes.size() << " periods, " << imps << " impressions -> " << c.output << "\n";
  return kExitOk;
}

int cmd_synth(const RunConfig& c, std::ostream& out) {
  require_path(c.output, "output");
  SynthSpec spec;
  spec.imps = c.imps;
  spec.periods = c.periods;
  spec.logit_mean = c.logit_mean;
  spec.logit_std = c.logit_std;
  spec.period_logit_shift = parse_doubles(c.period_logit_shift, "period-logit-shift");
  spec.feature_dims = c.feature_dims;
  spec.feature_share = c.feature_share;
  spec.price_scale = c.price_scale;
  spec.price_elasticity = c.price_elasticity;
  spec.price_noise = c.price_noise;
  spec.period_price_factor = parse_doubles(c.period_price_factor, "period-price-factor");
  spec.price_floor = std::max<Currency>(1, c.price_min);
  spec.price_cap = c.price_max;
  spec.premium_pctr = c.premium_pctr;
  spec.premium_factor = c.premium_factor;
  spec.premium_base_bid = c.premium_base_bid;
  spec.premium_noise = c.premium_noise;
  try {
    spec.validate();
  } catch (const InvalidSpecError& e) {
    throw ConfigError(e.what());
  }
  SynthLog log = synth_log_with_features(spec, c.seed);
  if (c.fit_ctr) {
    std::vector<int> labels;
    for (const auto& e : log.episodes) {
      for (const auto& imp : e.impressions) labels.push_back(imp.click);
    }
    const CtrTrainResult fit = train_ctr(log.features, labels);
    populate_pctr(log.episodes, log.features, fit.model);
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.4f", fit.auc);
    out << "ctr model held-out auc " << buf << "\n";
  }
  write_file_atomic(c.output, archive_text(log.episodes));
  out << "synthesized " << log.episodes.size() << " periods, " << c.imps << " impressions -> " << c.output << "\n";
  return kExitOk;
}

int cmd_calibrate(const RunConfig& c, std::ostream& out) {
  require_path(c.train, "train");
  require_path(c.calibration, "calibration");
  const auto train = load_archive(c.train);
  const ReplayOptions options = replay_options(c);
  std::vector<Fraction> fractions = parse_fractions(c.fractions);
  const Fraction train_fraction = parse_fraction(c.train_fraction);
  if (std::find(fractions.begin(), fractions.end(), train_fraction) == fractions.end()) {
    fractions.push_back(train_fraction);
  }
  const OrtbGrid grid = OrtbGrid::defaults();
  json doc;
  doc["avg_pctr"] = stats(train).avg_pctr;
  doc["fractions"] = json::object();
  for (const auto& f : fractions) {
    const BudgetMap budgets = budgets_for_fraction(train, f.num, f.den);
    const LinCalibration lin = calibrate_lin(train, budgets, options);
    const OrtbCalibration ortb = calibrate_ortb(train, budgets, grid, options);
    doc["fractions"][f.label()] = {{"lin", to_json(lin)}, {"ortb", to_json(ortb, grid)}};
    out << "fraction " << f.label() << ": base_bid " << lin.params.base_bid << " (" << lin.clicks[static_cast<std::size_t>(lin.params.base_bid - kMinBaseBid)]
        << " clicks), ortb c " << ortb.params.c << " lambda " << ortb.params.lambda << " (" << ortb.clicks
        << " clicks)\n";
  }
  write_file_atomic(c.calibration, doc.dump(1) + "\n");
  return kExitOk;
}

json round_stats_json(const sac::RoundStats& r) {
  return {{"loss_q1", r.loss_q1}, {"loss_q2", r.loss_q2}, {"loss_actor", r.loss_actor},
          {"alpha", r.alpha},     {"entropy", r.entropy}};
}

int cmd_train(const RunConfig& c, std::ostream& out) {
  require_path(c.train, "train");
  require_path(c.calibration, "calibration");
  require_path(c.checkpoint, "checkpoint");
  const sac::SacConfig sac = sac_config(c);
  if (c.epochs < 0) throw ConfigError("epochs must be non-negative");
  const auto train = load_archive(c.train);
  const Fraction f = parse_fraction(c.train_fraction);
  const FractionParams params = params_for(load_json(c.calibration), f);
  const BudgetMap budgets = budgets_for_fraction(train, f.num, f.den);

  SacProtocol protocol;
  protocol.epochs = c.epochs;
  protocol.sac = sac;
  protocol.seed = c.seed;
  ReplayOptions options = replay_options(c);
  options.default_avg_pctr = params.lin.avg_pctr;
  const SacTrainResult result = train_sac(train, params.lin, budgets, protocol, options);

  json log;
  log["seed"] = c.seed;
  log["train_fraction"] = f.label();
  log["epochs"] = json::array();
  for (const auto& e : result.epochs) {
    log["epochs"].push_back(
        {{"epoch", e.epoch}, {"clicks", e.clicks}, {"reward_sum", e.reward_sum}, {"trainings", e.trainings}});
    out << "epoch " << e.epoch << ": clicks " << e.clicks << ", trainings " << e.trainings << "\n";
  }
  log["trainings"] = json::array();
  for (const auto& t : result.agent.train_history()) {
    if (t.skipped) {
      log["trainings"].push_back({{"skipped", true}, {"reason", "buffer smaller than batch"}});
    } else {
      log["trainings"].push_back({{"rounds", t.rounds}, {"mean", round_stats_json(t.mean)},
                                  {"last", round_stats_json(t.last)}});
    }
  }
  const std::string checkpoint =
      sac::checkpoint_to_string(result.agent.bundle(), sac::buffer_meta(result.agent.buffer()));
  const std::string log_path = c.log.empty() ? c.checkpoint + ".log.json" : c.log;
  write_file_atomic(c.checkpoint, checkpoint);
  write_file_atomic(log_path, log.dump(1) + "\n");
  out << "checkpoint -> " << c.checkpoint << "\n";
  return kExitOk;
}

StrategyRun drlb_strategy(const RunConfig& c, const LinParams& lin, const ReplayOptions& options) {
  LambdaSchedule base;
  base.lambda0 = c.drlb_lambda0 > 0.0 ? c.drlb_lambda0 : lin.avg_pctr / lin.base_bid;
  base.regulators = parse_doubles(c.drlb_regulators, "drlb-regulators");
  base.validate();
  const std::int64_t slot_size = options.pacing.slot_size;
  return {"drlb", [base, options, slot_size](const Episode& episode, Currency budget) {
            LambdaSchedule schedule = base;
            const auto n = static_cast<std::int64_t>(episode.impressions.size());
            const auto slots = static_cast<std::size_t>(std::max<std::int64_t>(1, (n + slot_size - 1) / slot_size));
            // Slots past the supplied schedule keep the last lambda.
            if (schedule.regulators.size() + 1 < slots) schedule.regulators.resize(slots - 1, 0.0);
            return replay_static(episode, make_scheduled_lambda_bidder(schedule), budget, options);
          }};
}

int cmd_evaluate(const RunConfig& c, std::ostream& out) {
  require_path(c.test, "test");
  require_path(c.calibration, "calibration");
  require_path(c.report_dir, "report-dir");
  const std::vector<std::string> names = split_list(c.strategies);
  if (names.empty()) throw ConfigError("no strategies selected");
  std::vector<ReportFormat> formats;
  for (const auto& f : split_list(c.formats)) formats.push_back(parse_report_format(f));
  if (formats.empty()) throw ConfigError("no report formats selected");
  const std::vector<Fraction> fractions = parse_fractions(c.fractions);
  const bool wants_sac = std::find(names.begin(), names.end(), "sac") != names.end();
  for (const auto& name : names) {
    static const std::vector<std::string> known = {"lin", "ortb", "fixed", "drlb", "zero-action", "sac"};
    if (std::find(known.begin(), known.end(), name) == known.end()) {
      throw ConfigError("unknown strategy '" + name + "'");
    }
  }
  if (wants_sac) require_path(c.checkpoint, "checkpoint");

  const auto test = load_archive(c.test);
  const json calibration = load_json(c.calibration);
  std::optional<sac::Checkpoint> checkpoint;
  if (wants_sac) checkpoint = sac::load_checkpoint(c.checkpoint);
  const ReplayOptions base_options = replay_options(c);

  ComparisonTable merged;
  merged.strategies = names;
  merged.fractions = fractions;
  for (const auto& f : fractions) {
    const FractionParams params = params_for(calibration, f);
    ReplayOptions options = base_options;
    options.default_avg_pctr = params.lin.avg_pctr;
    std::vector<StrategyRun> runs;
    for (const auto& name : names) {
      if (name == "lin") {
        runs.push_back(static_strategy(name, make_lin_bidder(params.lin), options));
      } else if (name == "ortb") {
        if (!params.ortb) throw DataError("calibration lacks ortb parameters for " + f.label());
        runs.push_back(static_strategy(name, make_ortb_bidder(*params.ortb), options));
      } else if (name == "fixed") {
        runs.push_back(static_strategy(name, make_fixed_price_bidder(c.fixed_price), options));
      } else if (name == "drlb") {
        runs.push_back(drlb_strategy(c, params.lin, options));
      } else if (name == "zero-action") {
        runs.push_back(fixed_action_strategy(name, params.lin, 0.0, options));
      } else {
        runs.push_back(greedy_sac_strategy(name, checkpoint->bundle, params.lin, options));
      }
    }
    const std::vector<Fraction> one{f};
    ComparisonTable part = budget_sweep(test, runs, one);
    merged.periods = part.periods;
    merged.cells.insert(merged.cells.end(), part.cells.begin(), part.cells.end());
  }
  // Order cells by (strategy, fraction, period) regardless of the loop above.
  auto rank = [&](const SweepCell& cell) {
    const auto s = std::find(names.begin(), names.end(), cell.strategy) - names.begin();
    const auto fr = std::find(fractions.begin(), fractions.end(), cell.fraction) - fractions.begin();
    return std::make_tuple(s, fr, cell.period_id);
  };
  std::stable_sort(merged.cells.begin(), merged.cells.end(),
                   [&](const SweepCell& a, const SweepCell& b) { return rank(a) < rank(b); });

  std::vector<std::pair<std::string, std::string>> files;
  for (const auto format : formats) {
    const char* name = format == ReportFormat::kCsv ? "report.csv" : format == ReportFormat::kJson ? "report.json" : "report.md";
    files.emplace_back((std::filesystem::path(c.report_dir) / name).string(), emit_report(merged, format));
  }
  for (const auto& [path, text] : files) {
    write_file_atomic(path, text);
    out << "report -> " << path << "\n";
  }
  for (const auto& f : fractions) {
    for (const auto& s : names) {
      out << s << " @ " << f.label() << ": " << merged.total(s, f).clicks_won << " clicks\n";
    }
  }
  return kExitOk;
}

void add_options(CLI::App& app, RunConfig& c) {
  auto group = [&](const char* name) { return app.option_defaults()->group(name); };

  group("Paths");
  app.add_option("--input", c.input, "raw log to ingest");
  app.add_option("--format", c.format, "raw log format: native-csv or ipinyou-tsv")->capture_default_str();
  app.add_option("--output", c.output, "archive written by ingest/synth");
  app.add_option("--train", c.train, "training archive");
  app.add_option("--test", c.test, "evaluation archive");
  app.add_option("--calibration", c.calibration, "calibration JSON (written by calibrate)");
  app.add_option("--checkpoint", c.checkpoint, "SAC checkpoint (written by train)");
  app.add_option("--log", c.log, "training log (default: <checkpoint>.log.json)");
  app.add_option("--report-dir", c.report_dir, "directory for report files");

  group("Run");
  app.add_option("--seed", c.seed, "random seed (required by train and evaluate)")->capture_default_str();
  app.add_option("--fractions", c.fractions, "budget fractions of actual cost")->capture_default_str();
  app.add_option("--train-fraction", c.train_fraction, "budget fraction used while training")->capture_default_str();
  app.add_option("--price-min", c.price_min, "lowest allowed bid")->capture_default_str();
  app.add_option("--price-max", c.price_max, "highest allowed bid")->capture_default_str();
  app.add_option("--normalize-avbudget", c.normalize_avbudget, "divide remaining budget by slot budget in the both-win reward")
      ->capture_default_str();
  app.add_option("--strategies", c.strategies, "strategies to evaluate")->capture_default_str();
  app.add_option("--fixed-price", c.fixed_price, "bid of the fixed-price strategy")->capture_default_str();
  app.add_option("--drlb-lambda0", c.drlb_lambda0, "initial lambda of the scheduled strategy (0: from LIN)")
      ->capture_default_str();
  app.add_option("--drlb-regulators", c.drlb_regulators, "comma-separated per-slot lambda changes");
  app.add_option("--formats", c.formats, "report formats")->capture_default_str();

  group("SAC");
  app.add_option("--epochs", c.epochs, "passes over the training periods")->capture_default_str();
  app.add_option("--gamma", c.gamma, "discount factor")->capture_default_str();
  app.add_option("--tau", c.tau, "target smoothing coefficient")->capture_default_str();
  app.add_option("--buffer-size", c.buffer_size, "replay buffer capacity M")->capture_default_str();
  app.add_option("--batch-size", c.batch_size, "mini-batch size N")->capture_default_str();
  app.add_option("--train-every", c.train_every, "train after every k transitions")->capture_default_str();
  app.add_option("--rounds", c.rounds, "update rounds L per training")->capture_default_str();
  app.add_option("--target-every", c.target_every, "soft-update period d in rounds")->capture_default_str();
  app.add_option("--hidden", c.hidden, "neurons in each of the two hidden layers")->capture_default_str();
  app.add_option("--lr-critic", c.lr_critic, "critic learning rate")->capture_default_str();
  app.add_option("--lr-actor", c.lr_actor, "actor learning rate")->capture_default_str();
  app.add_option("--lr-alpha", c.lr_alpha, "temperature learning rate")->capture_default_str();
  app.add_option("--init-log-alpha", c.init_log_alpha, "initial log temperature")->capture_default_str();
  app.add_option("--entropy-target", c.entropy_target, "target entropy")->capture_default_str();
  app.add_option("--reward-scale", c.reward_scale, "multiplier on stored rewards")->capture_default_str();

  group("Synthetic market");
  app.add_option("--imps", c.imps, "impressions in total")->capture_default_str();
  app.add_option("--periods", c.periods, "delivery periods")->capture_default_str();
  app.add_option("--logit-mean", c.logit_mean, "mean pCTR logit")->capture_default_str();
  app.add_option("--logit-std", c.logit_std, "pCTR logit standard deviation")->capture_default_str();
  app.add_option("--period-logit-shift", c.period_logit_shift, "comma-separated logit offsets, cycled over periods");
  app.add_option("--feature-dims", c.feature_dims, "feature columns for the CTR model")->capture_default_str();
  app.add_option("--feature-share", c.feature_share, "share of logit variance carried by features")
      ->capture_default_str();
  app.add_option("--price-scale", c.price_scale, "market price at median pCTR")->capture_default_str();
  app.add_option("--price-elasticity", c.price_elasticity, "exponent linking pCTR to price")->capture_default_str();
  app.add_option("--price-noise", c.price_noise, "log-normal price noise")->capture_default_str();
  app.add_option("--period-price-factor", c.period_price_factor, "comma-separated price multipliers, cycled over periods");
  app.add_option("--premium-pctr", c.premium_pctr, "pCTR above which prices follow the LIN bid (0: off)")
      ->capture_default_str();
  app.add_option("--premium-factor", c.premium_factor, "premium price multiple of the reference LIN bid")
      ->capture_default_str();
  app.add_option("--premium-base-bid", c.premium_base_bid, "base bid of the reference LIN bid")->capture_default_str();
  app.add_option("--premium-noise", c.premium_noise, "premium price noise")->capture_default_str();
  app.add_option("--fit-ctr", c.fit_ctr, "replace pCTR by a fitted logistic model")->capture_default_str();
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  RunConfig config;
  CLI::App app{"Real-time bidding lab: log replay, baselines and SAC bid adjustment"};
  app.name(args.empty() ? "rtblab" : std::filesystem::path(args.front()).filename().string());
  app.set_config("--config", "", "flat key=value file; flags override it");
  app.allow_config_extras(false);
  app.require_subcommand(1, 1);
  app.fallthrough();
  add_options(app, config);

  std::string command;
  const std::map<std::string, std::string> commands = {
      {"ingest", "convert a raw log into an episode archive"},
      {"synth", "generate a synthetic episode archive"},
      {"calibrate", "grid-search LIN and ORTB parameters per budget fraction"},
      {"train", "train the SAC bid adjuster"},
      {"evaluate", "replay strategies over budget fractions and write reports"},
  };
  for (const auto& [name, help] : commands) {
    app.add_subcommand(name, help)->callback([&command, name = name] { command = name; });
  }

  std::vector<std::string> argv(args.begin() + (args.empty() ? 0 : 1), args.end());
  std::reverse(argv.begin(), argv.end());
  try {
    app.parse(argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "config error: " << e.what() << "\n";
    return kExitConfig;
  }

  try {
    if ((command == "train" || command == "evaluate") && app.get_option("--seed")->count() == 0) {
      throw ConfigError("--seed is required for " + command);
    }
    if (command == "ingest") return cmd_ingest(config, out);
    if (command == "synth") return cmd_synth(config, out);
    if (command == "calibrate") return cmd_calibrate(config, out);
    if (command == "train") return cmd_train(config, out);
    return cmd_evaluate(config, out);
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const InvalidSpecError& e) {
    err << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const DataError& e) {
    err << "data error: " << e.what() << "\n";
    return kExitData;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitRuntime;
  }
}

}  // namespace rtblab::cli
