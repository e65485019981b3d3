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

#ifndef RTBLAB_CLI_HPP_
#define RTBLAB_CLI_HPP_

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace rtblab::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitData = 3;
inline constexpr int kExitRuntime = 4;

// Every configurable key. Names double as --flags and as keys of the
// key=value config file.
struct RunConfig {
  // paths
  std::string input;
  std::string format = "native-csv";
  std::string output;
  std::string train;
  std::string test;
  std::string calibration;
  std::string checkpoint;
  std::string log;
  std::string report_dir;

  std::uint64_t seed = 0;

  // budgets and bids
  std::string fractions = "1/2,1/4,1/8,1/16";
  std::string train_fraction = "1/4";
  std::int64_t price_min = 0;
  std::int64_t price_max = 300;
  bool normalize_avbudget = false;

  // SAC
  double gamma = 1.0;
  double tau = 0.0005;
  std::int64_t buffer_size = 1000000;
  std::int64_t batch_size = 256;
  std::int64_t train_every = 30000;
  std::int64_t rounds = 128;
  std::int64_t target_every = 4;
  std::int64_t hidden = 128;
  double lr_critic = 3e-4;
  double lr_actor = 3e-4;
  double lr_alpha = 3e-4;
  double init_log_alpha = 0.0;
  double entropy_target = -1.0;
  double reward_scale = 1.0;
  int epochs = 5;

  // strategies
  std::string strategies = "lin,ortb,fixed,drlb,zero-action,sac";
  std::int64_t fixed_price = 300;
  double drlb_lambda0 = 0.0;  // 0: pctr-to-bid ratio of the calibrated LIN
  std::string drlb_regulators;
  std::string formats = "csv,json,markdown";

  // synthetic market
  std::int64_t imps = 10000;
  int periods = 1;
  double logit_mean = -4.0;
  double logit_std = 0.8;
  double price_scale = 70.0;
  double price_elasticity = 0.6;
  double price_noise = 0.35;
  std::string period_logit_shift;
  std::string period_price_factor;
  double premium_pctr = 0.0;
  double premium_factor = 1.3;
  double premium_base_bid = 80.0;
  double premium_noise = 5.0;
  int feature_dims = 8;
  double feature_share = 0.7;
  bool fit_ctr = false;
};

// Runs one command line (argv[0] is the program name). Never throws; any
// failure is reported on `err` and mapped to an exit code.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace rtblab::cli

#endif  // RTBLAB_CLI_HPP_
