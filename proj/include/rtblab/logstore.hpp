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

// Auction-log storage: impressions grouped into delivery periods, loaders for
// the native CSV archive and iPinYou TSV logs, a seeded synthetic generator,
// and dataset summary statistics.

#ifndef RTBLAB_LOGSTORE_HPP_
#define RTBLAB_LOGSTORE_HPP_

#include <Eigen/Dense>

#include <cstdint>
#include <iosfwd>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "rtblab/types.hpp"

namespace rtblab {

// Marks an impression whose pCTR has not been estimated yet.
inline constexpr double kPctrMissing = std::numeric_limits<double>::quiet_NaN();

struct Impression {
  std::int64_t seq = 0;
  double pctr = 0.0;
  Currency market_price = 0;
  int click = 0;
  std::string period_id;

  bool has_pctr() const { return !std::isnan(pctr); }

  friend bool operator==(const Impression&, const Impression&) = default;
};

// One delivery period. Immutable once built; share by const reference.
struct Episode {
  std::string period_id;
  std::vector<Impression> impressions;
  Currency budget = 1;

  // Sum of logged market prices, i.e. what buying every impression cost.
  Currency actual_cost() const;
  std::int64_t total_clicks() const;
};

// Throws DataError naming the first violated Impression/Episode invariant.
void validate(const Impression& imp);
void validate(const Episode& episode);

enum class LogFormat { kIpinyouTsv, kNativeCsv };

LogFormat parse_log_format(const std::string& name);

// Episodes come back sorted by period_id; each episode's budget is set to its
// actual cost. Throws ParseError (with line number) or EmptyInputError.
std::vector<Episode> ingest_log(const std::string& path, LogFormat format);
std::vector<Episode> read_native_csv(std::istream& in);
std::vector<Episode> read_ipinyou_tsv(std::istream& in);

void write_native_csv(std::ostream& out, std::span<const Episode> episodes);

// Synthetic auction market. pCTR is logit-normal; a fraction of the logit
// variance is explained by Gaussian features so a CTR model can be fit.
struct SynthSpec {
  std::int64_t imps = 10000;  // total, split evenly over periods
  int periods = 1;

  double logit_mean = -4.0;
  double logit_std = 0.8;
  // Per-period logit offsets, cycled over periods; empty means none.
  std::vector<double> period_logit_shift;
  int feature_dims = 8;
  double feature_share = 0.7;  // of logit variance carried by the features

  // market = price_scale * (pctr / median_pctr)^price_elasticity * exp(noise)
  double price_scale = 70.0;
  double price_elasticity = 0.6;
  double price_noise = 0.35;
  // Per-period market-price multipliers, cycled over periods.
  std::vector<double> period_price_factor;
  Currency price_floor = 1;
  Currency price_cap = 300;

  // Impressions with pctr >= premium_pctr are repriced to
  // premium_factor * reference LIN bid + N(0, premium_noise), where the
  // reference LIN bid is pctr * premium_base_bid / median_pctr.
  // Disabled when premium_pctr <= 0.
  double premium_pctr = 0.0;
  double premium_factor = 1.3;
  double premium_base_bid = 80.0;
  double premium_noise = 5.0;

  void validate() const;
  double median_pctr() const;
};

struct SynthLog {
  std::vector<Episode> episodes;
  // One row per impression in episode-major order; feature_dims columns.
  Eigen::MatrixXd features;
};

std::vector<Episode> synth_log(const SynthSpec& spec, std::uint64_t seed);
SynthLog synth_log_with_features(const SynthSpec& spec, std::uint64_t seed);

struct DatasetStats {
  std::int64_t imps = 0;
  std::int64_t clicks = 0;
  Currency cost = 0;
  double ctr = 0.0;
  double cpm = 0.0;  // average price per impression, as in the iPinYou tables
  std::optional<double> cpc;  // empty when there are no clicks
  double avg_pctr = 0.0;
};

DatasetStats stats(std::span<const Episode> episodes);

}  // namespace rtblab

#endif  // RTBLAB_LOGSTORE_HPP_
