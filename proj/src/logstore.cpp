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

#include "rtblab/logstore.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <random>
#include <string_view>

namespace rtblab {
namespace {

constexpr std::string_view kNativeHeader = "period_id,seq,pctr,market_price,click";
constexpr Currency kIpinyouMaxPrice = 300;

std::vector<std::string_view> split(std::string_view line, char sep) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = line.find(sep, start);
    if (pos == std::string_view::npos) {
      fields.push_back(line.substr(start));
      return fields;
    }
    fields.push_back(line.substr(start, pos - start));
    start = pos + 1;
  }
}

void strip_cr(std::string& line) {
  if (!line.empty() && line.back() == '\r') line.pop_back();
}

std::int64_t parse_int(std::string_view text, std::size_t line, const char* field) {
  std::int64_t value = 0;
  const auto* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (ec != std::errc() || ptr != end) {
    throw ParseError(line, std::string("bad integer for ") + field + ": '" + std::string(text) + "'");
  }
  return value;
}

double parse_real(std::string_view text, std::size_t line, const char* field) {
  // from_chars for double is not available in every libstdc++ we target.
  const std::string owned(text);
  char* end = nullptr;
  const double value = std::strtod(owned.c_str(), &end);
  if (owned.empty() || end != owned.c_str() + owned.size() || !std::isfinite(value)) {
    throw ParseError(line, std::string("bad number for ") + field + ": '" + owned + "'");
  }
  return value;
}

struct RowRef {
  Impression imp;
  std::int64_t order_key = 0;  // timestamp or seq
  std::size_t line = 0;
};

void check_row(const Impression& imp, std::size_t line) {
  if (imp.has_pctr() && (imp.pctr < 0.0 || imp.pctr > 1.0)) {
    throw ParseError(line, "pctr out of [0,1]");
  }
  if (imp.market_price < 0) throw ParseError(line, "negative market_price");
  if (imp.click != 0 && imp.click != 1) throw ParseError(line, "click must be 0 or 1");
  if (imp.period_id.empty()) throw ParseError(line, "empty period_id");
}

// Groups rows by period, orders each period by key then input order.
std::vector<Episode> group_rows(std::vector<RowRef> rows, bool renumber) {
  std::map<std::string, std::vector<RowRef>> by_period;
  for (auto& row : rows) by_period[row.imp.period_id].push_back(std::move(row));

  std::vector<Episode> episodes;
  episodes.reserve(by_period.size());
  for (auto& [period, period_rows] : by_period) {
    std::stable_sort(period_rows.begin(), period_rows.end(),
                     [](const RowRef& a, const RowRef& b) { return a.order_key < b.order_key; });
    Episode episode;
    episode.period_id = period;
    episode.impressions.reserve(period_rows.size());
    for (std::size_t i = 0; i < period_rows.size(); ++i) {
      Impression imp = std::move(period_rows[i].imp);
      if (renumber) {
        imp.seq = static_cast<std::int64_t>(i);
      } else if (i > 0 && imp.seq == episode.impressions.back().seq) {
        throw ParseError(period_rows[i].line, "duplicate seq within period " + period);
      }
      episode.impressions.push_back(std::move(imp));
    }
    episode.budget = std::max<Currency>(1, episode.actual_cost());
    episodes.push_back(std::move(episode));
  }
  return episodes;
}

std::string ipinyou_date(std::string_view timestamp, std::size_t line) {
  if (timestamp.size() < 8 ||
      !std::all_of(timestamp.begin(), timestamp.end(), [](char c) { return c >= '0' && c <= '9'; })) {
    throw ParseError(line, "bad timestamp '" + std::string(timestamp) + "'");
  }
  std::string date;
  date.reserve(10);
  date.append(timestamp.substr(0, 4)).push_back('-');
  date.append(timestamp.substr(4, 2)).push_back('-');
  date.append(timestamp.substr(6, 2));
  return date;
}

double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

}  // namespace

Currency Episode::actual_cost() const {
  Currency total = 0;
  for (const auto& imp : impressions) total += imp.market_price;
  return total;
}

std::int64_t Episode::total_clicks() const {
  std::int64_t total = 0;
  for (const auto& imp : impressions) total += imp.click;
  return total;
}

void validate(const Impression& imp) {
  if (imp.has_pctr() && (imp.pctr < 0.0 || imp.pctr > 1.0)) throw DataError("pctr outside [0,1]");
  if (imp.market_price < 0) throw DataError("negative market price");
  if (imp.click != 0 && imp.click != 1) throw DataError("click label not binary");
}

void validate(const Episode& episode) {
  if (episode.impressions.empty()) throw DataError("episode " + episode.period_id + " is empty");
  if (episode.budget <= 0) throw DataError("episode " + episode.period_id + " has non-positive budget");
  for (std::size_t i = 0; i < episode.impressions.size(); ++i) {
    validate(episode.impressions[i]);
    if (i > 0 && episode.impressions[i].seq <= episode.impressions[i - 1].seq) {
      throw DataError("seq not strictly increasing in " + episode.period_id);
    }
  }
}

LogFormat parse_log_format(const std::string& name) {
  if (name == "native-csv") return LogFormat::kNativeCsv;
  if (name == "ipinyou-tsv") return LogFormat::kIpinyouTsv;
  throw ConfigError("unknown log format '" + name + "' (expected native-csv or ipinyou-tsv)");
}

std::vector<Episode> ingest_log(const std::string& path, LogFormat format) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open " + path);
  return format == LogFormat::kNativeCsv ? read_native_csv(in) : read_ipinyou_tsv(in);
}

std::vector<Episode> read_native_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw EmptyInputError("empty native-csv input");
  strip_cr(line);
  if (line.size() >= 3 && line.compare(0, 3, "\xEF\xBB\xBF") == 0) line.erase(0, 3);
  if (line != kNativeHeader) {
    throw ParseError(1, "expected header '" + std::string(kNativeHeader) + "'");
  }

  std::vector<RowRef> rows;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    strip_cr(line);
    if (line.empty()) continue;
    const auto fields = split(line, ',');
    if (fields.size() != 5) throw ParseError(line_no, "expected 5 fields");
    RowRef row;
    row.line = line_no;
    row.imp.period_id = std::string(fields[0]);
    row.imp.seq = parse_int(fields[1], line_no, "seq");
    row.imp.pctr = fields[2].empty() ? kPctrMissing : parse_real(fields[2], line_no, "pctr");
    row.imp.market_price = parse_int(fields[3], line_no, "market_price");
    row.imp.click = static_cast<int>(parse_int(fields[4], line_no, "click"));
    check_row(row.imp, line_no);
    row.order_key = row.imp.seq;
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw EmptyInputError("native-csv input has no rows");
  return group_rows(std::move(rows), /*renumber=*/false);
}

std::vector<Episode> read_ipinyou_tsv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw EmptyInputError("empty ipinyou-tsv input");
  strip_cr(line);
  const auto header = split(line, '\t');
  auto column = [&](std::string_view name) -> std::optional<std::size_t> {
    for (std::size_t i = 0; i < header.size(); ++i) {
      if (header[i] == name) return i;
    }
    return std::nullopt;
  };
  const auto ts_col = column("timestamp");
  const auto price_col = column("payprice");
  const auto click_col = column("click");
  const auto pctr_col = column("pctr");
  if (!ts_col || !price_col || !click_col) {
    throw ParseError(1, "ipinyou-tsv header must name timestamp, payprice and click columns");
  }
  const std::size_t needed = std::max({*ts_col, *price_col, *click_col, pctr_col.value_or(0)}) + 1;

  std::vector<RowRef> rows;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    strip_cr(line);
    if (line.empty()) continue;
    const auto fields = split(line, '\t');
    if (fields.size() < needed) throw ParseError(line_no, "too few columns");
    RowRef row;
    row.line = line_no;
    const std::string_view ts = fields[*ts_col];
    row.imp.period_id = ipinyou_date(ts, line_no);
    row.order_key = parse_int(ts, line_no, "timestamp");
    row.imp.market_price = parse_int(fields[*price_col], line_no, "payprice");
    row.imp.click = static_cast<int>(parse_int(fields[*click_col], line_no, "click"));
    row.imp.pctr = pctr_col ? parse_real(fields[*pctr_col], line_no, "pctr") : kPctrMissing;
    check_row(row.imp, line_no);
    if (row.imp.market_price > kIpinyouMaxPrice) {
      throw ParseError(line_no, "payprice above the logged 300 bid");
    }
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw EmptyInputError("ipinyou-tsv input has no rows");
  return group_rows(std::move(rows), /*renumber=*/true);
}

void write_native_csv(std::ostream& out, std::span<const Episode> episodes) {
  out << kNativeHeader << '\n';
  char pctr_buf[32];
  for (const auto& episode : episodes) {
    for (const auto& imp : episode.impressions) {
      out << episode.period_id << ',' << imp.seq << ',';
      if (imp.has_pctr()) {
        std::snprintf(pctr_buf, sizeof(pctr_buf), "%.17g", imp.pctr);
        out << pctr_buf;
      }
      out << ',' << imp.market_price << ',' << imp.click << '\n';
    }
  }
}

void SynthSpec::validate() const {
  if (imps <= 0) throw InvalidSpecError("synth: imps must be positive");
  if (periods <= 0) throw InvalidSpecError("synth: periods must be positive");
  if (imps < periods) throw InvalidSpecError("synth: fewer impressions than periods");
  if (!(logit_std >= 0.0)) throw InvalidSpecError("synth: logit_std must be non-negative");
  if (feature_dims < 0) throw InvalidSpecError("synth: feature_dims must be non-negative");
  if (!(feature_share >= 0.0 && feature_share <= 1.0)) {
    throw InvalidSpecError("synth: feature_share must lie in [0,1]");
  }
  if (!(price_scale > 0.0)) throw InvalidSpecError("synth: price_scale must be positive");
  if (!(price_noise >= 0.0) || !(premium_noise >= 0.0)) {
    throw InvalidSpecError("synth: noise levels must be non-negative");
  }
  if (price_floor < 0 || price_cap < price_floor) throw InvalidSpecError("synth: bad price range");
  for (double f : period_price_factor) {
    if (!(f > 0.0)) throw InvalidSpecError("synth: period price factors must be positive");
  }
  if (premium_pctr > 0.0 && !(premium_factor > 0.0 && premium_base_bid > 0.0)) {
    throw InvalidSpecError("synth: premium pricing needs positive factor and base bid");
  }
}

double SynthSpec::median_pctr() const { return sigmoid(logit_mean); }

SynthLog synth_log_with_features(const SynthSpec& spec, std::uint64_t seed) {
  spec.validate();
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_real_distribution<double> uniform(0.0, 1.0);

  const int dims = spec.feature_dims;
  const double share = dims > 0 ? spec.feature_share : 0.0;
  const double feature_weight = dims > 0 ? spec.logit_std * std::sqrt(share / dims) : 0.0;
  const double residual_std = spec.logit_std * std::sqrt(1.0 - share);
  const double median = spec.median_pctr();

  SynthLog log;
  log.features.resize(spec.imps, dims);
  log.episodes.reserve(spec.periods);

  std::int64_t row = 0;
  const std::int64_t base_count = spec.imps / spec.periods;
  const std::int64_t remainder = spec.imps % spec.periods;
  for (int p = 0; p < spec.periods; ++p) {
    char period_id[16];
    std::snprintf(period_id, sizeof(period_id), "day%03d", p + 1);
    const double shift = spec.period_logit_shift.empty()
                             ? 0.0
                             : spec.period_logit_shift[p % spec.period_logit_shift.size()];
    const double price_factor = spec.period_price_factor.empty()
                                    ? 1.0
                                    : spec.period_price_factor[p % spec.period_price_factor.size()];

    Episode episode;
    episode.period_id = period_id;
    const std::int64_t count = base_count + (p < remainder ? 1 : 0);
    episode.impressions.reserve(count);
    for (std::int64_t i = 0; i < count; ++i, ++row) {
      double logit = spec.logit_mean + shift;
      for (int j = 0; j < dims; ++j) {
        const double x = normal(rng);
        log.features(row, j) = x;
        logit += feature_weight * x;
      }
      logit += residual_std * normal(rng);
      const double price_z = normal(rng);
      const double premium_z = normal(rng);
      const double click_u = uniform(rng);

      Impression imp;
      imp.seq = i;
      imp.period_id = episode.period_id;
      imp.pctr = sigmoid(logit);
      double price = spec.price_scale * std::pow(imp.pctr / median, spec.price_elasticity) *
                     std::exp(spec.price_noise * price_z) * price_factor;
      if (spec.premium_pctr > 0.0 && imp.pctr >= spec.premium_pctr) {
        const double reference_bid = imp.pctr * spec.premium_base_bid / median;
        price = spec.premium_factor * reference_bid + spec.premium_noise * premium_z;
      }
      imp.market_price = std::clamp(round_half_up(price), spec.price_floor, spec.price_cap);
      imp.click = click_u < imp.pctr ? 1 : 0;
      episode.impressions.push_back(std::move(imp));
    }
    episode.budget = std::max<Currency>(1, episode.actual_cost());
    log.episodes.push_back(std::move(episode));
  }
  return log;
}

std::vector<Episode> synth_log(const SynthSpec& spec, std::uint64_t seed) {
  return synth_log_with_features(spec, seed).episodes;
}

DatasetStats stats(std::span<const Episode> episodes) {
  DatasetStats s;
  // Per-episode partial sums, added in sorted order so the result does not
  // depend on how the episodes were ordered.
  std::vector<double> partial;
  partial.reserve(episodes.size());
  for (const auto& episode : episodes) {
    double episode_sum = 0.0;
    for (const auto& imp : episode.impressions) {
      ++s.imps;
      s.clicks += imp.click;
      s.cost += imp.market_price;
      episode_sum += imp.pctr;
    }
    partial.push_back(episode_sum);
  }
  std::sort(partial.begin(), partial.end());
  double pctr_sum = 0.0;
  for (double v : partial) pctr_sum += v;
  if (s.imps == 0) throw EmptyInputError("stats: no impressions");
  const auto n = static_cast<double>(s.imps);
  s.ctr = static_cast<double>(s.clicks) / n;
  s.cpm = static_cast<double>(s.cost) / n;
  if (s.clicks > 0) s.cpc = static_cast<double>(s.cost) / static_cast<double>(s.clicks);
  s.avg_pctr = pctr_sum / n;
  return s;
}

}  // namespace rtblab
