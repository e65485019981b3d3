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


#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include "rtblab/logstore.hpp"
#include "support/oracles.hpp"

namespace rtblab {
namespace {

std::vector<Episode> parse_csv(const std::string& text) {
  std::istringstream in(text);
  return read_native_csv(in);
}

std::vector<Episode> parse_tsv(const std::string& text) {
  std::istringstream in(text);
  return read_ipinyou_tsv(in);
}

TEST(NativeCsv, OneDayGroupsIntoOneEpisode) {
  const auto episodes = parse_csv(
      "period_id,seq,pctr,market_price,click\n"
      "d1,0,0.001,50,0\n"
      "d1,1,0.002,60,1\n"
      "d1,2,0.003,70,0\n");
  ASSERT_EQ(episodes.size(), 1u);
  EXPECT_EQ(episodes[0].period_id, "d1");
  ASSERT_EQ(episodes[0].impressions.size(), 3u);
  EXPECT_EQ(episodes[0].impressions[1].market_price, 60);
  EXPECT_EQ(episodes[0].impressions[1].click, 1);
  EXPECT_EQ(episodes[0].actual_cost(), 180);
  EXPECT_EQ(episodes[0].budget, 180);
}

TEST(NativeCsv, TwoDaysKeepPerDayOrder) {
  const auto episodes = parse_csv(
      "period_id,seq,pctr,market_price,click\n"
      "d2,5,0.1,1,0\n"
      "d1,3,0.1,2,0\n"
      "d2,1,0.1,3,0\n"
      "d1,7,0.1,4,0\n");
  ASSERT_EQ(episodes.size(), 2u);
  EXPECT_EQ(episodes[0].period_id, "d1");
  EXPECT_EQ(episodes[1].period_id, "d2");
  EXPECT_EQ(episodes[0].impressions[0].seq, 3);
  EXPECT_EQ(episodes[0].impressions[1].seq, 7);
  EXPECT_EQ(episodes[1].impressions[0].seq, 1);
  EXPECT_EQ(episodes[1].impressions[1].seq, 5);
}

TEST(NativeCsv, PctrAboveOneReportsLine) {
  try {
    parse_csv(
        "period_id,seq,pctr,market_price,click\n"
        "d1,0,0.5,50,0\n"
        "d1,1,1.3,50,0\n");
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 3u);
  }
}

TEST(NativeCsv, MalformedRowsAreParseErrors) {
  const std::string header = "period_id,seq,pctr,market_price,click\n";
  EXPECT_THROW(parse_csv(header + "d1,0,0.5,-1,0\n"), ParseError);
  EXPECT_THROW(parse_csv(header + "d1,0,0.5,5,2\n"), ParseError);
  EXPECT_THROW(parse_csv(header + "d1,0,abc,5,0\n"), ParseError);
  EXPECT_THROW(parse_csv(header + "d1,0,0.5,5\n"), ParseError);
  EXPECT_THROW(parse_csv(header + "d1,0,0.5,5,0\nd1,0,0.5,5,0\n"), ParseError);
  EXPECT_THROW(parse_csv("seq,pctr\n"), ParseError);
}

TEST(NativeCsv, EmptyInputIsDistinct) {
  EXPECT_THROW(parse_csv(""), EmptyInputError);
  EXPECT_THROW(parse_csv("period_id,seq,pctr,market_price,click\n"), EmptyInputError);
}

TEST(NativeCsv, MissingPctrSurvivesRoundTrip) {
  const auto episodes = parse_csv("period_id,seq,pctr,market_price,click\nd1,0,,50,1\n");
  EXPECT_FALSE(episodes[0].impressions[0].has_pctr());
  std::ostringstream out;
  write_native_csv(out, episodes);
  const auto again = parse_csv(out.str());
  EXPECT_FALSE(again[0].impressions[0].has_pctr());
}

TEST(IpinyouTsv, GroupsByDateAndKeepsTimestampTiesInInputOrder) {
  const auto episodes = parse_tsv(
      "bidid\ttimestamp\tpayprice\tclick\tpctr\n"
      "a\t20130606000000100\t80\t0\t0.001\n"
      "b\t20130607000000001\t10\t1\t0.002\n"
      "c\t20130606000000050\t70\t0\t0.003\n"
      "d\t20130606000000050\t60\t1\t0.004\n");
  ASSERT_EQ(episodes.size(), 2u);
  EXPECT_EQ(episodes[0].period_id, "2013-06-06");
  ASSERT_EQ(episodes[0].impressions.size(), 3u);
  EXPECT_EQ(episodes[0].impressions[0].market_price, 70);
  EXPECT_EQ(episodes[0].impressions[1].market_price, 60);
  EXPECT_EQ(episodes[0].impressions[2].market_price, 80);
  for (std::size_t i = 0; i < 3; ++i) EXPECT_EQ(episodes[0].impressions[i].seq, static_cast<std::int64_t>(i));
  EXPECT_EQ(episodes[1].impressions[0].click, 1);
}

TEST(IpinyouTsv, AbsentPctrColumnYieldsSentinel) {
  const auto episodes = parse_tsv("timestamp\tpayprice\tclick\n20130606000000100\t80\t0\n");
  EXPECT_FALSE(episodes[0].impressions[0].has_pctr());
}

TEST(IpinyouTsv, RejectsPricesAboveLoggedBid) {
  EXPECT_THROW(parse_tsv("timestamp\tpayprice\tclick\n20130606000000100\t301\t0\n"), ParseError);
  EXPECT_THROW(parse_tsv("timestamp\tclick\n20130606000000100\t0\n"), ParseError);
}

TEST(NativeCsv, RoundTripReproducesImpressions) {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<Episode> episodes;
    const int periods = 1 + static_cast<int>(rng() % 4);
    for (int p = 0; p < periods; ++p) {
      episodes.push_back(testing::random_episode(rng, 1 + static_cast<std::int64_t>(rng() % 300),
                                                 "p" + std::to_string(p)));
    }
    std::ostringstream out;
    write_native_csv(out, episodes);
    const auto again = parse_csv(out.str());
    ASSERT_EQ(again.size(), episodes.size());
    for (std::size_t e = 0; e < episodes.size(); ++e) {
      EXPECT_EQ(again[e].impressions, episodes[e].impressions);
      EXPECT_EQ(again[e].budget, episodes[e].budget);
    }
  }
}

TEST(Synth, SameSeedSameBytes) {
  SynthSpec spec;
  spec.imps = 1000;
  spec.periods = 1;
  std::ostringstream a, b;
  write_native_csv(a, synth_log(spec, 7));
  write_native_csv(b, synth_log(spec, 7));
  EXPECT_EQ(a.str(), b.str());
  std::ostringstream c;
  write_native_csv(c, synth_log(spec, 8));
  EXPECT_NE(a.str(), c.str());
}

TEST(Synth, NonPositiveCountsAreInvalid) {
  SynthSpec spec;
  spec.imps = 0;
  EXPECT_THROW(synth_log(spec, 1), InvalidSpecError);
  spec.imps = 10;
  spec.periods = 0;
  EXPECT_THROW(synth_log(spec, 1), InvalidSpecError);
}

// Mean of sigmoid(N(mu, s^2)) by trapezoid quadrature over +-10 s.
double logit_normal_mean(double mu, double s) {
  const int steps = 20000;
  const double lo = mu - 10 * s;
  const double h = 20 * s / steps;
  double sum = 0.0;
  for (int i = 0; i <= steps; ++i) {
    const double x = lo + i * h;
    const double z = (x - mu) / s;
    const double w = (i == 0 || i == steps) ? 0.5 : 1.0;
    sum += w * std::exp(-0.5 * z * z) / (s * std::sqrt(2 * M_PI)) / (1.0 + std::exp(-x));
  }
  return sum * h;
}

TEST(Synth, CtrWithinThreeSigmaOfPctrDistributionMean) {
  SynthSpec spec;
  spec.imps = 200000;
  spec.periods = 2;
  spec.logit_mean = -3.5;
  spec.logit_std = 0.8;
  const double mean = logit_normal_mean(spec.logit_mean, spec.logit_std);
  const auto s = stats(synth_log(spec, 11));
  const double sigma = std::sqrt(mean * (1 - mean) / static_cast<double>(s.imps));
  EXPECT_NEAR(s.ctr, mean, 3 * sigma);
  // The realized mean pctr is a sample mean of the same distribution.
  EXPECT_NEAR(s.avg_pctr, mean, 0.02 * mean);
}

TEST(Synth, RandomSpecsSatisfyImpressionInvariants) {
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int trial = 0; trial < 40; ++trial) {
    SynthSpec spec;
    spec.imps = 1 + static_cast<std::int64_t>(rng() % 5000);
    spec.periods = 1 + static_cast<int>(rng() % std::min<std::int64_t>(spec.imps, 6));
    spec.logit_mean = -6 + 5 * unit(rng);
    spec.logit_std = 2 * unit(rng);
    spec.price_scale = 1 + 150 * unit(rng);
    spec.price_elasticity = 2 * unit(rng);
    spec.price_noise = unit(rng);
    spec.feature_dims = static_cast<int>(rng() % 5);
    spec.premium_pctr = unit(rng) < 0.5 ? 0.0 : 0.1 * unit(rng);
    const auto episodes = synth_log(spec, rng());
    std::int64_t total = 0;
    for (const auto& episode : episodes) {
      EXPECT_NO_THROW(validate(episode));
      for (const auto& imp : episode.impressions) {
        EXPECT_TRUE(imp.has_pctr());
        EXPECT_GE(imp.market_price, spec.price_floor);
        EXPECT_LE(imp.market_price, spec.price_cap);
      }
      total += static_cast<std::int64_t>(episode.impressions.size());
    }
    EXPECT_EQ(total, spec.imps);
  }
}

Episode tiny(const std::string& id, std::vector<std::pair<Currency, int>> rows) {
  Episode e;
  e.period_id = id;
  std::int64_t seq = 0;
  for (auto [price, click] : rows) e.impressions.push_back({seq++, 0.01, price, click, id});
  e.budget = std::max<Currency>(1, e.actual_cost());
  return e;
}

TEST(Stats, Arithmetic) {
  const std::vector<Episode> episodes = {tiny("d", {{40, 1}, {60, 0}})};
  const auto s = stats(episodes);
  EXPECT_EQ(s.imps, 2);
  EXPECT_EQ(s.clicks, 1);
  EXPECT_EQ(s.cost, 100);
  EXPECT_DOUBLE_EQ(s.ctr, 0.5);
  EXPECT_DOUBLE_EQ(s.cpm, 50.0);
  ASSERT_TRUE(s.cpc.has_value());
  EXPECT_DOUBLE_EQ(*s.cpc, 100.0);
}

TEST(Stats, AllClicksMakeCpcEqualCpm) {
  const std::vector<Episode> episodes = {tiny("d", {{40, 1}, {60, 1}, {11, 1}})};
  const auto s = stats(episodes);
  EXPECT_DOUBLE_EQ(s.ctr, 1.0);
  EXPECT_DOUBLE_EQ(*s.cpc, s.cpm);
}

TEST(Stats, NoClicksLeavesCpcUndefined) {
  const std::vector<Episode> episodes = {tiny("d", {{40, 0}})};
  EXPECT_FALSE(stats(episodes).cpc.has_value());
  EXPECT_THROW(stats(std::vector<Episode>{}), EmptyInputError);
}

TEST(Stats, PermutationInvariantAcrossEpisodes) {
  std::mt19937_64 rng(21);
  std::vector<Episode> episodes;
  for (int p = 0; p < 7; ++p) episodes.push_back(testing::random_episode(rng, 100 + p * 37, "p" + std::to_string(p)));
  const auto reference = stats(episodes);
  for (int trial = 0; trial < 20; ++trial) {
    std::shuffle(episodes.begin(), episodes.end(), rng);
    const auto s = stats(episodes);
    EXPECT_EQ(s.imps, reference.imps);
    EXPECT_EQ(s.clicks, reference.clicks);
    EXPECT_EQ(s.cost, reference.cost);
    EXPECT_EQ(s.avg_pctr, reference.avg_pctr);
    EXPECT_EQ(s.ctr, reference.ctr);
  }
}

}  // namespace
}  // namespace rtblab
