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

#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

#include "rtblab/cli.hpp"
#include "rtblab/io.hpp"

namespace rtblab::cli {
namespace {

namespace fs = std::filesystem;

const std::string kFixture = std::string(RTBLAB_FIXTURE_DIR) + "/synth_10k.csv";

struct CliRun {
  int code = 0;
  std::string out;
  std::string err;
};

CliRun run(std::vector<std::string> args) {
  args.insert(args.begin(), "rtblab");
  std::ostringstream out, err;
  const int code = run_cli(args, out, err);
  return {code, out.str(), err.str()};
}

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("rtblab_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  std::string path(const std::string& name) const { return (dir_ / name).string(); }

  std::string write_config(const std::string& name, const std::string& body) const {
    std::ofstream(path(name)) << body;
    return path(name);
  }

  // Small SAC settings so the pipeline runs in seconds.
  std::string small_sac_config() const {
    return write_config("sac.conf",
                        "hidden=16\nbatch-size=64\ntrain-every=2000\nrounds=8\nepochs=1\nbuffer-size=20000\n");
  }

  fs::path dir_;
};

TEST_F(CliTest, HelpListsEveryKeyWithDefaults) {
  const CliRun r = run({"--help"});
  EXPECT_EQ(r.code, kExitOk);
  const std::map<std::string, std::string> table5 = {
      {"--gamma", "[1]"},       {"--tau", "[0.0005]"},   {"--buffer-size", "[1000000]"},
      {"--batch-size", "[256]"}, {"--train-every", "[30000]"}, {"--rounds", "[128]"},
      {"--target-every", "[4]"}, {"--hidden", "[128]"},  {"--lr-critic", "[0.0003]"},
  };
  for (const auto& [key, value] : table5) {
    const auto at = r.out.find(key);
    ASSERT_NE(at, std::string::npos) << key;
    EXPECT_NE(r.out.substr(at, 60).find(value), std::string::npos) << key;
  }
  for (const char* key :
       {"--input", "--format", "--output", "--train", "--test", "--calibration", "--checkpoint", "--log",
        "--report-dir", "--seed", "--fractions", "--train-fraction", "--price-min", "--price-max",
        "--normalize-avbudget", "--strategies", "--fixed-price", "--drlb-lambda0", "--drlb-regulators",
        "--formats", "--epochs", "--lr-actor", "--lr-alpha", "--init-log-alpha", "--entropy-target",
        "--reward-scale", "--imps", "--periods", "--logit-mean", "--logit-std", "--period-logit-shift",
        "--feature-dims", "--feature-share", "--price-scale", "--price-elasticity", "--price-noise",
        "--period-price-factor", "--premium-pctr", "--premium-factor", "--premium-base-bid", "--premium-noise",
        "--fit-ctr", "--config"}) {
    EXPECT_NE(r.out.find(key), std::string::npos) << key;
  }
}

TEST_F(CliTest, SynthIsDeterministic) {
  ASSERT_EQ(run({"synth", "--seed", "7", "--imps", "3000", "--output", path("a.csv")}).code, kExitOk);
  ASSERT_EQ(run({"synth", "--seed", "7", "--imps", "3000", "--output", path("b.csv")}).code, kExitOk);
  EXPECT_EQ(read_file(path("a.csv")), read_file(path("b.csv")));
}

TEST_F(CliTest, IngestRoundTripsNativeCsv) {
  ASSERT_EQ(run({"ingest", "--input", kFixture, "--output", path("copy.csv")}).code, kExitOk);
  EXPECT_EQ(read_file(path("copy.csv")), read_file(kFixture));
}

TEST_F(CliTest, FlagsOverrideFileOverrideDefaults) {
  const std::string conf = write_config("synth.conf", "imps=500\nperiods=2\n");
  ASSERT_EQ(run({"synth", "--config", conf, "--output", path("file.csv")}).code, kExitOk);
  ASSERT_EQ(run({"synth", "--config", conf, "--imps", "300", "--output", path("flag.csv")}).code, kExitOk);
  auto rows = [](const std::string& text) { return std::count(text.begin(), text.end(), '\n') - 1; };
  EXPECT_EQ(rows(read_file(path("file.csv"))), 500);
  EXPECT_EQ(rows(read_file(path("flag.csv"))), 300);
}

TEST_F(CliTest, ExitCodes) {
  EXPECT_EQ(run({}).code, kExitConfig);
  EXPECT_EQ(run({"synth", "--no-such-flag", "1"}).code, kExitConfig);
  EXPECT_EQ(run({"synth", "--config", write_config("bad.conf", "no-such-key=1\n"), "--output", path("x")}).code,
            kExitConfig);
  EXPECT_EQ(run({"synth", "--imps", "0", "--output", path("x.csv")}).code, kExitConfig);
  EXPECT_EQ(run({"ingest", "--input", path("missing.csv"), "--output", path("x.csv")}).code, kExitData);
  std::ofstream(path("broken.csv")) << "period_id,seq,pctr,market_price,click\nd,0,1.3,5,0\n";
  const CliRun broken = run({"ingest", "--input", path("broken.csv"), "--output", path("x.csv")});
  EXPECT_EQ(broken.code, kExitData);
  EXPECT_NE(broken.err.find("line 2"), std::string::npos) << broken.err;
  EXPECT_EQ(run({"train", "--train", kFixture, "--calibration", path("c.json"), "--checkpoint", path("k")}).code,
            kExitConfig);
  EXPECT_EQ(run({"calibrate", "--train", kFixture, "--calibration", path("c.json"), "--fractions", "1/x"}).code,
            kExitConfig);
  EXPECT_FALSE(fs::exists(path("x.csv")));
}

TEST_F(CliTest, FullPipelineOnFixture) {
  const std::string before = read_file(kFixture);
  const std::string conf = small_sac_config();
  ASSERT_EQ(run({"calibrate", "--train", kFixture, "--calibration", path("cal.json")}).code, kExitOk);
  const CliRun train = run({"train", "--config", conf, "--train", kFixture, "--calibration", path("cal.json"),
                         "--checkpoint", path("ckpt.json"), "--seed", "3"});
  ASSERT_EQ(train.code, kExitOk) << train.err;
  EXPECT_TRUE(fs::exists(path("ckpt.json.log.json")));
  const CliRun eval = run({"evaluate", "--config", conf, "--test", kFixture, "--calibration", path("cal.json"),
                        "--checkpoint", path("ckpt.json"), "--report-dir", path("report"), "--seed", "3"});
  ASSERT_EQ(eval.code, kExitOk) << eval.err;
  for (const char* name : {"report.csv", "report.json", "report.md"}) {
    EXPECT_TRUE(fs::exists(path("report") + "/" + name)) << name;
  }
  const std::string csv = read_file(path("report/report.csv"));
  // Header plus 6 strategies x 4 fractions x 5 periods.
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 1 + 6 * 4 * 5);
  EXPECT_EQ(read_file(kFixture), before);
}

// Report rows keyed by strategy with the name column removed.
std::map<std::string, std::vector<std::string>> rows_by_strategy(const std::string& csv) {
  std::map<std::string, std::vector<std::string>> out;
  std::istringstream in(csv);
  std::string line;
  std::getline(in, line);
  while (std::getline(in, line)) {
    const auto comma = line.find(',');
    out[line.substr(0, comma)].push_back(line.substr(comma));
  }
  return out;
}

TEST_F(CliTest, ZeroActionReportEqualsLin) {
  ASSERT_EQ(run({"calibrate", "--train", kFixture, "--calibration", path("cal.json")}).code, kExitOk);
  ASSERT_EQ(run({"evaluate", "--test", kFixture, "--calibration", path("cal.json"), "--strategies", "lin",
                 "--report-dir", path("lin"), "--seed", "1", "--formats", "csv"})
                .code,
            kExitOk);
  ASSERT_EQ(run({"evaluate", "--test", kFixture, "--calibration", path("cal.json"), "--strategies",
                 "zero-action", "--report-dir", path("zero"), "--seed", "1", "--formats", "csv"})
                .code,
            kExitOk);
  const auto lin = rows_by_strategy(read_file(path("lin/report.csv")));
  const auto zero = rows_by_strategy(read_file(path("zero/report.csv")));
  ASSERT_EQ(lin.size(), 1u);
  ASSERT_EQ(zero.size(), 1u);
  EXPECT_EQ(lin.begin()->second, zero.begin()->second);
}

TEST_F(CliTest, TrainIsByteDeterministic) {
  const std::string conf = small_sac_config();
  ASSERT_EQ(run({"calibrate", "--train", kFixture, "--calibration", path("cal.json")}).code, kExitOk);
  for (const char* name : {"a.json", "b.json"}) {
    ASSERT_EQ(run({"train", "--config", conf, "--train", kFixture, "--calibration", path("cal.json"),
                   "--checkpoint", path(name), "--seed", "11"})
                  .code,
              kExitOk);
  }
  EXPECT_EQ(read_file(path("a.json")), read_file(path("b.json")));
  ASSERT_EQ(run({"train", "--config", conf, "--train", kFixture, "--calibration", path("cal.json"),
                 "--checkpoint", path("c.json"), "--seed", "12"})
                .code,
            kExitOk);
  EXPECT_NE(read_file(path("a.json")), read_file(path("c.json")));
}

TEST_F(CliTest, FailedEvaluateWritesNothing) {
  ASSERT_EQ(run({"calibrate", "--train", kFixture, "--calibration", path("cal.json")}).code, kExitOk);
  std::ofstream(path("ckpt.json")) << "{\"format\": \"nope\"}";
  const CliRun r = run({"evaluate", "--test", kFixture, "--calibration", path("cal.json"), "--checkpoint",
                     path("ckpt.json"), "--report-dir", path("report"), "--seed", "1"});
  EXPECT_EQ(r.code, kExitData);
  EXPECT_FALSE(fs::exists(path("report")));
}

}  // namespace
}  // namespace rtblab::cli
