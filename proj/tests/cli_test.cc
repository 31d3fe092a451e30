// Copyright 2026 The EntityForge Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


#include <gtest/gtest.h>

#include <sstream>

#include "json.hpp"

#include "entityforge/engine.h"
#include "entityforge/tx_stream.h"
#include "test_util.h"

namespace entityforge {
namespace {

using testing::CommandResult;
using testing::ReadFile;
using testing::TempDir;
using testing::WriteFile;

const std::string kCli = ENTITYFORGE_CLI_PATH;
const std::string kData = ENTITYFORGE_DATA_DIR;

CommandResult Cli(std::vector<std::string> args) {
  args.insert(args.begin(), kCli);
  return testing::RunCommand(args);
}

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    tx_ = dir_ / "s.jsonl";
    WriteFile(tx_,
              R"({"txid":"t1","block":100,"inputs":[{"script":"A","value":5},{"script":"B","value":5}],"outputs":[{"script":"C","value":9}]})"
              "\n");
  }

  std::string SynthParamsFile() {
    const std::string path = dir_ / "params.json";
    WriteFile(path, R"({"num_users": 40, "num_blocks": 20, "txs_per_block": 10,
                        "sweep_min_inputs": 3, "deposit_rate": 0.3})");
    return path;
  }

  TempDir dir_;
  std::string tx_;
};

TEST_F(CliTest, RunWritesReportAndSidecar) {
  const std::string out = dir_ / "r.csv";
  const auto r = Cli({"run", "--tx", tx_, "--heuristic", "cio", "--checkpoints",
                      "100", "--out", out});
  ASSERT_EQ(r.exit_code, 0) << r.err;
  EXPECT_EQ(ReadFile(out),
            "block_index,num_scripts,num_clusters,ratio,merges_applied,"
            "tx_processed\n100,3,2,0.666667,1,1\n");
  const auto meta = nlohmann::json::parse(ReadFile(out + ".json"));
  EXPECT_EQ(meta["heuristic"], "cio");
  EXPECT_EQ(meta["parameters"]["a"], 25);
  EXPECT_EQ(meta["input"], "s.jsonl");
}

TEST_F(CliTest, RunToStdout) {
  const auto r = Cli({"run", "--tx", tx_, "--heuristic", "deposit", "--a", "25",
                      "--checkpoints", "100"});
  ASSERT_EQ(r.exit_code, 0) << r.err;
  EXPECT_NE(r.out.find("\n100,3,3,1.000000,0,1\n"), std::string::npos) << r.out;
}

TEST_F(CliTest, RoundWithoutPricesNamesTheFlag) {
  const auto r = Cli({"run", "--tx", tx_, "--heuristic", "round"});
  EXPECT_EQ(r.exit_code, 2);
  EXPECT_NE(r.err.find("--prices"), std::string::npos) << r.err;
}

TEST_F(CliTest, ConfigFileWithFlagOverride) {
  const std::string config = dir_ / "c.json";
  WriteFile(config, R"({"heuristic": "deposit", "a": 2, "checkpoints": "100"})");
  auto r = Cli({"run", "--config", config, "--tx", tx_});
  ASSERT_EQ(r.exit_code, 0) << r.err;
  EXPECT_NE(r.out.find("\n100,3,2,"), std::string::npos) << r.out;
  r = Cli({"run", "--config", config, "--tx", tx_, "--a", "3"});
  ASSERT_EQ(r.exit_code, 0) << r.err;
  EXPECT_NE(r.out.find("\n100,3,3,"), std::string::npos) << r.out;
  WriteFile(config, R"({"heuristc": "deposit"})");
  EXPECT_EQ(Cli({"run", "--config", config, "--tx", tx_, "--heuristic", "cio"}).exit_code, 2);
}

TEST_F(CliTest, UsageAndDataErrors) {
  EXPECT_EQ(Cli({"run", "--tx", tx_, "--heuristic", "cio", "--bogus"}).exit_code, 2);
  EXPECT_EQ(Cli({}).exit_code, 2);
  EXPECT_EQ(Cli({"run", "--tx", tx_, "--heuristic", "h9"}).exit_code, 2);
  EXPECT_EQ(Cli({"run", "--tx", tx_, "--heuristic", "cio", "--checkpoints", "0"}).exit_code, 2);
  EXPECT_EQ(Cli({"run", "--tx", tx_, "--heuristic", "reuse-change", "--horizon",
                 "online"}).exit_code, 2);
  EXPECT_EQ(Cli({"--help"}).exit_code, 0);
  EXPECT_EQ(Cli({"--version"}).exit_code, 0);

  EXPECT_EQ(Cli({"run", "--tx", dir_ / "missing.jsonl", "--heuristic", "cio"}).exit_code, 3);
  const std::string broken = dir_ / "b.jsonl";
  WriteFile(broken, "{\"txid\":\"x\"}\n");
  const auto r = Cli({"run", "--tx", broken, "--heuristic", "cio"});
  EXPECT_EQ(r.exit_code, 3);
  EXPECT_NE(r.err.find("data error"), std::string::npos) << r.err;
}

TEST_F(CliTest, SnapshotAndScore) {
  const std::string snap = dir_ / "p.csv";
  ASSERT_EQ(Cli({"run", "--tx", tx_, "--heuristic", "cio", "--checkpoints", "100", "--out",
                 dir_ / "r.csv", "--snapshot", snap}).exit_code, 0);
  EXPECT_EQ(ReadFile(snap), "script_id,cluster_id\n0,0\n1,0\n2,2\n");
  const std::string truth = dir_ / "t.csv";
  WriteFile(truth, "script_id,user_id\n0,7\n1,7\n2,8\n");
  auto r = Cli({"score", "--snapshot", snap, "--truth", truth});
  ASSERT_EQ(r.exit_code, 0) << r.err;
  const auto m = nlohmann::json::parse(r.out);
  EXPECT_EQ(m["precision"], 1.0);
  EXPECT_EQ(m["recall"], 1.0);

  WriteFile(truth, "script_id,user_id\n0,7\n1,8\n2,8\n");
  r = Cli({"score", "--snapshot", snap, "--truth", truth});
  ASSERT_EQ(r.exit_code, 0);
  EXPECT_EQ(nlohmann::json::parse(r.out)["collapsed_clusters"], 1);

  WriteFile(truth, "script_id,user_id\n0,7\n1,7\n");
  EXPECT_EQ(Cli({"score", "--snapshot", snap, "--truth", truth}).exit_code, 3);

  const std::string bin = dir_ / "p.bin";
  ASSERT_EQ(Cli({"run", "--tx", tx_, "--heuristic", "cio", "--checkpoints", "100", "--out",
                 dir_ / "r2.csv", "--snapshot", bin}).exit_code, 0);
  EXPECT_EQ(ReadFile(bin).substr(0, 5), "ECLS1");
}

TEST_F(CliTest, SynthIsByteIdentical) {
  const std::string params = SynthParamsFile();
  ASSERT_EQ(Cli({"synth", "--seed", "1", "--params", params, "--out-prefix",
                 dir_ / "a"}).exit_code, 0);
  ASSERT_EQ(Cli({"synth", "--seed", "1", "--params", params, "--out-prefix",
                 dir_ / "b"}).exit_code, 0);
  ASSERT_EQ(Cli({"synth", "--seed", "2", "--params", params, "--out-prefix",
                 dir_ / "c"}).exit_code, 0);
  for (const char* ext : {".jsonl", ".truth.csv", ".meta.json"}) {
    EXPECT_EQ(ReadFile(dir_ / ("a" + std::string(ext))),
              ReadFile(dir_ / ("b" + std::string(ext))));
  }
  EXPECT_NE(ReadFile(dir_ / "a.jsonl"), ReadFile(dir_ / "c.jsonl"));

  EXPECT_NE(Cli({"synth", "--seed", "1", "--params", dir_ / "none.json",
                 "--out-prefix", dir_ / "d"}).exit_code, 0);
  WriteFile(dir_ / "bad.json", R"({"num_users": 3})");
  EXPECT_EQ(Cli({"synth", "--seed", "1", "--params", dir_ / "bad.json",
                 "--out-prefix", dir_ / "d"}).exit_code, 2);
}

TEST_F(CliTest, SynthRunScorePipeline) {
  const std::string params = SynthParamsFile();
  ASSERT_EQ(Cli({"synth", "--seed", "5", "--params", params, "--out-prefix",
                 dir_ / "s"}).exit_code, 0);
  const auto run = Cli({"run", "--tx", dir_ / "s.jsonl", "--heuristic", "cio-cj",
                        "--checkpoints", "5", "--out", dir_ / "r.csv",
                        "--snapshot", dir_ / "p.bin"});
  ASSERT_EQ(run.exit_code, 0) << run.err;
  const auto score = Cli({"score", "--snapshot", dir_ / "p.bin", "--truth",
                          dir_ / "s.truth.csv", "--out", dir_ / "m.json"});
  ASSERT_EQ(score.exit_code, 0) << score.err;
  const auto m = nlohmann::json::parse(ReadFile(dir_ / "m.json"));
  EXPECT_GT(m["recall"].get<double>(), 0.0);
}

TEST_F(CliTest, ValidateReportsCounts) {
  const auto r = Cli({"validate", "--tx", tx_});
  ASSERT_EQ(r.exit_code, 0) << r.err;
  const auto stats = nlohmann::json::parse(r.out);
  EXPECT_EQ(stats["transactions"], 1);
  EXPECT_EQ(stats["scripts"], 3);
}

TEST_F(CliTest, CompareJoinsReports) {
  ASSERT_EQ(Cli({"run", "--tx", tx_, "--heuristic", "cio", "--checkpoints", "100", "--out",
                 dir_ / "h1.csv"}).exit_code, 0);
  ASSERT_EQ(Cli({"run", "--tx", tx_, "--heuristic", "deposit", "--checkpoints",
                 "100", "--out", dir_ / "h6.csv"}).exit_code, 0);
  const auto r = Cli({"compare", "one=" + (dir_ / "h1.csv"), dir_ / "h6.csv"});
  ASSERT_EQ(r.exit_code, 0) << r.err;
  EXPECT_EQ(r.out, "block_index,one,h6\n100,0.666667,1.000000\n");
  ASSERT_EQ(Cli({"run", "--tx", tx_, "--heuristic", "cio", "--checkpoints", "100,200", "--out",
                 dir_ / "x.csv"}).exit_code, 0);
  EXPECT_EQ(Cli({"compare", dir_ / "h1.csv", dir_ / "x.csv"}).exit_code, 3);
}

TEST_F(CliTest, ExponentSeries) {
  const std::string prices = dir_ / "p.csv";
  WriteFile(prices, "block_index,usd_per_btc\n0,10000\n");
  auto r = Cli({"exponent-series", "--prices", prices, "--blocks", "0:20:10"});
  ASSERT_EQ(r.exit_code, 0) << r.err;
  EXPECT_EQ(r.out, "block_index,i\n0,4\n10,4\n20,4\n");
  r = Cli({"exponent-series", "--prices", prices, "--blocks", "0:20:10", "--x",
           "10"});
  EXPECT_EQ(r.out, "block_index,i\n0,5\n10,5\n20,5\n");

  WriteFile(prices, "block_index,usd_per_btc\n10,10000\n");
  r = Cli({"exponent-series", "--prices", prices, "--blocks", "0,5,10"});
  ASSERT_EQ(r.exit_code, 0);
  EXPECT_EQ(r.out, "block_index,i\n10,4\n");
  EXPECT_NE(r.err.find("2"), std::string::npos) << r.err;
}

TEST_F(CliTest, ExponentSeriesOnSampleData) {
  const auto r = Cli({"exponent-series", "--prices", kData + "/sample_prices.csv",
                      "--blocks", "160000:700000:1000"});
  ASSERT_EQ(r.exit_code, 0) << r.err;
  std::istringstream in(r.out);
  std::string line, last;
  int previous_first = -1;
  std::getline(in, line);
  while (std::getline(in, line)) {
    last = line;
    if (previous_first < 0) previous_first = std::stoi(line.substr(line.find(',') + 1));
  }
  EXPECT_EQ(previous_first, 7);
  EXPECT_EQ(last, "700000,3");
}

TEST_F(CliTest, TruncatedRunMatchesFullRow) {
  const std::string params = SynthParamsFile();
  ASSERT_EQ(Cli({"synth", "--seed", "8", "--params", params, "--out-prefix",
                 dir_ / "s"}).exit_code, 0);
  const auto full = Cli({"run", "--tx", dir_ / "s.jsonl", "--heuristic", "change",
                         "--checkpoints", "4"});
  const auto cut = Cli({"run", "--tx", dir_ / "s.jsonl", "--heuristic", "change",
                        "--checkpoints", "4", "--until", "12"});
  ASSERT_EQ(full.exit_code, 0);
  ASSERT_EQ(cut.exit_code, 0);
  // The fixed horizon is the whole stream in both runs.
  EXPECT_EQ(full.out.substr(0, cut.out.size()), cut.out);
}

}  // namespace
}  // namespace entityforge
