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


#include "entityforge/cli.h"

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "entityforge/cluster_store.h"
#include "entityforge/engine.h"
#include "entityforge/error.h"
#include "entityforge/kernels.h"
#include "entityforge/log.h"
#include "entityforge/pricing.h"
#include "entityforge/synth.h"
#include "entityforge/tx_stream.h"

namespace entityforge {
namespace {

std::ifstream OpenIn(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) ThrowIo("open-failed", "cannot open '" + path + "'");
  return in;
}

std::ofstream OpenOut(const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) ThrowIo("open-failed", "cannot write '" + path + "'");
  return out;
}

bool IsBinarySnapshot(const std::string& path) {
  return std::filesystem::path(path).extension() == ".bin";
}

PriceSeries LoadPrices(const std::string& prices,
                       const std::string& block_dates) {
  if (block_dates.empty()) return PriceSeries::FromFile(prices);
  auto in = OpenIn(prices);
  auto mapping = OpenIn(block_dates);
  return PriceSeries::FromDatedCsv(in, mapping);
}

// Writes to `path`, or to stdout when it is empty.
template <typename Fn>
void WriteResult(const std::string& path, Fn&& fn) {
  if (path.empty()) {
    fn(std::cout);
    std::cout.flush();
    return;
  }
  auto out = OpenOut(path);
  fn(out);
  if (!out) ThrowIo("write-failed", "failed writing '" + path + "'");
}

struct RunFlags {
  std::string config;
  std::string tx;
  std::string heuristic;
  std::string prices;
  std::string block_dates;
  int a = 25;
  std::string x = "1";
  int j = 1;
  std::string horizon;
  std::optional<BlockIndex> horizon_block;
  std::string reuse_count = "protection";
  std::string checkpoints = "100000";
  std::optional<BlockIndex> until;
  std::string out;
  std::string snapshot;
  int threads = 1;
};

// Fills every flag the command line left unset from the config file.
void ApplyRunConfig(const CLI::App& cmd, RunFlags& f) {
  if (f.config.empty()) return;
  auto in = OpenIn(f.config);
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    ThrowConfig("bad-config", "config '" + f.config + "': " + e.what());
  }
  if (!j.is_object()) ThrowConfig("bad-config", "config must be an object");
  auto unset = [&](const char* flag) { return cmd.count(flag) == 0; };
  try {
    for (const auto& [key, value] : j.items()) {
      if (key == "tx") { if (unset("--tx")) f.tx = value.get<std::string>(); }
      else if (key == "heuristic") { if (unset("--heuristic")) f.heuristic = value.get<std::string>(); }
      else if (key == "prices") { if (unset("--prices")) f.prices = value.get<std::string>(); }
      else if (key == "block_dates") { if (unset("--block-dates")) f.block_dates = value.get<std::string>(); }
      else if (key == "a") { if (unset("--a")) f.a = value.get<int>(); }
      else if (key == "x") { if (unset("--x")) f.x = value.is_string() ? value.get<std::string>() : value.dump(); }
      else if (key == "j") { if (unset("--j")) f.j = value.get<int>(); }
      else if (key == "horizon") { if (unset("--horizon")) f.horizon = value.get<std::string>(); }
      else if (key == "horizon_block") { if (unset("--horizon-block")) f.horizon_block = value.get<BlockIndex>(); }
      else if (key == "reuse_count") { if (unset("--reuse-count")) f.reuse_count = value.get<std::string>(); }
      else if (key == "checkpoints") { if (unset("--checkpoints")) f.checkpoints = value.is_string() ? value.get<std::string>() : value.dump(); }
      else if (key == "until") { if (unset("--until")) f.until = value.get<BlockIndex>(); }
      else if (key == "threads") { if (unset("--threads")) f.threads = value.get<int>(); }
      else ThrowConfig("bad-config", "unknown config key '" + key + "'");
    }
  } catch (const nlohmann::json::exception& e) {
    ThrowConfig("bad-config", "config '" + f.config + "': " + e.what());
  }
}

void CmdRun(const CLI::App& cmd, RunFlags f) {
  ApplyRunConfig(cmd, f);
  if (f.tx.empty()) ThrowUsage("missing-flag", "run needs --tx");
  if (f.heuristic.empty()) ThrowUsage("missing-flag", "run needs --heuristic");

  RunConfig config;
  config.heuristic = ParseHeuristic(f.heuristic);
  config.params.min_deposit_inputs = f.a;
  config.params.small_amount_usd = Decimal::Parse(f.x);
  config.params.precision_offset = f.j;
  if (!f.horizon.empty()) config.params.horizon = ParseHorizon(f.horizon);
  config.params.counting = ParseCounting(f.reuse_count);
  config.params.Validate();
  config.checkpoints = CheckpointSpec::Parse(f.checkpoints);
  config.until = f.until;
  config.horizon_block = f.horizon_block;
  config.threads = f.threads;

  std::optional<PriceSeries> prices;
  if (UsesPrices(config.heuristic)) {
    if (f.prices.empty()) {
      ThrowUsage("missing-prices", "heuristic '" + f.heuristic +
                                       "' needs a price file: pass --prices");
    }
    prices = LoadPrices(f.prices, f.block_dates);
  } else if (!f.prices.empty()) {
    spdlog::warn("--prices is ignored by heuristic '{}'", f.heuristic);
  }
  if (!std::filesystem::exists(f.tx)) {
    ThrowIo("open-failed", "transaction file '" + f.tx + "' does not exist");
  }

  JsonlTxStream stream(f.tx, {.threads = EffectiveThreads(f.threads),
                              .batch_size = 8192});
  RunResult result = Run(config, stream, prices ? &*prices : nullptr);
  result.report.metadata["input"] =
      std::filesystem::path(f.tx).filename().string();

  WriteResult(f.out, [&](std::ostream& o) { result.report.WriteCsv(o); });
  if (!f.out.empty()) {
    auto side = OpenOut(f.out + ".json");
    side << result.report.metadata.dump(2) << '\n';
  }
  if (!f.snapshot.empty()) {
    auto snap = OpenOut(f.snapshot);
    if (IsBinarySnapshot(f.snapshot)) {
      WriteSnapshotBinary(result.clusters, snap);
    } else {
      WriteSnapshotCsv(result.clusters, snap);
    }
  }
  spdlog::info("processed {} transactions, {} scripts, {} clusters",
               result.ingest.accepted, result.clusters.num_scripts(),
               result.clusters.num_clusters());
}

void CmdCompare(const std::vector<std::string>& inputs,
                const std::string& out) {
  std::vector<NamedReport> reports;
  for (const std::string& spec : inputs) {
    NamedReport named;
    std::string path = spec;
    if (const auto eq = spec.find('='); eq != std::string::npos) {
      named.name = spec.substr(0, eq);
      path = spec.substr(eq + 1);
    } else {
      named.name = std::filesystem::path(spec).stem().string();
    }
    auto in = OpenIn(path);
    named.report = RatioReport::ReadCsv(in);
    reports.push_back(std::move(named));
  }
  WriteResult(out, [&](std::ostream& o) { CompareRuns(reports, o); });
}

void CmdSynth(std::uint64_t seed, const std::string& params_path,
              const std::string& prefix) {
  auto in = OpenIn(params_path);
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    ThrowConfig("bad-params", "params '" + params_path + "': " + e.what());
  }
  const SynthParams params = SynthParams::FromJson(j);
  const SynthDataset data = Generate(seed, params);
  WriteDataset(data, seed, params, prefix);
  spdlog::info("wrote {} transactions to {}.jsonl",
               data.transactions.size(), prefix);
}

void CmdScore(const std::string& snapshot, const std::string& truth_path,
              const std::string& out) {
  auto snap_in = OpenIn(snapshot);
  const ClusterSet partition = IsBinarySnapshot(snapshot)
                                   ? ReadSnapshotBinary(snap_in)
                                   : ReadSnapshotCsv(snap_in);
  auto truth_in = OpenIn(truth_path);
  const GroundTruth truth = GroundTruth::ReadCsv(truth_in);
  const ScoreMetrics metrics = Score(partition, truth);
  WriteResult(out, [&](std::ostream& o) {
    o << metrics.ToJson().dump(2) << '\n';
  });
}

// "100,200,300" or "start:end:step" (inclusive end).
std::vector<BlockIndex> ParseBlocks(const std::string& text) {
  std::vector<BlockIndex> blocks;
  auto number = [&](const std::string& s) {
    try {
      std::size_t used = 0;
      const auto v = std::stoull(s, &used);
      if (used != s.size()) throw std::invalid_argument(s);
      return static_cast<BlockIndex>(v);
    } catch (const std::exception&) {
      ThrowUsage("bad-blocks", "bad block index '" + s + "'");
    }
  };
  if (text.find(':') != std::string::npos) {
    std::vector<std::string> parts;
    std::stringstream ss(text);
    for (std::string part; std::getline(ss, part, ':');) parts.push_back(part);
    if (parts.size() != 3) {
      ThrowUsage("bad-blocks", "--blocks range must be start:end:step");
    }
    const BlockIndex start = number(parts[0]);
    const BlockIndex end = number(parts[1]);
    const BlockIndex step = number(parts[2]);
    if (step == 0 || end < start) {
      ThrowUsage("bad-blocks", "--blocks range needs step > 0 and end >= start");
    }
    for (BlockIndex b = start; b <= end; b += step) {
      blocks.push_back(b);
      if (end - b < step) break;
    }
    return blocks;
  }
  std::stringstream ss(text);
  for (std::string part; std::getline(ss, part, ',');) {
    if (!part.empty()) blocks.push_back(number(part));
  }
  if (blocks.empty()) ThrowUsage("bad-blocks", "--blocks is empty");
  return blocks;
}

void CmdExponentSeries(const std::string& prices_path,
                       const std::string& block_dates, const std::string& x,
                       const std::string& blocks_text, const std::string& out) {
  const PriceSeries prices = LoadPrices(prices_path, block_dates);
  const Decimal budget = Decimal::Parse(x);
  if (budget.is_zero()) ThrowUsage("bad-parameter", "--x must be positive");
  const std::vector<BlockIndex> blocks = ParseBlocks(blocks_text);
  std::size_t omitted = 0;
  const auto points = ExponentSeries(prices, budget, blocks, &omitted);
  if (omitted > 0) {
    spdlog::warn("{} block(s) precede the first price and were omitted",
                 omitted);
  }
  WriteResult(out, [&](std::ostream& o) {
    o << "block_index,i\n";
    for (const ExponentPoint& p : points) {
      o << p.block << ',' << p.exponent << '\n';
    }
  });
}

void CmdValidate(const std::string& tx, int threads) {
  if (!std::filesystem::exists(tx)) {
    ThrowIo("open-failed", "transaction file '" + tx + "' does not exist");
  }
  JsonlTxStream stream(tx, {.threads = EffectiveThreads(threads),
                            .batch_size = 8192});
  ScriptTable table;
  Ingestor ingestor(table);
  std::vector<RawTransaction> batch;
  std::optional<BlockIndex> first;
  while (stream.NextBatch(batch)) {
    for (const RawTransaction& raw : batch) {
      if (auto t = ingestor.Ingest(raw); t && !first) first = t->block;
    }
  }
  nlohmann::ordered_json summary;
  summary["transactions"] = ingestor.stats().accepted;
  summary["coinbase_dropped"] = ingestor.stats().coinbase_dropped;
  summary["scripts"] = table.size();
  summary["first_block"] =
      first ? nlohmann::ordered_json(*first) : nlohmann::ordered_json(nullptr);
  summary["last_block"] = ingestor.last_block()
                              ? nlohmann::ordered_json(*ingestor.last_block())
                              : nlohmann::ordered_json(nullptr);
  std::cout << summary.dump(2) << '\n';
}

int ExitCodeFor(ErrorCategory category) {
  switch (category) {
    case ErrorCategory::kUsage:
    case ErrorCategory::kConfig:
      return 2;
    case ErrorCategory::kData:
    case ErrorCategory::kIo:
      return 3;
  }
  return 3;
}

}  // namespace

int RunCli(int argc, char** argv) {
  InitLogging();
  CLI::App app{"EntityForge: script clustering heuristics over block streams",
               "entityforge"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "entityforge 1.0.0");

  RunFlags run;
  auto* run_cmd = app.add_subcommand("run", "Cluster a transaction stream");
  run_cmd->add_option("--config", run.config, "JSON file with defaults for the flags below")
      ->check(CLI::ExistingFile);
  run_cmd->add_option("--tx", run.tx, "Transaction JSONL (optionally gzip)");
  run_cmd->add_option("--heuristic", run.heuristic,
                      "cio|cio-cj|change|round|force-merge|deposit|shadow|"
                      "one-time-change|reuse-change|combined");
  run_cmd->add_option("--prices", run.prices, "Price CSV (block_index,usd_per_btc)");
  run_cmd->add_option("--block-dates", run.block_dates,
                      "Block to date mapping when --prices is date keyed");
  run_cmd->add_option("--a", run.a, "Deposit threshold")->capture_default_str();
  run_cmd->add_option("--x", run.x, "Small amount in USD")->capture_default_str();
  run_cmd->add_option("--j", run.j, "Precision offset")->capture_default_str();
  run_cmd->add_option("--horizon", run.horizon, "online|fixed");
  run_cmd->add_option("--horizon-block", run.horizon_block,
                      "Last block of the fixed reuse horizon");
  run_cmd->add_option("--reuse-count", run.reuse_count, "protection|appearance")
      ->capture_default_str();
  run_cmd->add_option("--checkpoints", run.checkpoints,
                      "Interval N or explicit list k1,k2,...")
      ->capture_default_str();
  run_cmd->add_option("--until", run.until, "Stop clustering after this block");
  run_cmd->add_option("--out", run.out, "Report CSV (stdout if absent)");
  run_cmd->add_option("--snapshot", run.snapshot,
                      "Final partition (.bin for binary, CSV otherwise)");
  run_cmd->add_option("--threads", run.threads, "Worker threads")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();

  std::vector<std::string> compare_inputs;
  std::string compare_out;
  auto* compare_cmd =
      app.add_subcommand("compare", "Join report ratios by checkpoint");
  compare_cmd->add_option("reports", compare_inputs, "[name=]report.csv ...")
      ->required();
  compare_cmd->add_option("--out", compare_out, "Output CSV (stdout if absent)");

  std::uint64_t seed = 0;
  std::string params_path;
  std::string prefix;
  auto* synth_cmd = app.add_subcommand("synth", "Generate a synthetic dataset");
  synth_cmd->add_option("--seed", seed, "RNG seed")->required();
  synth_cmd->add_option("--params", params_path, "Generation parameters JSON")
      ->required();
  synth_cmd->add_option("--out-prefix", prefix, "Output path prefix")->required();

  std::string score_snapshot;
  std::string score_truth;
  std::string score_out;
  auto* score_cmd =
      app.add_subcommand("score", "Score a partition against ground truth");
  score_cmd->add_option("--snapshot", score_snapshot, "Partition snapshot")
      ->required();
  score_cmd->add_option("--truth", score_truth, "Truth CSV (script_id,user_id)")
      ->required();
  score_cmd->add_option("--out", score_out, "Metrics JSON (stdout if absent)");

  std::string exp_prices;
  std::string exp_dates;
  std::string exp_x = "1";
  std::string exp_blocks;
  std::string exp_out;
  auto* exp_cmd = app.add_subcommand("exponent-series",
                                     "Rounding exponent per block");
  exp_cmd->add_option("--prices", exp_prices, "Price CSV")->required();
  exp_cmd->add_option("--block-dates", exp_dates, "Block to date mapping");
  exp_cmd->add_option("--x", exp_x, "Small amount in USD")->capture_default_str();
  exp_cmd->add_option("--blocks", exp_blocks, "start:end:step or k1,k2,...")
      ->required();
  exp_cmd->add_option("--out", exp_out, "Output CSV (stdout if absent)");

  std::string validate_tx;
  int validate_threads = 1;
  auto* validate_cmd =
      app.add_subcommand("validate", "Check a transaction stream");
  validate_cmd->add_option("--tx", validate_tx, "Transaction JSONL")->required();
  validate_cmd->add_option("--threads", validate_threads, "Decode threads")
      ->check(CLI::PositiveNumber);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (*run_cmd) {
      CmdRun(*run_cmd, run);
    } else if (*compare_cmd) {
      CmdCompare(compare_inputs, compare_out);
    } else if (*synth_cmd) {
      CmdSynth(seed, params_path, prefix);
    } else if (*score_cmd) {
      CmdScore(score_snapshot, score_truth, score_out);
    } else if (*exp_cmd) {
      CmdExponentSeries(exp_prices, exp_dates, exp_x, exp_blocks, exp_out);
    } else if (*validate_cmd) {
      CmdValidate(validate_tx, validate_threads);
    }
  } catch (const Error& e) {
    std::cerr << "entityforge: " << CategoryName(e.category()) << " error ("
              << e.kind() << "): " << e.what() << '\n';
    return ExitCodeFor(e.category());
  } catch (const std::exception& e) {
    std::cerr << "entityforge: internal error: " << e.what() << '\n';
    return 3;
  }
  return 0;
}

}  // namespace entityforge
