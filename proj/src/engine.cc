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

#include "entityforge/engine.h"

#include <charconv>
#include <sstream>

#include <fmt/format.h>

#include "entityforge/error.h"
#include "entityforge/kernels.h"
#include "entityforge/log.h"

namespace entityforge {
namespace {

BlockIndex ParseBlockField(std::string_view text, std::string_view what) {
  BlockIndex v = 0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (text.empty() || ec != std::errc() || ptr != text.data() + text.size()) {
    ThrowUsage("bad-checkpoints", "bad " + std::string(what) + " '" +
                                      std::string(text) + "'");
  }
  return v;
}

bool HasRoundShape(const Transaction& tx) {
  return tx.inputs.size() == 1 && tx.outputs.size() == 2 &&
         tx.outputs[0].script != tx.outputs[1].script;
}

}  // namespace

CheckpointSpec CheckpointSpec::Parse(std::string_view text) {
  CheckpointSpec spec;
  if (text.find(',') == std::string_view::npos) {
    spec.every = ParseBlockField(text, "checkpoint interval");
    if (*spec.every == 0) {
      ThrowUsage("bad-checkpoints", "checkpoint interval must be positive");
    }
    return spec;
  }
  std::size_t start = 0;
  while (start <= text.size()) {
    const auto comma = text.find(',', start);
    const auto field = text.substr(
        start, comma == std::string_view::npos ? std::string_view::npos
                                               : comma - start);
    if (field.empty() && comma != std::string_view::npos) {
      ThrowUsage("bad-checkpoints", "empty checkpoint in '" +
                                        std::string(text) + "'");
    }
    if (!field.empty()) {
      const BlockIndex block = ParseBlockField(field, "checkpoint");
      if (!spec.blocks.empty() && block <= spec.blocks.back()) {
        ThrowUsage("bad-checkpoints", "checkpoints must strictly increase");
      }
      spec.blocks.push_back(block);
    }
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  if (spec.blocks.empty()) ThrowUsage("bad-checkpoints", "no checkpoints");
  return spec;
}

std::string CheckpointSpec::ToString() const {
  if (every) return std::to_string(*every);
  std::string out;
  for (BlockIndex block : blocks) {
    if (!out.empty()) out += ',';
    out += std::to_string(block);
  }
  return blocks.size() == 1 ? out + "," : out;
}

Evaluator::Evaluator(HeuristicKind kind, const HeuristicConfig& params,
                     const PriceSeries* prices, const ReuseIndex* reuse)
    : kind_(kind),
      params_(params),
      prices_(prices),
      reuse_(reuse),
      coinjoin_(CoinJoinPredicate::Default()) {
  params_.Validate();
  if (UsesReuse(kind) && reuse == nullptr) {
    ThrowConfig("missing-reuse", "heuristic needs a reuse index");
  }
  if (UsesPrices(kind) && prices == nullptr) {
    ThrowUsage("missing-prices",
               std::string("heuristic '") + std::string(HeuristicName(kind)) +
                   "' needs a price series (--prices)");
  }
}

std::optional<int> Evaluator::ExponentAt(BlockIndex block) const {
  if (prices_ == nullptr) return std::nullopt;
  auto price = SatoshiPrice(*prices_, block);
  if (!price) return std::nullopt;
  return RoundingExponent(*price, params_.small_amount_usd);
}

MergeProposal Evaluator::Evaluate(const Transaction& tx) const {
  switch (kind_) {
    case HeuristicKind::kCommonInput:
      return CommonInput(tx);
    case HeuristicKind::kCoinJoinResistant:
      return CoinJoinResistant(tx, coinjoin_);
    case HeuristicKind::kChangeAddress:
      return ChangeAddress(tx, *reuse_);
    case HeuristicKind::kRoundOutput: {
      if (!HasRoundShape(tx)) return {};
      const auto exponent = ExponentAt(tx.block);
      // No price, or too coarse a price for the offset: skip.
      if (!exponent || *exponent <= params_.precision_offset) return {};
      return RoundOutput(tx, *reuse_, *exponent, params_.precision_offset);
    }
    case HeuristicKind::kForceMerge:
      return ForceMerge(tx, *reuse_);
    case HeuristicKind::kServiceDeposit:
      return ServiceDeposit(tx, params_.min_deposit_inputs);
    case HeuristicKind::kShadowAddress:
      return ShadowAddress(tx, *reuse_);
    case HeuristicKind::kOneTimeChange:
      return OneTimeChange(tx, *reuse_);
    case HeuristicKind::kReuseChange:
      return ReuseChange(tx, *reuse_);
    case HeuristicKind::kCombined: {
      CombinedContext ctx;
      ctx.is_coinjoin = &coinjoin_;
      ctx.reuse = reuse_;
      ctx.offset = params_.precision_offset;
      if (HasRoundShape(tx)) ctx.exponent = ExponentAt(tx.block);
      return Combined(tx, ctx);
    }
  }
  return {};
}

void RatioReport::WriteCsv(std::ostream& out) const {
  out << "block_index,num_scripts,num_clusters,ratio,merges_applied,"
         "tx_processed\n";
  for (const ReportRow& row : rows) {
    out << fmt::format("{},{},{},{:.6f},{},{}\n", row.block, row.num_scripts,
                       row.num_clusters, row.ratio, row.merges_applied,
                       row.tx_processed);
  }
}

RatioReport RatioReport::ReadCsv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) ||
      line.rfind("block_index,num_scripts,num_clusters,ratio", 0) != 0) {
    ThrowData("bad-report", "not a ratio report CSV");
  }
  RatioReport report;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::stringstream ss(line);
    ReportRow row;
    char c1, c2, c3, c4, c5;
    if (!(ss >> row.block >> c1 >> row.num_scripts >> c2 >> row.num_clusters >>
          c3 >> row.ratio >> c4 >> row.merges_applied >> c5 >>
          row.tx_processed) ||
        c1 != ',' || c2 != ',' || c3 != ',' || c4 != ',' || c5 != ',') {
      ThrowData("bad-report", "bad report row '" + line + "'");
    }
    report.rows.push_back(row);
  }
  return report;
}

RunResult Run(const RunConfig& config, TxStream& stream,
              const PriceSeries* prices, const ProposalObserver& observer) {
  config.params.Validate();
  const HeuristicKind kind = config.heuristic;
  const HorizonMode horizon =
      config.params.horizon.value_or(DefaultHorizon(kind));
  if (kind == HeuristicKind::kReuseChange && horizon != HorizonMode::kFixed) {
    ThrowUsage("horizon-mode", "reuse-change requires the fixed horizon");
  }
  if (UsesPrices(kind) && prices == nullptr) {
    ThrowUsage("missing-prices",
               std::string("heuristic '") + std::string(HeuristicName(kind)) +
                   "' needs a price series (--prices)");
  }
  const bool needs_fixed = UsesReuse(kind) && horizon == HorizonMode::kFixed;
  const bool needs_online = UsesReuse(kind) && horizon == HorizonMode::kOnline;
  const ReuseCounting counting = config.params.counting;
  const int threads = EffectiveThreads(config.threads);

  RunResult result;
  Ingestor ingestor(result.scripts);
  std::vector<RawTransaction> raw;
  std::vector<Transaction> txs;
  auto ingest_batch = [&] {
    txs.clear();
    for (const RawTransaction& r : raw) {
      if (auto tx = ingestor.Ingest(r)) txs.push_back(std::move(*tx));
    }
  };

  std::optional<ReuseIndex> fixed;
  std::optional<BlockIndex> fixed_horizon;
  stream.Rewind();
  if (needs_fixed) {
    FixedReuseBuilder builder(config.horizon_block.value_or(kMaxBlock),
                              counting, threads);
    while (stream.NextBatch(raw)) {
      ingest_batch();
      builder.AddBatch(txs);
    }
    fixed = std::move(builder).Finish();
    fixed_horizon = config.horizon_block ? config.horizon_block
                                         : ingestor.last_block();
    spdlog::info("reuse index built over {} transactions (horizon {})",
                 ingestor.stats().accepted,
                 fixed_horizon ? std::to_string(*fixed_horizon) : "-");
    ingestor.Restart();
    stream.Rewind();
  }
  ReuseIndex online = ReuseIndex::Online(counting);
  const ReuseIndex* reuse =
      needs_fixed ? &*fixed : (needs_online ? &online : nullptr);
  Evaluator evaluator(kind, config.params, prices, reuse);

  ClusterSet& clusters = result.clusters;
  RatioReport& report = result.report;
  std::uint64_t merges_applied = 0;
  std::uint64_t tx_processed = 0;
  std::uint64_t round_skipped = 0;
  std::uint64_t skipped_rows = 0;
  std::optional<BlockIndex> last_processed;

  const CheckpointSpec& cps = config.checkpoints;
  std::size_t next_listed = 0;
  BlockIndex next_every = cps.every.value_or(0);
  auto next_checkpoint = [&]() -> std::optional<BlockIndex> {
    std::optional<BlockIndex> cp;
    if (cps.every) {
      cp = next_every;
    } else if (next_listed < cps.blocks.size()) {
      cp = cps.blocks[next_listed];
    }
    if (cp && config.until && *cp > *config.until) return std::nullopt;
    return cp;
  };
  auto emit_next = [&] {
    const BlockIndex k = *next_checkpoint();
    if (cps.every) {
      next_every += *cps.every;
    } else {
      ++next_listed;
    }
    if (clusters.num_scripts() == 0) {
      ++skipped_rows;
      return;
    }
    const ClusteringRatio ratio = RatioOf(clusters);
    report.rows.push_back({k, ratio.scripts, ratio.clusters, ratio.value(),
                           merges_applied, tx_processed});
    spdlog::debug("checkpoint {}: {} scripts, {} clusters, ratio {:.6f}", k,
                  ratio.scripts, ratio.clusters, ratio.value());
  };

  // Round-output skips are tallied per block.
  std::optional<BlockIndex> exponent_block;
  bool exponent_usable = false;
  const bool tally_round = UsesPrices(kind);

  std::vector<MergeProposal> proposals;
  std::vector<ScriptId> scripts;
  bool done = false;
  while (!done && stream.NextBatch(raw)) {
    ingest_batch();
    if (config.until) {
      auto past = std::find_if(txs.begin(), txs.end(), [&](const auto& tx) {
        return tx.block > *config.until;
      });
      if (past != txs.end()) {
        txs.erase(past, txs.end());
        done = true;
      }
    }
    const bool precomputed = !needs_online;
    if (precomputed) {
      proposals = threads > 1 ? EvaluateParallel(evaluator, txs, threads)
                              : EvaluateSerial(evaluator, txs);
    }
    for (std::size_t i = 0; i < txs.size(); ++i) {
      const Transaction& tx = txs[i];
      while (auto cp = next_checkpoint()) {
        if (*cp >= tx.block) break;
        emit_next();
      }
      scripts.clear();
      for (const Txo& txo : tx.inputs) scripts.push_back(txo.script);
      for (const Txo& txo : tx.outputs) scripts.push_back(txo.script);
      clusters.Register(scripts);

      MergeProposal local;
      if (!precomputed) {
        online.Record(tx);
        local = evaluator.Evaluate(tx);
      }
      const MergeProposal& proposal = precomputed ? proposals[i] : local;

      if (tally_round && HasRoundShape(tx)) {
        if (exponent_block != tx.block) {
          const auto exponent = evaluator.ExponentAt(tx.block);
          exponent_usable =
              exponent && *exponent > config.params.precision_offset;
          exponent_block = tx.block;
        }
        if (!exponent_usable) ++round_skipped;
      }

      if (!proposal.empty()) {
        std::size_t removed = 0;
        for (const MergeGroup& group : proposal.groups) {
          removed += clusters.Merge(group.scripts);
        }
        if (removed > 0) ++merges_applied;
        if (observer) observer(proposal);
      }
      ++tx_processed;
      last_processed = tx.block;
    }
  }

  if (last_processed) {
    while (auto cp = next_checkpoint()) {
      if (cps.every && *cp >= *last_processed + *cps.every) break;
      emit_next();
    }
  }
  if (skipped_rows > 0) {
    spdlog::warn("{} checkpoint(s) before the first script were skipped",
                 skipped_rows);
  }

  result.ingest = ingestor.stats();
  auto& meta = report.metadata;
  meta["heuristic"] = std::string(HeuristicName(kind));
  meta["parameters"] = {
      {"a", config.params.min_deposit_inputs},
      {"x", config.params.small_amount_usd.ToString()},
      {"j", config.params.precision_offset},
  };
  nlohmann::ordered_json horizon_meta;
  if (UsesReuse(kind)) {
    horizon_meta["mode"] = std::string(HorizonName(horizon));
    horizon_meta["block"] =
        fixed_horizon ? nlohmann::ordered_json(*fixed_horizon) : nullptr;
    horizon_meta["counting"] = std::string(CountingName(counting));
  } else {
    horizon_meta["mode"] = "none";
  }
  meta["horizon"] = horizon_meta;
  meta["coinjoin_predicate"] = evaluator.coinjoin().description();
  meta["checkpoints"] = cps.ToString();
  meta["until"] = config.until ? nlohmann::ordered_json(*config.until)
                               : nlohmann::ordered_json(nullptr);
  meta["counts"] = {
      {"tx_processed", tx_processed},
      {"coinbase_dropped", result.ingest.coinbase_dropped},
      {"merges_applied", merges_applied},
      {"round_skipped", round_skipped},
      {"num_scripts", clusters.num_scripts()},
      {"num_clusters", clusters.num_clusters()},
  };
  return result;
}

void CompareRuns(std::span<const NamedReport> reports, std::ostream& out) {
  if (reports.empty()) ThrowUsage("no-reports", "nothing to compare");
  const auto& base = reports.front().report.rows;
  for (const NamedReport& named : reports) {
    const auto& rows = named.report.rows;
    bool same = rows.size() == base.size();
    for (std::size_t i = 0; same && i < rows.size(); ++i) {
      same = rows[i].block == base[i].block;
    }
    if (!same) {
      ThrowData("checkpoint-mismatch", "report '" + named.name +
                                           "' has different checkpoints");
    }
  }
  out << "block_index";
  for (const NamedReport& named : reports) out << ',' << named.name;
  out << '\n';
  for (std::size_t i = 0; i < base.size(); ++i) {
    out << base[i].block;
    for (const NamedReport& named : reports) {
      out << fmt::format(",{:.6f}", named.report.rows[i].ratio);
    }
    out << '\n';
  }
}

}  // namespace entityforge
