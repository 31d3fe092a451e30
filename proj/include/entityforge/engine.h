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

// Block-by-block clustering replay with checkpointed ratio reports.

#ifndef ENTITYFORGE_ENGINE_H_
#define ENTITYFORGE_ENGINE_H_

#include <cstdint>
#include <functional>
#include <istream>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

#include "entityforge/chain_model.h"
#include "entityforge/cluster_store.h"
#include "entityforge/heuristics.h"
#include "entityforge/pricing.h"
#include "entityforge/reuse_index.h"
#include "entityforge/tx_stream.h"

namespace entityforge {

// Either every multiple of `every` (up to the first multiple at or past
// the last processed block) or an explicit strictly increasing list.
struct CheckpointSpec {
  std::optional<BlockIndex> every;
  std::vector<BlockIndex> blocks;

  // "100000" or "100,250,900".
  static CheckpointSpec Parse(std::string_view text);
  std::string ToString() const;
};

struct RunConfig {
  HeuristicKind heuristic = HeuristicKind::kCommonInput;
  HeuristicConfig params;
  CheckpointSpec checkpoints{100000, {}};
  // Stop clustering after this block. The fixed reuse horizon is not
  // affected.
  std::optional<BlockIndex> until;
  // Fixed horizon K; defaults to the last block of the stream.
  std::optional<BlockIndex> horizon_block;
  int threads = 1;
};

// Per-transaction heuristic dispatch with all contexts bound. Evaluate()
// is const and thread-safe once the bound reuse indexes stop changing.
class Evaluator {
 public:
  Evaluator(HeuristicKind kind, const HeuristicConfig& params,
            const PriceSeries* prices, const ReuseIndex* reuse);

  MergeProposal Evaluate(const Transaction& tx) const;

  // Rounding exponent at `block`; nullopt without a price.
  std::optional<int> ExponentAt(BlockIndex block) const;

  HeuristicKind kind() const { return kind_; }
  const CoinJoinPredicate& coinjoin() const { return coinjoin_; }

 private:
  HeuristicKind kind_;
  HeuristicConfig params_;
  const PriceSeries* prices_;
  const ReuseIndex* reuse_;
  CoinJoinPredicate coinjoin_;
};

struct ReportRow {
  BlockIndex block = 0;
  std::uint64_t num_scripts = 0;
  std::uint64_t num_clusters = 0;
  double ratio = 0;
  std::uint64_t merges_applied = 0;
  std::uint64_t tx_processed = 0;
};

struct RatioReport {
  std::vector<ReportRow> rows;
  nlohmann::ordered_json metadata;

  // Header `block_index,num_scripts,num_clusters,ratio,merges_applied,
  // tx_processed`; ratio printed with six decimals.
  void WriteCsv(std::ostream& out) const;
  static RatioReport ReadCsv(std::istream& in);
};

struct RunResult {
  RatioReport report;
  ClusterSet clusters;
  ScriptTable scripts;
  IngestStats ingest;
};

// Sees every non-empty proposal, in application order.
using ProposalObserver = std::function<void(const MergeProposal&)>;

// Replays `stream` through the selected heuristic. Errors: unsorted
// stream, bad configuration, "missing-prices" when a price-driven
// heuristic has no series.
RunResult Run(const RunConfig& config, TxStream& stream,
              const PriceSeries* prices,
              const ProposalObserver& observer = {});

struct NamedReport {
  std::string name;
  RatioReport report;
};

// Wide CSV: `block_index,<name>...` with one ratio column per report.
// Throws "checkpoint-mismatch" unless every report has the same blocks.
void CompareRuns(std::span<const NamedReport> reports, std::ostream& out);

}  // namespace entityforge

#endif  // ENTITYFORGE_ENGINE_H_
