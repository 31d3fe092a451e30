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

// Merge heuristics. Each one is a pure function of a transaction and an
// explicit context that proposes zero or more groups of scripts to merge.
//
// Notation used below: |in| and |out| are the number of input and output
// TXOs, n_in and n_out the number of distinct input and output scripts.

#ifndef ENTITYFORGE_HEURISTICS_H_
#define ENTITYFORGE_HEURISTICS_H_

#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "entityforge/chain_model.h"
#include "entityforge/pricing.h"
#include "entityforge/reuse_index.h"

namespace entityforge {

enum class HeuristicKind {
  kCommonInput,
  kCoinJoinResistant,
  kChangeAddress,
  kRoundOutput,
  kForceMerge,
  kServiceDeposit,
  kShadowAddress,
  kOneTimeChange,
  kReuseChange,
  kCombined,
};

inline constexpr HeuristicKind kAllHeuristics[] = {
    HeuristicKind::kCommonInput,    HeuristicKind::kCoinJoinResistant,
    HeuristicKind::kChangeAddress,  HeuristicKind::kRoundOutput,
    HeuristicKind::kForceMerge,     HeuristicKind::kServiceDeposit,
    HeuristicKind::kShadowAddress,  HeuristicKind::kOneTimeChange,
    HeuristicKind::kReuseChange,    HeuristicKind::kCombined,
};

// Stable CLI names: cio, cio-cj, change, round, force-merge, deposit,
// shadow, one-time-change, reuse-change, combined.
std::string_view HeuristicName(HeuristicKind kind);
HeuristicKind ParseHeuristic(std::string_view name);

bool UsesReuse(HeuristicKind kind);
bool UsesPrices(HeuristicKind kind);
// Horizon used when the caller does not pick one.
HorizonMode DefaultHorizon(HeuristicKind kind);

struct MergeGroup {
  HeuristicKind source;
  std::vector<ScriptId> scripts;  // sorted, distinct, size >= 1

  friend bool operator==(const MergeGroup&, const MergeGroup&) = default;
};

struct MergeProposal {
  std::string txid;
  std::vector<MergeGroup> groups;

  bool empty() const { return groups.empty(); }

  friend bool operator==(const MergeProposal&, const MergeProposal&) =
      default;
};

class CoinJoinPredicate {
 public:
  using Fn = std::function<bool(const Transaction&)>;

  CoinJoinPredicate(Fn fn, std::string description)
      : fn_(std::move(fn)), description_(std::move(description)) {}

  // Flags n_in >= 2, n_out >= 2 and two distinct output scripts carrying
  // exactly the same value.
  static CoinJoinPredicate Default();

  bool operator()(const Transaction& tx) const { return fn_(tx); }
  const std::string& description() const { return description_; }

 private:
  Fn fn_;
  std::string description_;
};

bool LooksLikeEqualOutputCoinJoin(const Transaction& tx);

struct HeuristicConfig {
  int min_deposit_inputs = 25;                   // a
  Decimal small_amount_usd = Decimal::FromInteger(1);  // x
  int precision_offset = 1;                      // j
  std::optional<HorizonMode> horizon;  // nullopt: DefaultHorizon()
  ReuseCounting counting = ReuseCounting::kProtection;

  // Throws a config error unless a >= 2, x > 0 and j >= 0.
  void Validate() const;
};

// Common-input-ownership: n_in >= 2 merges all input scripts.
MergeProposal CommonInput(const Transaction& tx);

// Common-input-ownership unless `is_coinjoin` flags the transaction.
MergeProposal CoinJoinResistant(const Transaction& tx,
                                const CoinJoinPredicate& is_coinjoin);

// Change address: |in| = 1, |out| = n_out = 2, input not reused, exactly
// one output not reused (change), the other reused (payment). Merges the
// input script with the change script.
MergeProposal ChangeAddress(const Transaction& tx, const ReuseIndex& reuse);

// Round output value: |in| = 1, |out| = n_out = 2, input not reused,
// exactly one output that is not reused and a multiple of 10^exponent
// (payment), and the other output not a multiple of 10^(exponent - offset).
// Merges the input script with the non-round output's script. Throws a
// config error unless 0 <= offset < exponent.
MergeProposal RoundOutput(const Transaction& tx, const ReuseIndex& reuse,
                          int exponent, int offset);

// Forced merge of inputs: |in| = n_in >= 2, |out| = n_out = 2 with distinct
// values, no input reused, the smaller output (change) not reused, and
// v_in - min input value < larger output value. Merges all inputs and the
// change script.
MergeProposal ForceMerge(const Transaction& tx, const ReuseIndex& reuse);

// Service deposit sweep: n_in >= min_inputs and n_out = 1.
MergeProposal ServiceDeposit(const Transaction& tx, int min_inputs);

// Shadow address: |out| = n_out = 2, exactly one output never used before
// (count < 2, its own use included), the other used before. Merges the
// inputs with the shadow output.
MergeProposal ShadowAddress(const Transaction& tx, const ReuseIndex& reuse);

// One-time change: no input script among the outputs and exactly one
// output never used before. Merges the inputs with it.
MergeProposal OneTimeChange(const Transaction& tx, const ReuseIndex& reuse);

// Reuse-based change: like OneTimeChange, but the candidate must be used
// exactly once over the whole dataset. Requires a Fixed index.
MergeProposal ReuseChange(const Transaction& tx, const ReuseIndex& full);

struct CombinedContext {
  const CoinJoinPredicate* is_coinjoin = nullptr;
  const ReuseIndex* reuse = nullptr;
  // Rounding exponent at the transaction's block; nullopt without price.
  std::optional<int> exponent;
  int offset = 1;
};

// CoinJoin-resistant C-I-O, change address, round output value and forced
// merge, concatenated. The round part is skipped when the exponent is
// unknown or not above the offset.
MergeProposal Combined(const Transaction& tx, const CombinedContext& ctx);

}  // namespace entityforge

#endif  // ENTITYFORGE_HEURISTICS_H_
