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

#include "entityforge/heuristics.h"

#include <algorithm>
#include <array>

#include "entityforge/error.h"

namespace entityforge {
namespace {

struct NamedKind {
  HeuristicKind kind;
  std::string_view name;
};

constexpr std::array<NamedKind, 10> kNames = {{
    {HeuristicKind::kCommonInput, "cio"},
    {HeuristicKind::kCoinJoinResistant, "cio-cj"},
    {HeuristicKind::kChangeAddress, "change"},
    {HeuristicKind::kRoundOutput, "round"},
    {HeuristicKind::kForceMerge, "force-merge"},
    {HeuristicKind::kServiceDeposit, "deposit"},
    {HeuristicKind::kShadowAddress, "shadow"},
    {HeuristicKind::kOneTimeChange, "one-time-change"},
    {HeuristicKind::kReuseChange, "reuse-change"},
    {HeuristicKind::kCombined, "combined"},
}};

MergeProposal Single(const Transaction& tx, HeuristicKind source,
                     std::vector<ScriptId> scripts) {
  std::sort(scripts.begin(), scripts.end());
  scripts.erase(std::unique(scripts.begin(), scripts.end()), scripts.end());
  MergeProposal proposal;
  proposal.txid = tx.txid;
  proposal.groups.push_back({source, std::move(scripts)});
  return proposal;
}

MergeProposal InputsPlus(const Transaction& tx, HeuristicKind source,
                         ScriptId extra) {
  std::vector<ScriptId> scripts = DistinctScripts(tx.inputs);
  scripts.push_back(extra);
  return Single(tx, source, std::move(scripts));
}

// |out| = n_out = 2.
bool TwoDistinctOutputs(const Transaction& tx) {
  return tx.outputs.size() == 2 &&
         tx.outputs[0].script != tx.outputs[1].script;
}

bool IsMultipleOfPow10(Satoshis value, int exponent) {
  if (exponent <= 0) return true;
  Satoshis pow = 1;
  for (int k = 0; k < exponent; ++k) {
    if (__builtin_mul_overflow(pow, Satoshis{10}, &pow)) return value == 0;
  }
  return value % pow == 0;
}

// The single distinct output script whose count satisfies `fresh`, if
// exactly one does.
template <typename Pred>
std::optional<ScriptId> UniqueFreshOutput(const Transaction& tx, Pred fresh) {
  std::optional<ScriptId> found;
  for (ScriptId id : DistinctScripts(tx.outputs)) {
    if (!fresh(id)) continue;
    if (found) return std::nullopt;
    found = id;
  }
  return found;
}

bool SidesDisjoint(const Transaction& tx) {
  const auto in = DistinctScripts(tx.inputs);
  const auto out = DistinctScripts(tx.outputs);
  std::vector<ScriptId> common;
  std::set_intersection(in.begin(), in.end(), out.begin(), out.end(),
                        std::back_inserter(common));
  return common.empty();
}

void Append(MergeProposal& into, MergeProposal&& from) {
  for (MergeGroup& group : from.groups) into.groups.push_back(std::move(group));
}

}  // namespace

std::string_view HeuristicName(HeuristicKind kind) {
  for (const auto& entry : kNames) {
    if (entry.kind == kind) return entry.name;
  }
  return "unknown";
}

HeuristicKind ParseHeuristic(std::string_view name) {
  for (const auto& entry : kNames) {
    if (entry.name == name) return entry.kind;
  }
  ThrowUsage("unknown-heuristic",
             "unknown heuristic '" + std::string(name) + "'");
}

bool UsesReuse(HeuristicKind kind) {
  switch (kind) {
    case HeuristicKind::kCommonInput:
    case HeuristicKind::kCoinJoinResistant:
    case HeuristicKind::kServiceDeposit:
      return false;
    default:
      return true;
  }
}

bool UsesPrices(HeuristicKind kind) {
  return kind == HeuristicKind::kRoundOutput ||
         kind == HeuristicKind::kCombined;
}

HorizonMode DefaultHorizon(HeuristicKind kind) {
  switch (kind) {
    case HeuristicKind::kShadowAddress:
    case HeuristicKind::kOneTimeChange:
      return HorizonMode::kOnline;
    default:
      return HorizonMode::kFixed;
  }
}

bool LooksLikeEqualOutputCoinJoin(const Transaction& tx) {
  if (DistinctScripts(tx.inputs).size() < 2) return false;
  if (DistinctScripts(tx.outputs).size() < 2) return false;
  std::vector<Txo> outs = tx.outputs;
  std::sort(outs.begin(), outs.end(), [](const Txo& a, const Txo& b) {
    return a.value != b.value ? a.value < b.value : a.script < b.script;
  });
  for (std::size_t k = 1; k < outs.size(); ++k) {
    if (outs[k].value == outs[k - 1].value &&
        outs[k].script != outs[k - 1].script) {
      return true;
    }
  }
  return false;
}

CoinJoinPredicate CoinJoinPredicate::Default() {
  return CoinJoinPredicate(
      LooksLikeEqualOutputCoinJoin,
      "equal-output: n_in >= 2, n_out >= 2 and at least two distinct output "
      "scripts receive exactly the same value");
}

void HeuristicConfig::Validate() const {
  if (min_deposit_inputs < 2) {
    ThrowConfig("bad-parameter", "deposit threshold a must be >= 2");
  }
  if (small_amount_usd.is_zero()) {
    ThrowConfig("bad-parameter", "small amount x must be > 0");
  }
  if (precision_offset < 0) {
    ThrowConfig("bad-parameter", "precision offset j must be >= 0");
  }
}

MergeProposal CommonInput(const Transaction& tx) {
  std::vector<ScriptId> inputs = DistinctScripts(tx.inputs);
  if (inputs.size() < 2) return {};
  return Single(tx, HeuristicKind::kCommonInput, std::move(inputs));
}

MergeProposal CoinJoinResistant(const Transaction& tx,
                                const CoinJoinPredicate& is_coinjoin) {
  if (DistinctScripts(tx.inputs).size() < 2 || is_coinjoin(tx)) return {};
  return Single(tx, HeuristicKind::kCoinJoinResistant,
                DistinctScripts(tx.inputs));
}

MergeProposal ChangeAddress(const Transaction& tx, const ReuseIndex& reuse) {
  if (tx.inputs.size() != 1) return {};
  if (!TwoDistinctOutputs(tx)) return {};
  const ScriptId input = tx.inputs[0].script;
  if (reuse.Reused(input)) return {};
  const bool reused0 = reuse.Reused(tx.outputs[0].script);
  const bool reused1 = reuse.Reused(tx.outputs[1].script);
  // Exactly one fresh output, and the other one reused.
  if (reused0 == reused1) return {};
  const ScriptId change = reused0 ? tx.outputs[1].script : tx.outputs[0].script;
  return Single(tx, HeuristicKind::kChangeAddress, {input, change});
}

MergeProposal RoundOutput(const Transaction& tx, const ReuseIndex& reuse,
                          int exponent, int offset) {
  if (offset < 0 || offset >= exponent) {
    ThrowConfig("bad-parameter",
                "round output needs 0 <= j < i (j=" + std::to_string(offset) +
                    ", i=" + std::to_string(exponent) + ")");
  }
  if (tx.inputs.size() != 1) return {};
  if (!TwoDistinctOutputs(tx)) return {};
  const ScriptId input = tx.inputs[0].script;
  if (reuse.Reused(input)) return {};

  std::optional<std::size_t> pay;
  for (std::size_t k = 0; k < 2; ++k) {
    const Txo& out = tx.outputs[k];
    if (reuse.Reused(out.script) || !IsMultipleOfPow10(out.value, exponent)) {
      continue;
    }
    if (pay) return {};
    pay = k;
  }
  if (!pay) return {};
  const Txo& other = tx.outputs[1 - *pay];
  if (IsMultipleOfPow10(other.value, exponent - offset)) return {};
  return Single(tx, HeuristicKind::kRoundOutput, {input, other.script});
}

MergeProposal ForceMerge(const Transaction& tx, const ReuseIndex& reuse) {
  const std::vector<ScriptId> inputs = DistinctScripts(tx.inputs);
  if (inputs.size() < 2 || inputs.size() != tx.inputs.size()) return {};
  if (!TwoDistinctOutputs(tx)) return {};
  const Txo& a = tx.outputs[0];
  const Txo& b = tx.outputs[1];
  if (a.value == b.value) return {};
  const Txo& high = a.value > b.value ? a : b;
  const Txo& low = a.value > b.value ? b : a;
  for (ScriptId id : inputs) {
    if (reuse.Reused(id)) return {};
  }
  if (reuse.Reused(low.script)) return {};
  Satoshis min_input = tx.inputs[0].value;
  for (const Txo& txo : tx.inputs) min_input = std::min(min_input, txo.value);
  // Dropping the smallest input must leave the payment unfunded.
  if (tx.InputValue() - min_input >= high.value) return {};
  return InputsPlus(tx, HeuristicKind::kForceMerge, low.script);
}

MergeProposal ServiceDeposit(const Transaction& tx, int min_inputs) {
  if (min_inputs < 2) {
    ThrowConfig("bad-parameter", "deposit threshold a must be >= 2");
  }
  std::vector<ScriptId> inputs = DistinctScripts(tx.inputs);
  if (inputs.size() < static_cast<std::size_t>(min_inputs)) return {};
  if (DistinctScripts(tx.outputs).size() != 1) return {};
  return Single(tx, HeuristicKind::kServiceDeposit, std::move(inputs));
}

MergeProposal ShadowAddress(const Transaction& tx, const ReuseIndex& reuse) {
  if (!TwoDistinctOutputs(tx)) return {};
  const bool used0 = reuse.Count(tx.outputs[0].script) >= 2;
  const bool used1 = reuse.Count(tx.outputs[1].script) >= 2;
  if (used0 == used1) return {};
  const ScriptId shadow = used0 ? tx.outputs[1].script : tx.outputs[0].script;
  return InputsPlus(tx, HeuristicKind::kShadowAddress, shadow);
}

MergeProposal OneTimeChange(const Transaction& tx, const ReuseIndex& reuse) {
  if (!SidesDisjoint(tx)) return {};
  auto change =
      UniqueFreshOutput(tx, [&](ScriptId id) { return reuse.Count(id) < 2; });
  if (!change) return {};
  return InputsPlus(tx, HeuristicKind::kOneTimeChange, *change);
}

MergeProposal ReuseChange(const Transaction& tx, const ReuseIndex& full) {
  if (full.mode() != HorizonMode::kFixed) {
    ThrowConfig("horizon-mode",
                "reuse-change needs a fixed-horizon reuse index");
  }
  if (!SidesDisjoint(tx)) return {};
  auto change =
      UniqueFreshOutput(tx, [&](ScriptId id) { return full.Count(id) == 1; });
  if (!change) return {};
  return InputsPlus(tx, HeuristicKind::kReuseChange, *change);
}

MergeProposal Combined(const Transaction& tx, const CombinedContext& ctx) {
  MergeProposal proposal;
  proposal.txid = tx.txid;
  Append(proposal, CoinJoinResistant(tx, *ctx.is_coinjoin));
  Append(proposal, ChangeAddress(tx, *ctx.reuse));
  if (ctx.exponent && *ctx.exponent > ctx.offset && ctx.offset >= 0) {
    Append(proposal, RoundOutput(tx, *ctx.reuse, *ctx.exponent, ctx.offset));
  }
  Append(proposal, ForceMerge(tx, *ctx.reuse));
  return proposal;
}

}  // namespace entityforge
