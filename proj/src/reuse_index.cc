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

#include "entityforge/reuse_index.h"

#include <string>

#include "entityforge/error.h"
#include "entityforge/kernels.h"

namespace entityforge {

std::string_view HorizonName(HorizonMode mode) {
  return mode == HorizonMode::kOnline ? "online" : "fixed";
}

HorizonMode ParseHorizon(std::string_view name) {
  if (name == "online") return HorizonMode::kOnline;
  if (name == "fixed") return HorizonMode::kFixed;
  ThrowUsage("unknown-horizon",
             "unknown horizon '" + std::string(name) + "' (online|fixed)");
}

std::string_view CountingName(ReuseCounting counting) {
  return counting == ReuseCounting::kProtection ? "protection" : "appearance";
}

ReuseCounting ParseCounting(std::string_view name) {
  if (name == "protection") return ReuseCounting::kProtection;
  if (name == "appearance") return ReuseCounting::kAppearance;
  ThrowUsage("unknown-counting", "unknown reuse counting '" +
                                     std::string(name) +
                                     "' (protection|appearance)");
}

namespace {

void BumpDistinct(std::span<const Txo> side,
                  std::vector<std::uint32_t>& counts) {
  for (ScriptId id : DistinctScripts(side)) {
    if (id >= counts.size()) counts.resize(std::size_t{id} + 1, 0);
    ++counts[id];
  }
}

}  // namespace

void AddUses(const Transaction& tx, ReuseCounting counting,
             std::vector<std::uint32_t>& counts) {
  if (counting == ReuseCounting::kAppearance) BumpDistinct(tx.inputs, counts);
  BumpDistinct(tx.outputs, counts);
}

ReuseIndex ReuseIndex::Online(ReuseCounting counting) {
  return ReuseIndex(HorizonMode::kOnline, counting, kMaxBlock);
}

void ReuseIndex::Record(const Transaction& tx) {
  if (mode_ != HorizonMode::kOnline) {
    ThrowConfig("horizon-mode", "cannot record into a fixed reuse index");
  }
  AddUses(tx, counting_, counts_);
}

void ReuseIndex::WriteCsv(std::ostream& out) const {
  out << "script_id,count\n";
  for (std::size_t id = 0; id < counts_.size(); ++id) {
    if (counts_[id] != 0) out << id << ',' << counts_[id] << '\n';
  }
}

FixedReuseBuilder::FixedReuseBuilder(BlockIndex horizon,
                                     ReuseCounting counting, int threads)
    : index_(HorizonMode::kFixed, counting, horizon), threads_(threads) {}

bool FixedReuseBuilder::Admit(const Transaction& tx) {
  if (last_block_ && tx.block < *last_block_) {
    ThrowData("unsorted-stream", "block " + std::to_string(tx.block) +
                                     " after block " +
                                     std::to_string(*last_block_));
  }
  last_block_ = tx.block;
  return tx.block <= index_.horizon_;
}

void FixedReuseBuilder::Add(const Transaction& tx) {
  if (Admit(tx)) AddUses(tx, index_.counting_, index_.counts_);
}

void FixedReuseBuilder::AddBatch(std::span<const Transaction> txs) {
  std::size_t admitted = 0;
  for (const Transaction& tx : txs) {
    if (!Admit(tx)) break;
    ++admitted;
  }
  // The stream is sorted, so admitted transactions form a prefix.
  const auto prefix = txs.first(admitted);
  if (threads_ > 1) {
    CountUsesParallel(prefix, index_.counting_, index_.counts_, threads_);
  } else {
    CountUsesSerial(prefix, index_.counting_, index_.counts_);
  }
  // Keep validating order past the horizon.
  for (const Transaction& tx : txs.subspan(admitted)) Admit(tx);
}

ReuseIndex FixedReuseBuilder::Finish() && { return std::move(index_); }

ReuseIndex BuildFixed(std::span<const Block> blocks, BlockIndex horizon,
                      ReuseCounting counting) {
  FixedReuseBuilder builder(horizon, counting);
  for (const Block& block : blocks) {
    for (const Transaction& tx : block.transactions) builder.Add(tx);
  }
  return std::move(builder).Finish();
}

}  // namespace entityforge
