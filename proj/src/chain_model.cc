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

#include "entityforge/chain_model.h"

#include <algorithm>

#include "entityforge/error.h"

namespace entityforge {

std::string_view CategoryName(ErrorCategory category) {
  switch (category) {
    case ErrorCategory::kUsage:
      return "usage";
    case ErrorCategory::kConfig:
      return "config";
    case ErrorCategory::kData:
      return "data";
    case ErrorCategory::kIo:
      return "io";
  }
  return "unknown";
}

ScriptId ScriptTable::Intern(std::string_view text) {
  if (text.empty()) ThrowData("empty-script", "empty script text");
  if (auto it = ids_.find(text); it != ids_.end()) return it->second;
  if (texts_.size() >= kNoScript) {
    ThrowData("script-overflow", "script id space exhausted");
  }
  const auto id = static_cast<ScriptId>(texts_.size());
  const std::string& stored = texts_.emplace_back(text);
  ids_.emplace(std::string_view(stored), id);
  return id;
}

std::optional<ScriptId> ScriptTable::Find(std::string_view text) const {
  if (auto it = ids_.find(text); it != ids_.end()) return it->second;
  return std::nullopt;
}

namespace {

// Sums a side, reporting overflow instead of wrapping.
bool SumValues(std::span<const Txo> side, Satoshis& total) {
  total = 0;
  for (const Txo& txo : side) {
    if (__builtin_add_overflow(total, txo.value, &total)) return false;
  }
  return true;
}

Satoshis SumOrThrow(std::span<const Txo> side, const std::string& txid) {
  Satoshis total = 0;
  if (!SumValues(side, total)) {
    ThrowData("format", "transaction " + txid + ": value sum overflows");
  }
  return total;
}

}  // namespace

Satoshis Transaction::InputValue() const { return SumOrThrow(inputs, txid); }

Satoshis Transaction::OutputValue() const {
  return SumOrThrow(outputs, txid);
}

const Transaction& ValidateTransaction(const Transaction& tx) {
  if (tx.inputs.empty()) {
    ThrowData("coinbase-or-malformed",
              "transaction " + tx.txid + " has no inputs");
  }
  if (tx.outputs.empty()) {
    ThrowData("malformed", "transaction " + tx.txid + " has no outputs");
  }
  const Satoshis v_in = tx.InputValue();
  const Satoshis v_out = tx.OutputValue();
  if (v_out > v_in) {
    ThrowData("value-inflation", "transaction " + tx.txid + " spends " +
                                     std::to_string(v_in) + " but creates " +
                                     std::to_string(v_out));
  }
  return tx;
}

std::vector<ScriptId> DistinctScripts(std::span<const Txo> side) {
  std::vector<ScriptId> ids;
  ids.reserve(side.size());
  for (const Txo& txo : side) ids.push_back(txo.script);
  std::sort(ids.begin(), ids.end());
  ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
  return ids;
}

TxShape ShapeOf(const Transaction& tx) {
  TxShape shape;
  shape.in_multiplicity = tx.inputs.size();
  shape.out_multiplicity = tx.outputs.size();
  shape.n_in = DistinctScripts(tx.inputs).size();
  shape.n_out = DistinctScripts(tx.outputs).size();
  shape.v_in = tx.InputValue();
  shape.v_out = tx.OutputValue();
  return shape;
}

RawTransaction ToRaw(const Transaction& tx, const ScriptTable& table) {
  RawTransaction raw;
  raw.txid = tx.txid;
  raw.block = tx.block;
  auto convert = [&](const std::vector<Txo>& side,
                     std::vector<RawTxo>& out) {
    out.reserve(side.size());
    for (const Txo& txo : side) {
      out.push_back({std::string(table.Text(txo.script)),
                     static_cast<std::int64_t>(txo.value)});
    }
  };
  convert(tx.inputs, raw.inputs);
  convert(tx.outputs, raw.outputs);
  return raw;
}

std::optional<Transaction> Ingestor::Ingest(const RawTransaction& raw) {
  if (last_block_ && raw.block < *last_block_) {
    ThrowData("unsorted-stream",
              "transaction " + raw.txid + " at block " +
                  std::to_string(raw.block) + " follows block " +
                  std::to_string(*last_block_));
  }
  last_block_ = raw.block;

  if (raw.inputs.empty()) {
    ++stats_.coinbase_dropped;
    return std::nullopt;
  }

  Transaction tx;
  tx.txid = raw.txid;
  tx.block = raw.block;
  auto convert = [&](const std::vector<RawTxo>& side, std::vector<Txo>& out) {
    out.reserve(side.size());
    for (const RawTxo& txo : side) {
      if (txo.script.empty()) {
        ThrowData("empty-script",
                  "transaction " + raw.txid + " has an empty script");
      }
      if (txo.value < 0) {
        ThrowData("format",
                  "transaction " + raw.txid + " has a negative value");
      }
      out.push_back(
          {table_->Intern(txo.script), static_cast<Satoshis>(txo.value)});
    }
  };
  convert(raw.inputs, tx.inputs);
  convert(raw.outputs, tx.outputs);

  ValidateTransaction(tx);
  ++stats_.accepted;
  return tx;
}

void Ingestor::Restart() {
  stats_ = {};
  last_block_.reset();
}

std::vector<Block> GroupIntoBlocks(std::vector<Transaction> transactions) {
  std::vector<Block> blocks;
  for (Transaction& tx : transactions) {
    if (blocks.empty() || blocks.back().index != tx.block) {
      if (!blocks.empty() && tx.block < blocks.back().index) {
        ThrowData("unsorted-stream", "block " + std::to_string(tx.block) +
                                         " after block " +
                                         std::to_string(blocks.back().index));
      }
      blocks.push_back({tx.block, {}});
    }
    blocks.back().transactions.push_back(std::move(tx));
  }
  return blocks;
}

}  // namespace entityforge
