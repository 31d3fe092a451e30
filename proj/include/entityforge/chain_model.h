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

// Transaction data model: interned locking scripts, TXOs, transactions and
// blocks, plus validation and the per-transaction shape counts the
// heuristics are written against.

#ifndef ENTITYFORGE_CHAIN_MODEL_H_
#define ENTITYFORGE_CHAIN_MODEL_H_

#include <cstdint>
#include <deque>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace entityforge {

using ScriptId = std::uint32_t;
using Satoshis = std::uint64_t;
using BlockIndex = std::uint64_t;

inline constexpr ScriptId kNoScript = std::numeric_limits<ScriptId>::max();
inline constexpr BlockIndex kMaxBlock = std::numeric_limits<BlockIndex>::max();

// Dense interning of script strings. Ids are handed out 0, 1, 2, ... in
// first-observation order and never reused.
class ScriptTable {
 public:
  ScriptTable() = default;
  ScriptTable(const ScriptTable&) = delete;
  ScriptTable& operator=(const ScriptTable&) = delete;
  ScriptTable(ScriptTable&&) = default;
  ScriptTable& operator=(ScriptTable&&) = default;

  // Throws a data error on empty text.
  ScriptId Intern(std::string_view text);
  std::optional<ScriptId> Find(std::string_view text) const;
  std::string_view Text(ScriptId id) const { return texts_.at(id); }
  std::size_t size() const { return texts_.size(); }

 private:
  // deque keeps element addresses stable, so the map can key on views.
  std::deque<std::string> texts_;
  std::unordered_map<std::string_view, ScriptId> ids_;
};

struct Txo {
  ScriptId script = kNoScript;
  Satoshis value = 0;

  friend bool operator==(const Txo&, const Txo&) = default;
};

struct Transaction {
  std::string txid;
  BlockIndex block = 0;
  std::vector<Txo> inputs;
  std::vector<Txo> outputs;

  Satoshis InputValue() const;
  Satoshis OutputValue() const;
  Satoshis Fee() const { return InputValue() - OutputValue(); }

  friend bool operator==(const Transaction&, const Transaction&) = default;
};

struct Block {
  BlockIndex index = 0;
  std::vector<Transaction> transactions;

  friend bool operator==(const Block&, const Block&) = default;
};

struct TxShape {
  std::size_t n_in = 0;  // distinct input scripts
  std::size_t n_out = 0;  // distinct output scripts
  std::size_t in_multiplicity = 0;  // |inputs|
  std::size_t out_multiplicity = 0;  // |outputs|
  Satoshis v_in = 0;
  Satoshis v_out = 0;
};

// Checks the accepted-transaction invariants and returns `tx` unchanged.
// Errors: "coinbase-or-malformed" (no inputs), "malformed" (no outputs),
// "value-inflation" (outputs exceed inputs), "format" (value overflow).
const Transaction& ValidateTransaction(const Transaction& tx);

TxShape ShapeOf(const Transaction& tx);

// Sorted, de-duplicated script ids of one side of a transaction.
std::vector<ScriptId> DistinctScripts(std::span<const Txo> side);

// A transaction as it appears on the wire, before interning.
struct RawTxo {
  std::string script;
  std::int64_t value = 0;

  friend bool operator==(const RawTxo&, const RawTxo&) = default;
};

struct RawTransaction {
  std::string txid;
  BlockIndex block = 0;
  std::vector<RawTxo> inputs;
  std::vector<RawTxo> outputs;

  friend bool operator==(const RawTransaction&, const RawTransaction&) =
      default;
};

RawTransaction ToRaw(const Transaction& tx, const ScriptTable& table);

struct IngestStats {
  std::uint64_t accepted = 0;
  std::uint64_t coinbase_dropped = 0;
};

// Turns raw records into validated, interned transactions. Enforces the
// non-decreasing block order of the stream and drops input-less (coinbase)
// records with a counter.
class Ingestor {
 public:
  explicit Ingestor(ScriptTable& table) : table_(&table) {}

  // Returns nullopt for a dropped coinbase record.
  std::optional<Transaction> Ingest(const RawTransaction& raw);

  // Starts another pass over the same stream; keeps the script table.
  void Restart();

  const IngestStats& stats() const { return stats_; }
  std::optional<BlockIndex> last_block() const { return last_block_; }
  ScriptTable& table() { return *table_; }

 private:
  ScriptTable* table_;
  IngestStats stats_;
  std::optional<BlockIndex> last_block_;
};

// Groups an ordered transaction list into blocks.
std::vector<Block> GroupIntoBlocks(std::vector<Transaction> transactions);

}  // namespace entityforge

#endif  // ENTITYFORGE_CHAIN_MODEL_H_
