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

// Script usage counts behind the "has (not) been reused" conditions.
//
// Two counting policies:
//   kProtection  one count per transaction in which the script locks an
//                output, i.e. the number of TXOs it has protected (ignoring
//                duplicates inside one transaction).
//   kAppearance  one count per transaction side (inputs, outputs) on which
//                the script appears; spending a TXO counts as a use.
// reused(s) <=> count(s) >= 2 under either policy.
//
// Two horizons: Online counts grow as the engine replays the stream;
// Fixed(K) is precomputed over every block <= K and immutable.

#ifndef ENTITYFORGE_REUSE_INDEX_H_
#define ENTITYFORGE_REUSE_INDEX_H_

#include <cstdint>
#include <optional>
#include <ostream>
#include <span>
#include <string_view>
#include <vector>

#include "entityforge/chain_model.h"

namespace entityforge {

enum class HorizonMode { kOnline, kFixed };
enum class ReuseCounting { kProtection, kAppearance };

std::string_view HorizonName(HorizonMode mode);
HorizonMode ParseHorizon(std::string_view name);
std::string_view CountingName(ReuseCounting counting);
ReuseCounting ParseCounting(std::string_view name);

class ReuseIndex {
 public:
  static ReuseIndex Online(ReuseCounting counting = ReuseCounting::kProtection);

  // Adds one transaction's uses. Online mode only.
  void Record(const Transaction& tx);

  std::uint32_t Count(ScriptId id) const {
    return id < counts_.size() ? counts_[id] : 0;
  }
  bool Reused(ScriptId id) const { return Count(id) >= 2; }

  HorizonMode mode() const { return mode_; }
  ReuseCounting counting() const { return counting_; }
  // Last block covered by a Fixed index.
  BlockIndex horizon() const { return horizon_; }

  std::span<const std::uint32_t> counts() const { return counts_; }

  // `script_id,count` for every id with a non-zero count.
  void WriteCsv(std::ostream& out) const;

 private:
  friend class FixedReuseBuilder;

  ReuseIndex(HorizonMode mode, ReuseCounting counting, BlockIndex horizon)
      : mode_(mode), counting_(counting), horizon_(horizon) {}

  HorizonMode mode_;
  ReuseCounting counting_;
  BlockIndex horizon_;
  std::vector<std::uint32_t> counts_;
};

// Applies one transaction's uses to a dense count array (grown as needed).
void AddUses(const Transaction& tx, ReuseCounting counting,
             std::vector<std::uint32_t>& counts);

// Accumulates a Fixed(K) index from a block-sorted stream. Transactions
// past the horizon are ignored; a block index going backwards throws
// "unsorted-stream".
class FixedReuseBuilder {
 public:
  FixedReuseBuilder(BlockIndex horizon, ReuseCounting counting,
                    int threads = 1);

  void Add(const Transaction& tx);
  void AddBatch(std::span<const Transaction> txs);

  ReuseIndex Finish() &&;

 private:
  bool Admit(const Transaction& tx);

  ReuseIndex index_;
  int threads_;
  std::optional<BlockIndex> last_block_;
};

ReuseIndex BuildFixed(std::span<const Block> blocks, BlockIndex horizon,
                      ReuseCounting counting = ReuseCounting::kProtection);

}  // namespace entityforge

#endif  // ENTITYFORGE_REUSE_INDEX_H_
