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

#include <gtest/gtest.h>

#include <random>
#include <sstream>

#include "entityforge/error.h"
#include "test_util.h"

namespace entityforge {
namespace {

constexpr ScriptId A = 0, B = 1, C = 2;

Transaction Tx(BlockIndex block, std::vector<Txo> in, std::vector<Txo> out) {
  Transaction tx;
  tx.txid = "t" + std::to_string(block);
  tx.block = block;
  tx.inputs = std::move(in);
  tx.outputs = std::move(out);
  return tx;
}

std::vector<Transaction> Ingested(const std::vector<RawTransaction>& raws) {
  ScriptTable table;
  Ingestor ingestor(table);
  std::vector<Transaction> txs;
  for (const auto& r : raws) {
    if (auto tx = ingestor.Ingest(r)) txs.push_back(std::move(*tx));
  }
  return txs;
}

bool SameCounts(const ReuseIndex& a, const ReuseIndex& b) {
  const std::size_t n = std::max(a.counts().size(), b.counts().size());
  for (ScriptId id = 0; id < n; ++id) {
    if (a.Count(id) != b.Count(id)) return false;
  }
  return true;
}

TEST(AppearanceCountingTest, EachDistinctScriptCountedOnce) {
  ReuseIndex index = ReuseIndex::Online(ReuseCounting::kAppearance);
  index.Record(Tx(1, {{A, 5}}, {{B, 2}, {C, 2}}));
  EXPECT_EQ(index.Count(A), 1u);
  EXPECT_EQ(index.Count(B), 1u);
  EXPECT_EQ(index.Count(C), 1u);
}

TEST(AppearanceCountingTest, SpendingMakesReused) {
  ReuseIndex index = ReuseIndex::Online(ReuseCounting::kAppearance);
  index.Record(Tx(1, {{A, 5}}, {{B, 2}, {C, 2}}));
  index.Record(Tx(2, {{B, 2}}, {{C, 1}}));
  EXPECT_EQ(index.Count(B), 2u);
  EXPECT_TRUE(index.Reused(B));
}

TEST(AppearanceCountingTest, DuplicateOnOneSideCountsOnce) {
  ReuseIndex index = ReuseIndex::Online(ReuseCounting::kAppearance);
  index.Record(Tx(1, {{A, 5}}, {{B, 2}, {B, 2}}));
  EXPECT_EQ(index.Count(B), 1u);
}

TEST(AppearanceCountingTest, BothSidesCountSeparately) {
  ReuseIndex index = ReuseIndex::Online(ReuseCounting::kAppearance);
  index.Record(Tx(1, {{A, 5}}, {{A, 2}, {B, 2}}));
  EXPECT_EQ(index.Count(A), 2u);
}

TEST(ProtectionCountingTest, OnlyLockedOutputsCount) {
  ReuseIndex index = ReuseIndex::Online();
  EXPECT_EQ(index.counting(), ReuseCounting::kProtection);
  index.Record(Tx(1, {{A, 5}}, {{B, 2}, {C, 2}}));
  EXPECT_EQ(index.Count(A), 0u);
  EXPECT_EQ(index.Count(B), 1u);
  // Spending B does not make it reused; receiving again does.
  index.Record(Tx(2, {{B, 2}}, {{C, 1}}));
  EXPECT_EQ(index.Count(B), 1u);
  EXPECT_FALSE(index.Reused(B));
  EXPECT_TRUE(index.Reused(C));
}

TEST(ProtectionCountingTest, DuplicateOutputCountsOnce) {
  ReuseIndex index = ReuseIndex::Online();
  index.Record(Tx(1, {{A, 5}}, {{B, 2}, {B, 2}}));
  EXPECT_EQ(index.Count(B), 1u);
}

TEST(ReusedTest, Threshold) {
  ReuseIndex index = ReuseIndex::Online(ReuseCounting::kAppearance);
  EXPECT_FALSE(index.Reused(C));  // count 0, unknown id
  index.Record(Tx(1, {{A, 1}}, {{C, 1}}));
  EXPECT_FALSE(index.Reused(C));  // count 1
  index.Record(Tx(2, {{A, 1}}, {{C, 1}}));
  EXPECT_TRUE(index.Reused(C));  // count 2
}

std::vector<Block> TwoBlockStream() {
  return GroupIntoBlocks({Tx(10, {{B, 5}}, {{A, 4}}), Tx(20, {{A, 4}}, {{C, 3}}),
                          Tx(20, {{C, 3}}, {{A, 2}})});
}

TEST(BuildFixedTest, HorizonCutsLaterBlocks) {
  const auto blocks = TwoBlockStream();
  EXPECT_EQ(BuildFixed(blocks, 15, ReuseCounting::kAppearance).Count(A), 1u);
  EXPECT_EQ(BuildFixed(blocks, 15).Count(A), 1u);
}

TEST(BuildFixedTest, HorizonPastEnd) {
  const auto blocks = TwoBlockStream();
  EXPECT_EQ(BuildFixed(blocks, 25, ReuseCounting::kAppearance).Count(A), 3u);
  EXPECT_EQ(BuildFixed(blocks, 25).Count(A), 2u);
}

TEST(BuildFixedTest, HorizonBeforeFirstBlock) {
  const ReuseIndex index = BuildFixed(TwoBlockStream(), 5);
  for (ScriptId id : {A, B, C}) EXPECT_EQ(index.Count(id), 0u);
  EXPECT_EQ(index.mode(), HorizonMode::kFixed);
  EXPECT_EQ(index.horizon(), 5u);
}

TEST(BuildFixedTest, UnsortedStreamIsError) {
  FixedReuseBuilder builder(100, ReuseCounting::kProtection);
  builder.Add(Tx(20, {{A, 1}}, {{B, 1}}));
  try {
    builder.Add(Tx(10, {{A, 1}}, {{B, 1}}));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), "unsorted-stream");
  }
}

TEST(BuildFixedTest, RecordOnFixedIsModeError) {
  ReuseIndex index = BuildFixed(TwoBlockStream(), 25);
  try {
    index.Record(Tx(30, {{A, 1}}, {{B, 1}}));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), "horizon-mode");
  }
}

TEST(ReuseIndexTest, CsvListsNonZeroCounts) {
  ReuseIndex index = ReuseIndex::Online();
  index.Record(Tx(1, {{A, 5}}, {{C, 2}}));
  std::ostringstream out;
  index.WriteCsv(out);
  EXPECT_EQ(out.str(), "script_id,count\n2,1\n");
}

TEST(ReuseIndexTest, NamesRoundTrip) {
  for (auto mode : {HorizonMode::kOnline, HorizonMode::kFixed}) {
    EXPECT_EQ(ParseHorizon(HorizonName(mode)), mode);
  }
  for (auto c : {ReuseCounting::kProtection, ReuseCounting::kAppearance}) {
    EXPECT_EQ(ParseCounting(CountingName(c)), c);
  }
  EXPECT_THROW(ParseHorizon("later"), Error);
  EXPECT_THROW(ParseCounting("often"), Error);
}

// Property: Online advanced through block K equals Fixed(K), for every K
// in the stream and both counting policies.
TEST(ReuseIndexProperty, OnlineEqualsFixedAtEveryHorizon) {
  std::mt19937_64 rng(31);
  for (int trial = 0; trial < 40; ++trial) {
    const auto txs = Ingested(testing::ChaosStream(rng, {.transactions = 300}));
    const auto blocks = GroupIntoBlocks(txs);
    for (auto counting : {ReuseCounting::kProtection, ReuseCounting::kAppearance}) {
      ReuseIndex online = ReuseIndex::Online(counting);
      for (const Block& block : blocks) {
        for (const Transaction& tx : block.transactions) online.Record(tx);
        const ReuseIndex fixed = BuildFixed(blocks, block.index, counting);
        ASSERT_TRUE(SameCounts(online, fixed)) << "K=" << block.index;
      }
    }
  }
}

// Property: reused at horizon K stays reused at every later horizon.
TEST(ReuseIndexProperty, KnowledgeIsMonotone) {
  std::mt19937_64 rng(32);
  for (int trial = 0; trial < 20; ++trial) {
    const auto blocks = GroupIntoBlocks(
        Ingested(testing::ChaosStream(rng, {.transactions = 200})));
    std::vector<ReuseIndex> horizons;
    for (const Block& b : blocks) horizons.push_back(BuildFixed(blocks, b.index));
    for (std::size_t k = 1; k < horizons.size(); ++k) {
      for (ScriptId id = 0; id < horizons[k - 1].counts().size(); ++id) {
        ASSERT_LE(horizons[k - 1].Count(id), horizons[k].Count(id));
        if (horizons[k - 1].Reused(id)) ASSERT_TRUE(horizons[k].Reused(id));
      }
    }
  }
}

// Property: the batched (and threaded) builder matches one-by-one adds,
// including when the horizon falls inside a batch.
TEST(ReuseIndexProperty, BatchBuilderMatchesSequential) {
  std::mt19937_64 rng(33);
  for (int trial = 0; trial < 20; ++trial) {
    const auto txs = Ingested(testing::ChaosStream(rng, {.transactions = 500}));
    const BlockIndex horizon = txs[txs.size() / 2].block;
    for (auto counting : {ReuseCounting::kProtection, ReuseCounting::kAppearance}) {
      FixedReuseBuilder one(horizon, counting);
      for (const auto& tx : txs) one.Add(tx);
      for (int threads : {1, 4}) {
        FixedReuseBuilder batched(horizon, counting, threads);
        std::span<const Transaction> all(txs);
        for (std::size_t at = 0; at < all.size(); at += 37) {
          batched.AddBatch(all.subspan(at, std::min<std::size_t>(37, all.size() - at)));
        }
        FixedReuseBuilder copy = one;
        ASSERT_TRUE(SameCounts(std::move(copy).Finish(),
                               std::move(batched).Finish()));
      }
    }
  }
}

}  // namespace
}  // namespace entityforge
