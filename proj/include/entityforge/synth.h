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

// Synthetic wallet simulation with known script ownership, and pairwise
// scoring of a clustering against that ground truth.

#ifndef ENTITYFORGE_SYNTH_H_
#define ENTITYFORGE_SYNTH_H_

#include <cstdint>
#include <istream>
#include <ostream>
#include <string>
#include <vector>

#include "json.hpp"

#include "entityforge/chain_model.h"
#include "entityforge/cluster_store.h"

namespace entityforge {

struct SynthParams {
  int num_users = 200;
  // The first `num_services` users run deposit services.
  int num_services = 2;
  BlockIndex start_block = 1;
  int num_blocks = 100;
  int txs_per_block = 20;

  Satoshis funding_min = 1'000'000;
  Satoshis funding_max = 100'000'000;
  Satoshis fee_min = 150;
  Satoshis fee_max = 5'000;

  double fresh_change_prob = 0.9;
  // Chance a payee receives on its already-used public address.
  double address_reuse_prob = 0.3;
  // Chance a payment is too large for any single UTXO of the payer.
  double consolidation_prob = 0.1;
  double coinjoin_rate = 0.02;
  int coinjoin_participants = 3;
  // Share of payments that go to a service's per-customer deposit address.
  double deposit_rate = 0.1;
  // A service sweeps once it holds this many distinct deposit scripts.
  int sweep_min_inputs = 25;
  double round_payment_rate = 0.5;
  int round_exponent = 4;

  static SynthParams FromJson(const nlohmann::json& j);
  nlohmann::ordered_json ToJson() const;

  // Throws a config error ("infeasible-params") on unusable settings.
  void Validate() const;
};

struct GroundTruth {
  // Owner per script id, in the ids the engine assigns on ingestion.
  std::vector<std::uint32_t> user_of;

  void WriteCsv(std::ostream& out) const;  // `script_id,user_id`
  static GroundTruth ReadCsv(std::istream& in);
};

struct SynthDataset {
  std::vector<RawTransaction> transactions;
  GroundTruth truth;
  nlohmann::ordered_json summary;  // transaction counts per kind
};

// Deterministic in (seed, params). User 0 is the funding faucet.
SynthDataset Generate(std::uint64_t seed, const SynthParams& params);

// Writes <prefix>.jsonl, <prefix>.truth.csv and <prefix>.meta.json.
void WriteDataset(const SynthDataset& data, std::uint64_t seed,
                  const SynthParams& params, const std::string& prefix);

struct ScoreMetrics {
  double precision = 1.0;
  double recall = 1.0;
  std::uint64_t collapsed_clusters = 0;  // clusters spanning >= 2 users
  std::uint64_t clusters = 0;
  std::uint64_t same_cluster_pairs = 0;
  std::uint64_t same_user_pairs = 0;
  std::uint64_t agreeing_pairs = 0;

  nlohmann::ordered_json ToJson() const;
};

// Pairwise precision/recall over script pairs. Precision with no
// same-cluster pair is 1.0; likewise recall with no same-user pair.
// Throws "script-mismatch" when the id sets differ.
ScoreMetrics Score(const ClusterSet& partition, const GroundTruth& truth);

}  // namespace entityforge

#endif  // ENTITYFORGE_SYNTH_H_
