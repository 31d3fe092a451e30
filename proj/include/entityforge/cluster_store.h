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

#ifndef ENTITYFORGE_CLUSTER_STORE_H_
#define ENTITYFORGE_CLUSTER_STORE_H_

#include <cstdint>
#include <istream>
#include <ostream>
#include <span>
#include <vector>

#include "entityforge/chain_model.h"

namespace entityforge {

// Partition of the registered scripts, kept as a union-find forest over
// the dense ScriptId space (union by rank, path halving). New scripts
// enter as singletons.
class ClusterSet {
 public:
  ClusterSet() = default;

  void Register(ScriptId id);
  void Register(std::span<const ScriptId> ids);

  // Consolidates every cluster that contains one of `ids` (registering
  // unseen ids first). Returns how many clusters disappeared.
  std::size_t Merge(std::span<const ScriptId> ids);

  // Throws a data error when either id is unregistered.
  bool SameCluster(ScriptId a, ScriptId b);

  // Representative of `id`'s cluster. Compresses paths.
  ScriptId Find(ScriptId id);
  // Same, without mutating; safe for concurrent readers.
  ScriptId FindConst(ScriptId id) const;

  bool IsRegistered(ScriptId id) const {
    return id < parent_.size() && parent_[id] != kNoScript;
  }

  std::uint64_t num_scripts() const { return num_scripts_; }
  std::uint64_t num_clusters() const { return num_clusters_; }

  // Size of the id domain (max registered id + 1).
  std::size_t domain_size() const { return parent_.size(); }

  // Label per id in [0, domain_size): the minimum member id of its
  // cluster, or kNoScript for unregistered ids.
  std::vector<ScriptId> CanonicalLabels() const;

  friend bool operator==(const ClusterSet& a, const ClusterSet& b) {
    return a.CanonicalLabels() == b.CanonicalLabels();
  }

 private:
  std::vector<ScriptId> parent_;
  std::vector<std::uint8_t> rank_;
  std::uint64_t num_scripts_ = 0;
  std::uint64_t num_clusters_ = 0;
};

// |C| / |S| kept exactly, with the float view for reports.
struct ClusteringRatio {
  std::uint64_t clusters = 0;
  std::uint64_t scripts = 0;

  double value() const {
    return static_cast<double>(clusters) / static_cast<double>(scripts);
  }
};

// Throws "undefined-ratio" when no script is registered.
ClusteringRatio RatioOf(const ClusterSet& clusters);

// Cluster count implied by a script count and a ratio.
double ImpliedClusterCount(double scripts, double ratio);

// `script_id,cluster_id` with the canonical min-member label.
void WriteSnapshotCsv(const ClusterSet& clusters, std::ostream& out);
ClusterSet ReadSnapshotCsv(std::istream& in);

// "ECLS1", little-endian u64 count, then u64 labels in script-id order.
// Unregistered ids are written as all-ones.
void WriteSnapshotBinary(const ClusterSet& clusters, std::ostream& out);
ClusterSet ReadSnapshotBinary(std::istream& in);

// True iff every cluster of `fine` lies inside one cluster of `coarse`.
// Both are CanonicalLabels()-style vectors; ids missing from either side
// must be missing from both.
bool Refines(std::span<const ScriptId> fine, std::span<const ScriptId> coarse);

}  // namespace entityforge

#endif  // ENTITYFORGE_CLUSTER_STORE_H_
