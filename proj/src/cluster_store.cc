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

#include "entityforge/cluster_store.h"

#include <array>
#include <cstring>
#include <sstream>
#include <string>
#include <unordered_map>

#include "entityforge/error.h"

namespace entityforge {

void ClusterSet::Register(ScriptId id) {
  if (id == kNoScript) ThrowData("bad-script-id", "reserved script id");
  if (id >= parent_.size()) {
    parent_.resize(std::size_t{id} + 1, kNoScript);
    rank_.resize(std::size_t{id} + 1, 0);
  }
  if (parent_[id] == kNoScript) {
    parent_[id] = id;
    ++num_scripts_;
    ++num_clusters_;
  }
}

void ClusterSet::Register(std::span<const ScriptId> ids) {
  for (ScriptId id : ids) Register(id);
}

ScriptId ClusterSet::Find(ScriptId id) {
  // Path halving.
  while (parent_[id] != id) {
    parent_[id] = parent_[parent_[id]];
    id = parent_[id];
  }
  return id;
}

ScriptId ClusterSet::FindConst(ScriptId id) const {
  while (parent_[id] != id) id = parent_[id];
  return id;
}

std::size_t ClusterSet::Merge(std::span<const ScriptId> ids) {
  if (ids.empty()) return 0;
  Register(ids);
  const std::uint64_t before = num_clusters_;
  ScriptId root = Find(ids.front());
  for (ScriptId id : ids.subspan(1)) {
    ScriptId other = Find(id);
    if (other == root) continue;
    if (rank_[root] < rank_[other]) std::swap(root, other);
    parent_[other] = root;
    if (rank_[root] == rank_[other]) ++rank_[root];
    --num_clusters_;
  }
  return static_cast<std::size_t>(before - num_clusters_);
}

bool ClusterSet::SameCluster(ScriptId a, ScriptId b) {
  if (!IsRegistered(a) || !IsRegistered(b)) {
    ThrowData("unregistered-script",
              "script " + std::to_string(IsRegistered(a) ? b : a) +
                  " is not registered");
  }
  return Find(a) == Find(b);
}

std::vector<ScriptId> ClusterSet::CanonicalLabels() const {
  const std::size_t n = parent_.size();
  // min member per root, then label every member with it.
  std::vector<ScriptId> min_of_root(n, kNoScript);
  std::vector<ScriptId> roots(n, kNoScript);
  for (ScriptId id = 0; id < n; ++id) {
    if (parent_[id] == kNoScript) continue;
    const ScriptId root = FindConst(id);
    roots[id] = root;
    if (min_of_root[root] == kNoScript) min_of_root[root] = id;
  }
  std::vector<ScriptId> labels(n, kNoScript);
  for (ScriptId id = 0; id < n; ++id) {
    if (roots[id] != kNoScript) labels[id] = min_of_root[roots[id]];
  }
  return labels;
}

ClusteringRatio RatioOf(const ClusterSet& clusters) {
  if (clusters.num_scripts() == 0) {
    ThrowData("undefined-ratio", "clustering ratio of an empty script set");
  }
  return {clusters.num_clusters(), clusters.num_scripts()};
}

double ImpliedClusterCount(double scripts, double ratio) {
  return scripts * ratio;
}

void WriteSnapshotCsv(const ClusterSet& clusters, std::ostream& out) {
  out << "script_id,cluster_id\n";
  const std::vector<ScriptId> labels = clusters.CanonicalLabels();
  for (ScriptId id = 0; id < labels.size(); ++id) {
    if (labels[id] != kNoScript) out << id << ',' << labels[id] << '\n';
  }
}

namespace {

ClusterSet FromLabels(const std::vector<std::pair<ScriptId, ScriptId>>& rows) {
  ClusterSet set;
  for (const auto& [id, label] : rows) {
    if (set.IsRegistered(id)) {
      ThrowData("bad-snapshot", "script " + std::to_string(id) + " listed twice");
    }
    set.Register(id);
  }
  for (const auto& [id, label] : rows) {
    if (!set.IsRegistered(label)) {
      ThrowData("bad-snapshot", "cluster label " + std::to_string(label) +
                                    " is not a listed script");
    }
    const std::array<ScriptId, 2> pair{id, label};
    set.Merge(pair);
  }
  // A valid snapshot labels each cluster with its minimum member.
  const std::vector<ScriptId> canonical = set.CanonicalLabels();
  for (const auto& [id, label] : rows) {
    if (canonical[id] != label) {
      ThrowData("bad-snapshot",
                "script " + std::to_string(id) + " is labelled " +
                    std::to_string(label) + " but its minimum member is " +
                    std::to_string(canonical[id]));
    }
  }
  return set;
}

ScriptId ParseId(const std::string& field, std::size_t line_no) {
  std::size_t used = 0;
  unsigned long long v = 0;
  try {
    v = std::stoull(field, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != field.size() || v >= kNoScript) {
    ThrowData("bad-snapshot", "line " + std::to_string(line_no) +
                                  ": bad id '" + field + "'");
  }
  return static_cast<ScriptId>(v);
}

}  // namespace

ClusterSet ReadSnapshotCsv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || (line != "script_id,cluster_id" &&
                                  line != "script_id,cluster_id\r")) {
    ThrowData("bad-snapshot", "expected header script_id,cluster_id");
  }
  std::vector<std::pair<ScriptId, ScriptId>> rows;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto comma = line.find(',');
    if (comma == std::string::npos) {
      ThrowData("bad-snapshot", "line " + std::to_string(line_no) +
                                    ": expected two columns");
    }
    rows.emplace_back(ParseId(line.substr(0, comma), line_no),
                      ParseId(line.substr(comma + 1), line_no));
  }
  return FromLabels(rows);
}

namespace {

constexpr char kMagic[5] = {'E', 'C', 'L', 'S', '1'};
constexpr std::uint64_t kUnlabelled = ~std::uint64_t{0};

void PutU64(std::ostream& out, std::uint64_t v) {
  unsigned char bytes[8];
  for (int i = 0; i < 8; ++i) bytes[i] = static_cast<unsigned char>(v >> (8 * i));
  out.write(reinterpret_cast<const char*>(bytes), 8);
}

std::uint64_t GetU64(std::istream& in) {
  unsigned char bytes[8];
  if (!in.read(reinterpret_cast<char*>(bytes), 8)) {
    ThrowData("bad-snapshot", "truncated binary snapshot");
  }
  std::uint64_t v = 0;
  for (int i = 7; i >= 0; --i) v = (v << 8) | bytes[i];
  return v;
}

}  // namespace

void WriteSnapshotBinary(const ClusterSet& clusters, std::ostream& out) {
  const std::vector<ScriptId> labels = clusters.CanonicalLabels();
  out.write(kMagic, sizeof(kMagic));
  PutU64(out, labels.size());
  for (ScriptId label : labels) {
    PutU64(out, label == kNoScript ? kUnlabelled : label);
  }
  if (!out) ThrowIo("write", "failed writing binary snapshot");
}

ClusterSet ReadSnapshotBinary(std::istream& in) {
  char magic[5];
  if (!in.read(magic, 5) || std::memcmp(magic, kMagic, 5) != 0) {
    ThrowData("bad-snapshot", "missing ECLS1 magic");
  }
  const std::uint64_t count = GetU64(in);
  if (count >= kNoScript) ThrowData("bad-snapshot", "count out of range");
  std::vector<std::pair<ScriptId, ScriptId>> rows;
  for (std::uint64_t id = 0; id < count; ++id) {
    const std::uint64_t label = GetU64(in);
    if (label == kUnlabelled) continue;
    if (label >= count) ThrowData("bad-snapshot", "label out of range");
    rows.emplace_back(static_cast<ScriptId>(id), static_cast<ScriptId>(label));
  }
  return FromLabels(rows);
}

bool Refines(std::span<const ScriptId> fine, std::span<const ScriptId> coarse) {
  const std::size_t n = std::max(fine.size(), coarse.size());
  auto at = [](std::span<const ScriptId> v, std::size_t i) {
    return i < v.size() ? v[i] : kNoScript;
  };
  std::unordered_map<ScriptId, ScriptId> image;
  for (std::size_t i = 0; i < n; ++i) {
    const ScriptId f = at(fine, i);
    const ScriptId c = at(coarse, i);
    if ((f == kNoScript) != (c == kNoScript)) {
      ThrowData("domain-mismatch",
                "script " + std::to_string(i) + " is in only one partition");
    }
    if (f == kNoScript) continue;
    auto [it, inserted] = image.emplace(f, c);
    if (!inserted && it->second != c) return false;
  }
  return true;
}

}  // namespace entityforge
