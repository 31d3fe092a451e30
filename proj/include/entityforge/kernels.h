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

// Data-parallel batch kernels (OpenMP) and their serial references.
// Each parallel kernel produces exactly the serial kernel's result.

#ifndef ENTITYFORGE_KERNELS_H_
#define ENTITYFORGE_KERNELS_H_

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "entityforge/chain_model.h"
#include "entityforge/engine.h"
#include "entityforge/reuse_index.h"

namespace entityforge {

// JSONL decoding. `line_numbers[i]` labels `lines[i]` in error messages;
// the error for the lowest failing line is rethrown.
void DecodeLinesSerial(std::span<const std::string> lines,
                       std::span<const std::uint64_t> line_numbers,
                       std::span<RawTransaction> out);
void DecodeLinesParallel(std::span<const std::string> lines,
                         std::span<const std::uint64_t> line_numbers,
                         std::span<RawTransaction> out, int threads);

// Heuristic evaluation over a batch against immutable contexts.
std::vector<MergeProposal> EvaluateSerial(const Evaluator& evaluator,
                                          std::span<const Transaction> txs);
std::vector<MergeProposal> EvaluateParallel(const Evaluator& evaluator,
                                            std::span<const Transaction> txs,
                                            int threads);

// Reuse counting over a batch into a dense count array.
void CountUsesSerial(std::span<const Transaction> txs, ReuseCounting counting,
                     std::vector<std::uint32_t>& counts);
void CountUsesParallel(std::span<const Transaction> txs,
                       ReuseCounting counting,
                       std::vector<std::uint32_t>& counts, int threads);

// Threads requested by the caller, clamped to [1, available].
int EffectiveThreads(int requested);

}  // namespace entityforge

#endif  // ENTITYFORGE_KERNELS_H_
