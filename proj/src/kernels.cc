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

#include "entityforge/kernels.h"

#include <omp.h>

#include <algorithm>
#include <atomic>
#include <exception>
#include <limits>

#include "entityforge/error.h"
#include "entityforge/tx_stream.h"

namespace entityforge {

int EffectiveThreads(int requested) {
  return std::clamp(requested, 1, std::max(1, omp_get_num_procs()));
}

void DecodeLinesSerial(std::span<const std::string> lines,
                       std::span<const std::uint64_t> line_numbers,
                       std::span<RawTransaction> out) {
  for (std::size_t i = 0; i < lines.size(); ++i) {
    out[i] = ParseTransactionLine(lines[i], line_numbers[i]);
  }
}

void DecodeLinesParallel(std::span<const std::string> lines,
                         std::span<const std::uint64_t> line_numbers,
                         std::span<RawTransaction> out, int threads) {
  const auto n = static_cast<std::int64_t>(lines.size());
  // Exceptions may not cross the parallel region; keep the first by line.
  std::int64_t failed_at = std::numeric_limits<std::int64_t>::max();
  std::exception_ptr failure;
#pragma omp parallel for schedule(static) num_threads(threads)
  for (std::int64_t i = 0; i < n; ++i) {
    try {
      out[i] = ParseTransactionLine(lines[i], line_numbers[i]);
    } catch (...) {
#pragma omp critical(entityforge_decode_error)
      {
        if (i < failed_at) {
          failed_at = i;
          failure = std::current_exception();
        }
      }
    }
  }
  if (failure) std::rethrow_exception(failure);
}

std::vector<MergeProposal> EvaluateSerial(const Evaluator& evaluator,
                                          std::span<const Transaction> txs) {
  std::vector<MergeProposal> proposals(txs.size());
  for (std::size_t i = 0; i < txs.size(); ++i) {
    proposals[i] = evaluator.Evaluate(txs[i]);
  }
  return proposals;
}

std::vector<MergeProposal> EvaluateParallel(const Evaluator& evaluator,
                                            std::span<const Transaction> txs,
                                            int threads) {
  std::vector<MergeProposal> proposals(txs.size());
  const auto n = static_cast<std::int64_t>(txs.size());
  std::int64_t failed_at = std::numeric_limits<std::int64_t>::max();
  std::exception_ptr failure;
#pragma omp parallel for schedule(dynamic, 256) num_threads(threads)
  for (std::int64_t i = 0; i < n; ++i) {
    try {
      proposals[i] = evaluator.Evaluate(txs[i]);
    } catch (...) {
#pragma omp critical(entityforge_eval_error)
      {
        if (i < failed_at) {
          failed_at = i;
          failure = std::current_exception();
        }
      }
    }
  }
  if (failure) std::rethrow_exception(failure);
  return proposals;
}

void CountUsesSerial(std::span<const Transaction> txs, ReuseCounting counting,
                     std::vector<std::uint32_t>& counts) {
  for (const Transaction& tx : txs) AddUses(tx, counting, counts);
}

void CountUsesParallel(std::span<const Transaction> txs,
                       ReuseCounting counting,
                       std::vector<std::uint32_t>& counts, int threads) {
  // Size once up front; threads then only increment.
  std::size_t domain = 0;
  for (const Transaction& tx : txs) {
    if (counting == ReuseCounting::kAppearance) {
      for (const Txo& txo : tx.inputs) {
        domain = std::max(domain, std::size_t{txo.script} + 1);
      }
    }
    for (const Txo& txo : tx.outputs) {
      domain = std::max(domain, std::size_t{txo.script} + 1);
    }
  }
  if (counts.size() < domain) counts.resize(domain, 0);

  const auto n = static_cast<std::int64_t>(txs.size());
  std::uint32_t* data = counts.data();
#pragma omp parallel num_threads(threads)
  {
    std::vector<Txo> scratch;
    auto bump = [&](std::span<const Txo> side) {
      scratch.assign(side.begin(), side.end());
      std::sort(scratch.begin(), scratch.end(),
                [](const Txo& a, const Txo& b) { return a.script < b.script; });
      for (std::size_t k = 0; k < scratch.size(); ++k) {
        if (k > 0 && scratch[k].script == scratch[k - 1].script) continue;
        std::atomic_ref<std::uint32_t>(data[scratch[k].script])
            .fetch_add(1, std::memory_order_relaxed);
      }
    };
#pragma omp for schedule(static)
    for (std::int64_t i = 0; i < n; ++i) {
      if (counting == ReuseCounting::kAppearance) bump(txs[i].inputs);
      bump(txs[i].outputs);
    }
  }
}

}  // namespace entityforge
