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

// JSON-Lines transaction streams.
//
// One object per line:
//   {"txid": "...", "block": 12, "inputs": [{"script": "...", "value": 5}],
//    "outputs": [{"script": "...", "value": 4}]}
// Values are satoshis. Records must be sorted by block. Files ending in
// ".gz" are read through zlib.

#ifndef ENTITYFORGE_TX_STREAM_H_
#define ENTITYFORGE_TX_STREAM_H_

#include <cstdint>
#include <memory>
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "entityforge/chain_model.h"

namespace entityforge {

// Parses one JSONL record. `line_no` is 1-based and only used in messages.
RawTransaction ParseTransactionLine(std::string_view line,
                                    std::uint64_t line_no);

// Serializes one record without the trailing newline. Field order is
// txid, block, inputs, outputs.
std::string FormatTransactionLine(const RawTransaction& tx);

// A re-readable source of raw records. The engine makes two passes over
// the stream when a heuristic needs a fixed reuse horizon.
class TxStream {
 public:
  virtual ~TxStream() = default;

  virtual void Rewind() = 0;

  // Replaces `batch` with the next records; false once exhausted.
  virtual bool NextBatch(std::vector<RawTransaction>& batch) = 0;
};

struct DecodeOptions {
  int threads = 1;
  std::size_t batch_size = 8192;
};

class JsonlTxStream final : public TxStream {
 public:
  explicit JsonlTxStream(std::string path, DecodeOptions options = {});
  ~JsonlTxStream() override;

  JsonlTxStream(const JsonlTxStream&) = delete;
  JsonlTxStream& operator=(const JsonlTxStream&) = delete;

  void Rewind() override;
  bool NextBatch(std::vector<RawTransaction>& batch) override;

  const std::string& path() const { return path_; }

 private:
  bool ReadLine(std::string& line);

  std::string path_;
  DecodeOptions options_;
  void* file_ = nullptr;  // gzFile
  std::uint64_t line_no_ = 0;
  std::vector<std::string> lines_;
  std::vector<std::uint64_t> line_numbers_;
};

class MemoryTxStream final : public TxStream {
 public:
  explicit MemoryTxStream(std::vector<RawTransaction> records,
                          std::size_t batch_size = 1024)
      : records_(std::move(records)), batch_size_(batch_size) {}

  void Rewind() override { pos_ = 0; }
  bool NextBatch(std::vector<RawTransaction>& batch) override;

 private:
  std::vector<RawTransaction> records_;
  std::size_t batch_size_;
  std::size_t pos_ = 0;
};

void WriteJsonl(std::ostream& out, std::span<const RawTransaction> records);

// Reads a whole stream into memory, interned and grouped by block.
std::vector<Block> ReadBlocks(TxStream& stream, Ingestor& ingestor);

}  // namespace entityforge

#endif  // ENTITYFORGE_TX_STREAM_H_
