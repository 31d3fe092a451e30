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

#include "entityforge/tx_stream.h"

#include <zlib.h>

#include <algorithm>
#include <limits>

#include "json.hpp"

#include "entityforge/error.h"
#include "entityforge/kernels.h"

namespace entityforge {
namespace {

using json = nlohmann::json;

[[noreturn]] void FormatError(std::uint64_t line_no, const std::string& what) {
  ThrowData("format", "line " + std::to_string(line_no) + ": " + what);
}

std::int64_t ReadValue(const json& v, std::uint64_t line_no) {
  if (v.is_number_unsigned()) {
    const auto u = v.get<std::uint64_t>();
    if (u > static_cast<std::uint64_t>(std::numeric_limits<std::int64_t>::max())) {
      FormatError(line_no, "value out of range");
    }
    return static_cast<std::int64_t>(u);
  }
  if (v.is_number_integer()) {
    const auto s = v.get<std::int64_t>();
    if (s < 0) FormatError(line_no, "negative value");
    return s;
  }
  FormatError(line_no, "value must be an integer number of satoshis");
}

std::vector<RawTxo> ReadSide(const json& obj, const char* key,
                             std::uint64_t line_no) {
  auto it = obj.find(key);
  if (it == obj.end() || !it->is_array()) {
    FormatError(line_no, std::string("missing array '") + key + "'");
  }
  std::vector<RawTxo> side;
  side.reserve(it->size());
  for (const json& item : *it) {
    if (!item.is_object()) FormatError(line_no, "TXO must be an object");
    auto script = item.find("script");
    auto value = item.find("value");
    if (script == item.end() || !script->is_string()) {
      FormatError(line_no, "TXO needs a string 'script'");
    }
    if (value == item.end()) FormatError(line_no, "TXO needs a 'value'");
    side.push_back({script->get<std::string>(), ReadValue(*value, line_no)});
  }
  return side;
}

bool IsBlank(std::string_view line) {
  return std::all_of(line.begin(), line.end(), [](char c) {
    return c == ' ' || c == '\t' || c == '\r' || c == '\n';
  });
}

}  // namespace

RawTransaction ParseTransactionLine(std::string_view line,
                                    std::uint64_t line_no) {
  json obj = json::parse(line, nullptr, /*allow_exceptions=*/false);
  if (obj.is_discarded()) FormatError(line_no, "invalid JSON");
  if (!obj.is_object()) FormatError(line_no, "record must be an object");

  RawTransaction tx;
  auto txid = obj.find("txid");
  if (txid == obj.end() || !txid->is_string()) {
    FormatError(line_no, "missing string 'txid'");
  }
  tx.txid = txid->get<std::string>();

  auto block = obj.find("block");
  if (block == obj.end() || !block->is_number_integer() ||
      (!block->is_number_unsigned() && block->get<std::int64_t>() < 0)) {
    FormatError(line_no, "'block' must be a non-negative integer");
  }
  tx.block = block->get<BlockIndex>();
  tx.inputs = ReadSide(obj, "inputs", line_no);
  tx.outputs = ReadSide(obj, "outputs", line_no);
  return tx;
}

std::string FormatTransactionLine(const RawTransaction& tx) {
  nlohmann::ordered_json obj;
  obj["txid"] = tx.txid;
  obj["block"] = tx.block;
  auto side = [](const std::vector<RawTxo>& txos) {
    nlohmann::ordered_json arr = nlohmann::ordered_json::array();
    for (const RawTxo& txo : txos) {
      nlohmann::ordered_json item;
      item["script"] = txo.script;
      item["value"] = txo.value;
      arr.push_back(std::move(item));
    }
    return arr;
  };
  obj["inputs"] = side(tx.inputs);
  obj["outputs"] = side(tx.outputs);
  return obj.dump();
}

JsonlTxStream::JsonlTxStream(std::string path, DecodeOptions options)
    : path_(std::move(path)), options_(options) {
  Rewind();
}

JsonlTxStream::~JsonlTxStream() {
  if (file_ != nullptr) gzclose(static_cast<gzFile>(file_));
}

void JsonlTxStream::Rewind() {
  if (file_ != nullptr) gzclose(static_cast<gzFile>(file_));
  // gzopen reads uncompressed files transparently.
  file_ = gzopen(path_.c_str(), "rb");
  if (file_ == nullptr) ThrowIo("open", "cannot open " + path_);
  gzbuffer(static_cast<gzFile>(file_), 1 << 20);
  line_no_ = 0;
}

bool JsonlTxStream::ReadLine(std::string& line) {
  line.clear();
  char buf[1 << 14];
  auto* gz = static_cast<gzFile>(file_);
  while (gzgets(gz, buf, sizeof(buf)) != nullptr) {
    line.append(buf);
    if (!line.empty() && line.back() == '\n') return true;
  }
  int err = 0;
  gzerror(gz, &err);
  if (err != Z_OK && err != Z_STREAM_END) {
    ThrowIo("read", "read error in " + path_);
  }
  return !line.empty();
}

bool JsonlTxStream::NextBatch(std::vector<RawTransaction>& batch) {
  lines_.clear();
  line_numbers_.clear();
  std::string line;
  while (lines_.size() < options_.batch_size && ReadLine(line)) {
    ++line_no_;
    if (IsBlank(line)) continue;
    lines_.push_back(line);
    line_numbers_.push_back(line_no_);
  }
  batch.assign(lines_.size(), RawTransaction{});
  if (lines_.empty()) return false;
  if (options_.threads > 1) {
    DecodeLinesParallel(lines_, line_numbers_, batch, options_.threads);
  } else {
    DecodeLinesSerial(lines_, line_numbers_, batch);
  }
  return true;
}

bool MemoryTxStream::NextBatch(std::vector<RawTransaction>& batch) {
  batch.clear();
  if (pos_ >= records_.size()) return false;
  const std::size_t end = std::min(records_.size(), pos_ + batch_size_);
  batch.assign(records_.begin() + static_cast<std::ptrdiff_t>(pos_),
               records_.begin() + static_cast<std::ptrdiff_t>(end));
  pos_ = end;
  return true;
}

void WriteJsonl(std::ostream& out, std::span<const RawTransaction> records) {
  for (const RawTransaction& tx : records) {
    out << FormatTransactionLine(tx) << '\n';
  }
}

std::vector<Block> ReadBlocks(TxStream& stream, Ingestor& ingestor) {
  std::vector<Transaction> txs;
  std::vector<RawTransaction> batch;
  while (stream.NextBatch(batch)) {
    for (const RawTransaction& raw : batch) {
      if (auto tx = ingestor.Ingest(raw)) txs.push_back(std::move(*tx));
    }
  }
  return GroupIntoBlocks(std::move(txs));
}

}  // namespace entityforge
