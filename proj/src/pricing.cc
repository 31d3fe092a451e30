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

#include "entityforge/pricing.h"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <sstream>

#include "entityforge/error.h"

namespace entityforge {

Decimal::Decimal(std::string digits, int exponent)
    : digits_(std::move(digits)), exponent_(exponent) {
  const auto first = digits_.find_first_not_of('0');
  if (first == std::string::npos) {
    digits_ = "0";
    exponent_ = 0;
    return;
  }
  digits_.erase(0, first);
  const auto last = digits_.find_last_not_of('0');
  exponent_ += static_cast<int>(digits_.size() - 1 - last);
  digits_.erase(last + 1);
}

Decimal Decimal::Parse(std::string_view text) {
  auto fail = [&]() -> Decimal {
    ThrowData("bad-decimal", "not a decimal number: '" + std::string(text) +
                                 "'");
  };
  std::string_view s = text;
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  if (s.empty()) return fail();

  std::string_view mantissa = s;
  int exp = 0;
  if (auto e = s.find_first_of("eE"); e != std::string_view::npos) {
    mantissa = s.substr(0, e);
    std::string_view exp_text = s.substr(e + 1);
    if (!exp_text.empty() && exp_text.front() == '+') exp_text.remove_prefix(1);
    if (exp_text.empty()) return fail();
    auto [ptr, ec] =
        std::from_chars(exp_text.data(), exp_text.data() + exp_text.size(), exp);
    if (ec != std::errc() || ptr != exp_text.data() + exp_text.size()) {
      return fail();
    }
    if (exp > 100000 || exp < -100000) return fail();
  }

  std::string digits;
  int frac_len = 0;
  bool seen_point = false;
  for (char c : mantissa) {
    if (c == '.') {
      if (seen_point) return fail();
      seen_point = true;
    } else if (std::isdigit(static_cast<unsigned char>(c))) {
      digits.push_back(c);
      if (seen_point) ++frac_len;
    } else {
      return fail();
    }
  }
  if (digits.empty()) return fail();
  return Decimal(std::move(digits), exp - frac_len);
}

Decimal Decimal::FromInteger(std::uint64_t value) {
  return Decimal(std::to_string(value), 0);
}

Decimal Decimal::ScaledByPow10(int power) const {
  if (is_zero()) return *this;
  return Decimal(digits_, exponent_ + power);
}

double Decimal::ToDouble() const {
  return std::stod(digits_ + "e" + std::to_string(exponent_));
}

std::string Decimal::ToString() const {
  if (exponent_ >= 0) return digits_ + std::string(exponent_, '0');
  const auto frac = static_cast<std::size_t>(-exponent_);
  if (frac >= digits_.size()) {
    return "0." + std::string(frac - digits_.size(), '0') + digits_;
  }
  return digits_.substr(0, digits_.size() - frac) + "." +
         digits_.substr(digits_.size() - frac);
}

namespace {

// Compares 0.a and 0.b digit-wise.
std::strong_ordering CompareFractions(const std::string& a,
                                      const std::string& b) {
  const std::size_t n = std::max(a.size(), b.size());
  for (std::size_t i = 0; i < n; ++i) {
    const char ca = i < a.size() ? a[i] : '0';
    const char cb = i < b.size() ? b[i] : '0';
    if (ca != cb) return ca <=> cb;
  }
  return std::strong_ordering::equal;
}

// Position just past the leading digit: value in [10^(m-1), 10^m).
long Magnitude(const Decimal& d) {
  return static_cast<long>(d.exponent()) + static_cast<long>(d.digits().size());
}

}  // namespace

std::strong_ordering operator<=>(const Decimal& a, const Decimal& b) {
  if (a.is_zero() || b.is_zero()) {
    return static_cast<int>(!a.is_zero()) <=> static_cast<int>(!b.is_zero());
  }
  if (auto c = Magnitude(a) <=> Magnitude(b); c != 0) return c;
  return CompareFractions(a.digits(), b.digits());
}

int RoundingExponent(const Decimal& price_per_satoshi, const Decimal& budget) {
  if (price_per_satoshi.is_zero() || budget.is_zero()) {
    ThrowConfig("non-positive", "price and budget must be positive");
  }
  // 10^i0 * price has the budget's magnitude; then one digit-wise compare
  // decides between i0 and i0 - 1.
  const long i0 = Magnitude(budget) - Magnitude(price_per_satoshi);
  const bool fits =
      CompareFractions(price_per_satoshi.digits(), budget.digits()) <= 0;
  return static_cast<int>(fits ? i0 : i0 - 1);
}

PriceSeries::PriceSeries(std::vector<Entry> entries)
    : entries_(std::move(entries)) {
  for (std::size_t i = 0; i < entries_.size(); ++i) {
    if (entries_[i].usd_per_btc.is_zero()) {
      ThrowData("bad-price", "price at block " +
                                 std::to_string(entries_[i].block) +
                                 " must be positive");
    }
    if (i > 0 && entries_[i].block <= entries_[i - 1].block) {
      ThrowData("bad-price", "price blocks must be strictly increasing (" +
                                 std::to_string(entries_[i].block) + ")");
    }
  }
}

namespace {

std::vector<std::string> SplitCsv(std::string line) {
  if (!line.empty() && line.back() == '\r') line.pop_back();
  std::vector<std::string> fields;
  std::stringstream ss(line);
  std::string field;
  while (std::getline(ss, field, ',')) fields.push_back(field);
  if (!line.empty() && line.back() == ',') fields.emplace_back();
  return fields;
}

BlockIndex ParseBlock(const std::string& text) {
  BlockIndex v = 0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || ptr != text.data() + text.size() || text.empty()) {
    ThrowData("bad-price", "bad block index '" + text + "'");
  }
  return v;
}

}  // namespace

PriceSeries PriceSeries::FromCsv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) ThrowData("bad-price", "empty price file");
  auto header = SplitCsv(line);
  if (header.size() < 2 || header[0] != "block_index" ||
      header[1] != "usd_per_btc") {
    ThrowData("bad-price", "expected header block_index,usd_per_btc");
  }
  std::vector<Entry> entries;
  while (std::getline(in, line)) {
    auto fields = SplitCsv(line);
    if (fields.empty() || (fields.size() == 1 && fields[0].empty())) continue;
    if (fields.size() < 2) ThrowData("bad-price", "short row '" + line + "'");
    entries.push_back({ParseBlock(fields[0]), Decimal::Parse(fields[1])});
  }
  return PriceSeries(std::move(entries));
}

PriceSeries PriceSeries::FromDatedCsv(std::istream& prices,
                                      std::istream& mapping) {
  std::string line;
  if (!std::getline(prices, line) ||
      SplitCsv(line) != std::vector<std::string>{"date", "usd_per_btc"}) {
    ThrowData("bad-price", "expected header date,usd_per_btc");
  }
  std::vector<std::pair<std::string, Decimal>> dated;
  while (std::getline(prices, line)) {
    auto fields = SplitCsv(line);
    if (fields.empty() || (fields.size() == 1 && fields[0].empty())) continue;
    if (fields.size() != 2) ThrowData("bad-price", "short row '" + line + "'");
    dated.emplace_back(fields[0], Decimal::Parse(fields[1]));
  }
  std::sort(dated.begin(), dated.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });

  if (!std::getline(mapping, line) ||
      SplitCsv(line) != std::vector<std::string>{"block_index", "date"}) {
    ThrowData("bad-price", "expected mapping header block_index,date");
  }
  std::vector<Entry> entries;
  while (std::getline(mapping, line)) {
    auto fields = SplitCsv(line);
    if (fields.empty() || (fields.size() == 1 && fields[0].empty())) continue;
    if (fields.size() != 2) ThrowData("bad-price", "short row '" + line + "'");
    // ISO dates order lexicographically.
    auto it = std::upper_bound(
        dated.begin(), dated.end(), fields[1],
        [](const std::string& d, const auto& row) { return d < row.first; });
    if (it == dated.begin()) continue;
    entries.push_back({ParseBlock(fields[0]), std::prev(it)->second});
  }
  return PriceSeries(std::move(entries));
}

PriceSeries PriceSeries::FromFile(const std::string& path) {
  std::ifstream in(path);
  if (!in) ThrowIo("open", "cannot open price file " + path);
  return FromCsv(in);
}

std::optional<Decimal> PriceSeries::UsdPerBtc(BlockIndex block) const {
  auto it = std::upper_bound(
      entries_.begin(), entries_.end(), block,
      [](BlockIndex b, const Entry& e) { return b < e.block; });
  if (it == entries_.begin()) return std::nullopt;
  return std::prev(it)->usd_per_btc;
}

std::optional<Decimal> SatoshiPrice(const PriceSeries& series,
                                    BlockIndex block) {
  auto usd = series.UsdPerBtc(block);
  if (!usd) return std::nullopt;
  return usd->ScaledByPow10(-8);
}

std::vector<ExponentPoint> ExponentSeries(const PriceSeries& series,
                                          const Decimal& budget,
                                          std::span<const BlockIndex> blocks,
                                          std::size_t* omitted) {
  std::vector<ExponentPoint> points;
  std::size_t missing = 0;
  for (BlockIndex block : blocks) {
    auto price = SatoshiPrice(series, block);
    if (!price) {
      ++missing;
      continue;
    }
    points.push_back({block, RoundingExponent(*price, budget)});
  }
  if (omitted != nullptr) *omitted = missing;
  return points;
}

}  // namespace entityforge
