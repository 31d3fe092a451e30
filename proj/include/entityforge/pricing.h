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

// Per-block satoshi prices and the rounding exponent of round payments.

#ifndef ENTITYFORGE_PRICING_H_
#define ENTITYFORGE_PRICING_H_

#include <compare>
#include <cstdint>
#include <istream>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "entityforge/chain_model.h"

namespace entityforge {

// Exact non-negative decimal: digits * 10^exponent. `digits` has no
// leading or trailing zeros ("0" with exponent 0 for zero), so equal values
// have equal representations.
class Decimal {
 public:
  Decimal() : digits_("0"), exponent_(0) {}

  // Accepts "12", "12.5", ".5", "1e-7", "5E-4", "0.0001". Rejects signs
  // other than a leading '+', thousands separators and empty input.
  static Decimal Parse(std::string_view text);
  static Decimal FromInteger(std::uint64_t value);

  bool is_zero() const { return digits_ == "0"; }
  const std::string& digits() const { return digits_; }
  int exponent() const { return exponent_; }

  Decimal ScaledByPow10(int power) const;
  double ToDouble() const;
  std::string ToString() const;

  friend std::strong_ordering operator<=>(const Decimal& a, const Decimal& b);
  friend bool operator==(const Decimal& a, const Decimal& b) = default;

 private:
  Decimal(std::string digits, int exponent);

  std::string digits_;
  int exponent_;
};

class PriceSeries {
 public:
  struct Entry {
    BlockIndex block = 0;
    Decimal usd_per_btc;
  };

  // Entries must have strictly increasing blocks and positive prices.
  explicit PriceSeries(std::vector<Entry> entries);

  // Header `block_index,usd_per_btc`.
  static PriceSeries FromCsv(std::istream& in);
  // Header `date,usd_per_btc` plus a `block_index,date` mapping. Each
  // mapped block takes the latest price dated at or before its date.
  static PriceSeries FromDatedCsv(std::istream& prices, std::istream& mapping);
  static PriceSeries FromFile(const std::string& path);

  // Step interpolation: the latest entry at or before `block`.
  std::optional<Decimal> UsdPerBtc(BlockIndex block) const;

  std::span<const Entry> entries() const { return entries_; }

 private:
  std::vector<Entry> entries_;
};

// Dollars per satoshi at `block`, or nullopt before the first entry.
std::optional<Decimal> SatoshiPrice(const PriceSeries& series,
                                    BlockIndex block);

// Largest integer i with 10^i * price <= budget, computed exactly. Both
// arguments must be positive. May be negative.
int RoundingExponent(const Decimal& price_per_satoshi, const Decimal& budget);

struct ExponentPoint {
  BlockIndex block = 0;
  int exponent = 0;

  friend bool operator==(const ExponentPoint&, const ExponentPoint&) = default;
};

// Blocks without a price are left out and counted in `omitted`.
std::vector<ExponentPoint> ExponentSeries(const PriceSeries& series,
                                          const Decimal& budget,
                                          std::span<const BlockIndex> blocks,
                                          std::size_t* omitted = nullptr);

}  // namespace entityforge

#endif  // ENTITYFORGE_PRICING_H_
