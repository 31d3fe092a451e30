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

#include <gtest/gtest.h>

#include <boost/multiprecision/cpp_int.hpp>
#include <cmath>
#include <random>
#include <sstream>

#include "entityforge/error.h"

namespace entityforge {
namespace {

using boost::multiprecision::cpp_int;

Decimal D(const char* text) { return Decimal::Parse(text); }

cpp_int Pow10(int n) {
  cpp_int v = 1;
  for (int k = 0; k < n; ++k) v *= 10;
  return v;
}

// Exact check of 10^i * p <= x with p = dp*10^ep and x = dx*10^ex, all in
// big integers.
bool Holds(const cpp_int& dp, int ep, const cpp_int& dx, int ex, int i) {
  const int t = i + ep - ex;
  return t >= 0 ? dp * Pow10(t) <= dx : dp <= dx * Pow10(-t);
}

// Oracle: start from the floating estimate, then walk with exact checks.
int OracleExponent(const std::string& p_digits, int ep,
                   const std::string& x_digits, int ex) {
  const cpp_int dp(p_digits), dx(x_digits);
  const double estimate =
      std::log10(std::stod(x_digits)) + ex - std::log10(std::stod(p_digits)) - ep;
  int i = static_cast<int>(std::floor(estimate));
  while (!Holds(dp, ep, dx, ex, i)) --i;
  while (Holds(dp, ep, dx, ex, i + 1)) ++i;
  return i;
}

TEST(DecimalTest, ParsesCommonForms) {
  EXPECT_EQ(D("12.50").ToString(), "12.5");
  EXPECT_EQ(D(".5").ToString(), "0.5");
  EXPECT_EQ(D("1e-7").ToString(), "0.0000001");
  EXPECT_EQ(D("5E-4"), D("0.0005"));
  EXPECT_EQ(D("+3e+2"), D("300"));
  EXPECT_EQ(D("0.000"), D("0"));
  EXPECT_TRUE(D("0e5").is_zero());
  EXPECT_EQ(D("1200").digits(), "12");
  EXPECT_EQ(D("1200").exponent(), 2);
}

TEST(DecimalTest, RejectsJunk) {
  for (const char* bad : {"", "-1", "1,000", "1.2.3", "e5", "1e", "abc", "1e5x",
                          " 1", "."}) {
    EXPECT_THROW(D(bad), Error) << bad;
  }
}

TEST(DecimalTest, OrderingIsNumeric) {
  EXPECT_LT(D("0.0009"), D("0.001"));
  EXPECT_LT(D("99"), D("100"));
  EXPECT_GT(D("1.01"), D("1"));
  EXPECT_LT(D("0"), D("1e-30"));
  EXPECT_EQ(D("10").ScaledByPow10(-1), D("1"));
  EXPECT_DOUBLE_EQ(D("2.5e3").ToDouble(), 2500.0);
}

TEST(SatoshiPriceTest, TenThousandDollars) {
  const PriceSeries s({{1, D("10000")}});
  EXPECT_EQ(SatoshiPrice(s, 1), D("1e-4"));
}

TEST(SatoshiPriceTest, FiftyThousandDollars) {
  const PriceSeries s({{1, D("50000")}});
  EXPECT_EQ(SatoshiPrice(s, 7), D("5e-4"));
}

TEST(SatoshiPriceTest, BeforeFirstEntryHasNoPrice) {
  const PriceSeries s({{100, D("50000")}});
  EXPECT_FALSE(SatoshiPrice(s, 99).has_value());
}

TEST(PriceSeriesTest, StepLookup) {
  const PriceSeries s({{10, D("1")}, {20, D("2")}, {30, D("3")}});
  EXPECT_EQ(s.UsdPerBtc(10), D("1"));
  EXPECT_EQ(s.UsdPerBtc(19), D("1"));
  EXPECT_EQ(s.UsdPerBtc(20), D("2"));
  EXPECT_EQ(s.UsdPerBtc(1000), D("3"));
}

TEST(PriceSeriesTest, RejectsBadEntries) {
  EXPECT_THROW(PriceSeries({{10, D("1")}, {10, D("2")}}), Error);
  EXPECT_THROW(PriceSeries({{10, D("1")}, {5, D("2")}}), Error);
  EXPECT_THROW(PriceSeries({{10, D("0")}}), Error);
}

TEST(PriceSeriesTest, CsvLoader) {
  std::istringstream in("block_index,usd_per_btc,source\r\n5,12.5,x\n\n9,1e3,y\n");
  const PriceSeries s = PriceSeries::FromCsv(in);
  ASSERT_EQ(s.entries().size(), 2u);
  EXPECT_EQ(s.UsdPerBtc(9), D("1000"));
  std::istringstream bad("block,usd\n1,2\n");
  EXPECT_THROW(PriceSeries::FromCsv(bad), Error);
  std::istringstream thousands("block_index,usd_per_btc\n1,\"1,000\"\n");
  EXPECT_THROW(PriceSeries::FromCsv(thousands), Error);
}

TEST(PriceSeriesTest, DatedLoaderUsesLatestDateAtOrBefore) {
  std::istringstream prices(
      "date,usd_per_btc\n2012-01-02,6\n2012-01-01,5\n2012-01-05,7\n");
  std::istringstream mapping(
      "block_index,date\n100,2011-12-31\n160,2012-01-01\n170,2012-01-03\n"
      "180,2012-01-05\n");
  const PriceSeries s = PriceSeries::FromDatedCsv(prices, mapping);
  ASSERT_EQ(s.entries().size(), 3u);  // block 100 predates every price
  EXPECT_FALSE(s.UsdPerBtc(100).has_value());
  EXPECT_EQ(s.UsdPerBtc(160), D("5"));
  EXPECT_EQ(s.UsdPerBtc(170), D("6"));
  EXPECT_EQ(s.UsdPerBtc(180), D("7"));
}

TEST(RoundingExponentTest, Examples) {
  EXPECT_EQ(RoundingExponent(D("1e-4"), D("1")), 4);
  EXPECT_EQ(RoundingExponent(D("5e-4"), D("1")), 3);
  EXPECT_EQ(RoundingExponent(D("1e-7"), D("1")), 7);
}

TEST(RoundingExponentTest, NegativeWhenSatoshiExceedsBudget) {
  EXPECT_EQ(RoundingExponent(D("20"), D("1")), -2);
  EXPECT_EQ(RoundingExponent(D("1"), D("1")), 0);
}

TEST(RoundingExponentTest, ZeroIsError) {
  EXPECT_THROW(RoundingExponent(D("0"), D("1")), Error);
  EXPECT_THROW(RoundingExponent(D("1"), D("0")), Error);
}

TEST(RoundingExponentTest, ExactPowersOfTen) {
  for (int e = -30; e <= 30; ++e) {
    for (int f = -5; f <= 5; ++f) {
      const Decimal p = D("1").ScaledByPow10(e);
      const Decimal x = D("1").ScaledByPow10(f);
      ASSERT_EQ(RoundingExponent(p, x), f - e);
      // Just above an exact power of ten drops by one.
      ASSERT_EQ(RoundingExponent(D("1.0000000000000000001").ScaledByPow10(e), x),
                f - e - 1);
    }
  }
}

std::string RandomDigits(std::mt19937_64& rng, int max_len) {
  std::uniform_int_distribution<int> len(1, max_len), digit(0, 9);
  std::string s(static_cast<std::size_t>(len(rng)), '0');
  for (char& c : s) c = static_cast<char>('0' + digit(rng));
  s[0] = static_cast<char>('1' + digit(rng) % 9);
  return s;
}

// Property over 10^5 pairs: the exponent is the unique i with
// 10^i p <= x < 10^(i+1) p, checked against big-integer arithmetic.
TEST(RoundingExponentProperty, MatchesBigIntegerOracle) {
  std::mt19937_64 rng(41);
  std::uniform_int_distribution<int> exp(-25, 25);
  std::uniform_int_distribution<int> mode(0, 3);
  for (int trial = 0; trial < 100000; ++trial) {
    std::string pd = RandomDigits(rng, 18);
    std::string xd = RandomDigits(rng, 18);
    if (mode(rng) == 0) xd = pd;  // exact powers of ten of x/p
    if (mode(rng) == 0) pd = "1" + std::string(pd.size() - 1, '0');
    const int ep = exp(rng), ex = exp(rng);
    const Decimal p = D(pd.c_str()).ScaledByPow10(ep);
    const Decimal x = D(xd.c_str()).ScaledByPow10(ex);
    const int got = RoundingExponent(p, x);
    ASSERT_EQ(got, OracleExponent(pd, ep, xd, ex)) << pd << "e" << ep << " "
                                                   << xd << "e" << ex;
    const cpp_int dp(pd), dx(xd);
    ASSERT_TRUE(Holds(dp, ep, dx, ex, got));
    ASSERT_FALSE(Holds(dp, ep, dx, ex, got + 1));
  }
}

// Property: scaling the price by 10 lowers i by exactly one, scaling the
// budget by 10 raises it by one, and i never increases with the price.
TEST(RoundingExponentProperty, LogLawAndMonotonicity) {
  std::mt19937_64 rng(42);
  std::uniform_int_distribution<int> exp(-12, 4);
  for (int trial = 0; trial < 20000; ++trial) {
    const Decimal p = D(RandomDigits(rng, 10).c_str()).ScaledByPow10(exp(rng));
    const Decimal q = D(RandomDigits(rng, 10).c_str()).ScaledByPow10(exp(rng));
    const Decimal x = D(RandomDigits(rng, 4).c_str()).ScaledByPow10(exp(rng));
    const int i = RoundingExponent(p, x);
    ASSERT_EQ(RoundingExponent(p.ScaledByPow10(1), x), i - 1);
    ASSERT_EQ(RoundingExponent(p, x.ScaledByPow10(1)), i + 1);
    if (p <= q) ASSERT_GE(i, RoundingExponent(q, x));
  }
}

TEST(ExponentSeriesTest, ConstantPriceGivesConstantExponent) {
  const PriceSeries s({{1, D("30000")}});
  const std::vector<BlockIndex> blocks = {1, 50, 900};
  for (const auto& point : ExponentSeries(s, D("1"), blocks)) {
    EXPECT_EQ(point.exponent, 3);
  }
}

TEST(ExponentSeriesTest, TenfoldPriceDropsOneStep) {
  const PriceSeries s({{1, D("4000")}, {2, D("40000")}});
  const std::vector<BlockIndex> blocks = {1, 2};
  const auto points = ExponentSeries(s, D("1"), blocks);
  ASSERT_EQ(points.size(), 2u);
  EXPECT_EQ(points[0].exponent - points[1].exponent, 1);
}

TEST(ExponentSeriesTest, OmitsBlocksWithoutPrice) {
  const PriceSeries s({{10, D("4000")}});
  const std::vector<BlockIndex> blocks = {1, 5, 10, 11};
  std::size_t omitted = 0;
  const auto points = ExponentSeries(s, D("1"), blocks, &omitted);
  EXPECT_EQ(omitted, 2u);
  ASSERT_EQ(points.size(), 2u);
  EXPECT_EQ(points[0].block, 10u);
}

class SamplePricesTest : public ::testing::Test {
 protected:
  PriceSeries series_ =
      PriceSeries::FromFile(std::string(ENTITYFORGE_DATA_DIR) + "/sample_prices.csv");

  int At(BlockIndex block) const {
    return RoundingExponent(*SatoshiPrice(series_, block), D("1"));
  }
};

TEST_F(SamplePricesTest, LateBlocksStayBetweenThreeAndFour) {
  for (BlockIndex b = 600000; b <= 700000; b += 500) {
    const int i = At(b);
    ASSERT_TRUE(i == 3 || i == 4) << b << " -> " << i;
  }
  EXPECT_EQ(At(700000), 3);
}

TEST_F(SamplePricesTest, EarliestPlateauIsSeven) {
  EXPECT_EQ(At(160000), 7);
  EXPECT_FALSE(SatoshiPrice(series_, 159999).has_value());
}

TEST_F(SamplePricesTest, StaircaseBreakpoints) {
  const std::pair<BlockIndex, int> steps[] = {
      {191000, 7}, {192000, 6}, {228000, 6}, {229000, 5}, {231000, 6},
      {232000, 5}, {244000, 6}, {249000, 5}, {445000, 5}, {446000, 4},
      {447000, 5}, {453000, 4}, {497000, 3}, {507000, 4}, {510000, 3},
      {513000, 4}, {582000, 3}, {587000, 4}, {588000, 3}, {592000, 4},
      {593000, 3}, {596000, 4}, {617000, 3}, {619000, 4}, {641000, 3}};
  for (const auto& [block, i] : steps) EXPECT_EQ(At(block), i) << block;
}

}  // namespace
}  // namespace entityforge
