// Copyright 2026 The finkpi Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "finkpi/decimal.hpp"

#include <gtest/gtest.h>

#include <random>

#include "finkpi/error.hpp"

namespace finkpi {
namespace {

TEST(DecimalTest, ParsesGroupedAndFractional) {
  EXPECT_EQ(Decimal::parse("1,234.50").to_string(), "1234.5");
  EXPECT_EQ(Decimal::parse("-0.25").to_string(), "-0.25");
  EXPECT_EQ(Decimal::parse("4.3").to_string(), "4.3");
  EXPECT_EQ(Decimal::parse("16.0"), Decimal(16));
  EXPECT_FALSE(Decimal::try_parse("1,23").has_value());
  EXPECT_FALSE(Decimal::try_parse("12a").has_value());
  EXPECT_FALSE(Decimal::try_parse("").has_value());
  EXPECT_FALSE(Decimal::try_parse("1234,567").has_value());
  EXPECT_THROW(Decimal::parse("abc"), Error);
}

TEST(DecimalTest, ScaleShiftIsExact) {
  Decimal face = Decimal::parse("4.3");
  EXPECT_EQ((face * Decimal::pow10(9)).to_string(), "4300000000");
  EXPECT_EQ(face.shifted(9), Decimal(4300000000LL));
  EXPECT_EQ(Decimal(4300000000LL).shifted(-9), face);
  EXPECT_EQ(Decimal::parse("150").shifted(6).to_string(), "150000000");
}

TEST(DecimalTest, MidpointGolden) {
  EXPECT_EQ(midpoint(Decimal(22), Decimal(24)), Decimal(23));
  EXPECT_EQ(midpoint(Decimal(15), Decimal(17)).to_string(1), "16.0");
  EXPECT_EQ(midpoint(Decimal(1), Decimal(2)).to_string(), "1.5");
}

TEST(DecimalTest, ToStringMinFraction) {
  EXPECT_EQ(Decimal(16).to_string(1), "16.0");
  EXPECT_EQ(Decimal::parse("14.6").to_string(1), "14.6");
  EXPECT_EQ(Decimal::parse("0.05").to_string(), "0.05");
  EXPECT_EQ(Decimal::parse("-0.5").to_string(1), "-0.5");
}

TEST(DecimalTest, FromDoubleRoundTripsShortDecimals) {
  for (const char* s : {"14.6", "0.1", "4300000000", "1.25", "-3.75", "0"}) {
    Decimal d = Decimal::parse(s);
    EXPECT_EQ(Decimal::from_double(d.to_double()), d) << s;
  }
}

TEST(DecimalTest, FromDoubleSignificantDigits) {
  EXPECT_EQ(Decimal::from_double(14.6 - 14.4, 15).to_string(), "0.199999999999999");
  EXPECT_EQ(Decimal::from_double(14.6 - 14.4, 12).to_string(), "0.2");
  EXPECT_EQ(Decimal::from_double(0.1 + 0.2, 15).to_string(), "0.3");
  EXPECT_EQ(Decimal::from_double(4.3e9, 15).to_string(), "4300000000");
  EXPECT_EQ(Decimal::from_double(-1234.5678, 6).to_string(), "-1234.57");
  EXPECT_EQ(Decimal::from_double(0.0, 15).to_string(), "0");
  EXPECT_THROW(Decimal::from_double(1.0, 0), Error);
}

TEST(DecimalTest, OverflowThrows) {
  Decimal big = Decimal::pow10(37);
  EXPECT_THROW(big * big, Error);
}

// Midpoint exactness over random decimal pairs. The oracle works on integer
// coefficients at a common scale: 2 * mid must equal low + high exactly.
TEST(DecimalProperty, MidpointIsExactMean) {
  std::mt19937_64 rng(1234);
  for (int iter = 0; iter < 5000; ++iter) {
    int scale_a = static_cast<int>(rng() % 7);
    int scale_b = static_cast<int>(rng() % 7);
    auto a_coef = static_cast<std::int64_t>(rng() % 2000000001ULL) - 1000000000;
    auto b_coef = static_cast<std::int64_t>(rng() % 2000000001ULL) - 1000000000;
    Decimal a = Decimal(a_coef).shifted(-scale_a);
    Decimal b = Decimal(b_coef).shifted(-scale_b);
    Decimal low = std::min(a, b);
    Decimal high = std::max(a, b);
    Decimal mid = midpoint(low, high);
    EXPECT_EQ(mid + mid, low + high);
    EXPECT_LE(low, mid);
    EXPECT_LE(mid, high);
    // String form round-trips through the parser.
    EXPECT_EQ(Decimal::parse(mid.to_string()), mid);
  }
}

}  // namespace
}  // namespace finkpi
