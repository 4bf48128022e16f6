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

#pragma once

#include <compare>
#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>

namespace finkpi {

// Exact base-10 number: coefficient * 10^-scale with a 128-bit coefficient.
// Values are kept normalized (no trailing zeros in the fractional part), so
// structural equality is numeric equality and "16.0" == "16".
//
// Only the operations the pipeline needs are provided: addition,
// subtraction, multiplication, exact halving and power-of-ten shifts. All of
// them are exact; overflow throws Error(kOverflow).
class Decimal {
 public:
  Decimal() = default;
  Decimal(std::int64_t value) : coef_(value) {}  // NOLINT(implicit)

  // Accepts an optional sign, digits with optional comma thousands
  // separators and an optional fractional part ("1,234.50", "-0.5").
  static std::optional<Decimal> try_parse(std::string_view text);
  static Decimal parse(std::string_view text);

  // Shortest decimal that round-trips to `value`.
  static Decimal from_double(double value);
  // `value` rounded to `significant_digits` (1..17) significant digits.
  static Decimal from_double(double value, int significant_digits);

  // 10^exponent, exponent may be negative.
  static Decimal pow10(int exponent);

  Decimal operator+(const Decimal& other) const;
  Decimal operator-(const Decimal& other) const;
  Decimal operator*(const Decimal& other) const;
  Decimal operator-() const;
  Decimal& operator+=(const Decimal& other) { return *this = *this + other; }

  // Exact division by two.
  Decimal half() const;
  // Multiplies by 10^exponent without rounding.
  Decimal shifted(int exponent) const;
  Decimal abs() const { return is_negative() ? -*this : *this; }

  bool is_zero() const { return coef_ == 0; }
  bool is_negative() const { return coef_ < 0; }
  bool is_integer() const { return scale_ == 0; }
  int scale() const { return scale_; }

  std::strong_ordering operator<=>(const Decimal& other) const;
  bool operator==(const Decimal& other) const {
    return coef_ == other.coef_ && scale_ == other.scale_;
  }

  double to_double() const;
  // Plain positional notation, never exponent form.
  std::string to_string() const;
  // Like to_string but with at least `min_fraction_digits` after the point.
  std::string to_string(int min_fraction_digits) const;

 private:
  Decimal(__int128 coef, int scale) : coef_(coef), scale_(scale) {
    normalize();
  }
  void normalize();

  __int128 coef_ = 0;
  int scale_ = 0;
};

// (low + high) / 2, exact.
inline Decimal midpoint(const Decimal& low, const Decimal& high) {
  return (low + high).half();
}

inline std::ostream& operator<<(std::ostream& os, const Decimal& d) {
  return os << d.to_string();
}

}  // namespace finkpi
