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

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>

#include "finkpi/error.hpp"

namespace finkpi {
namespace {

constexpr int kMaxScale = 30;

[[noreturn]] void overflow(const char* what) {
  throw Error(ErrorCode::kOverflow, std::string("decimal overflow in ") + what);
}

__int128 mul_checked(__int128 a, __int128 b, const char* what) {
  __int128 out;
  if (__builtin_mul_overflow(a, b, &out)) overflow(what);
  return out;
}

__int128 add_checked(__int128 a, __int128 b, const char* what) {
  __int128 out;
  if (__builtin_add_overflow(a, b, &out)) overflow(what);
  return out;
}

__int128 pow10_int(int n) {
  __int128 p = 1;
  for (int i = 0; i < n; ++i) p = mul_checked(p, 10, "pow10");
  return p;
}

std::string digits_of(__int128 v) {
  // v >= 0
  if (v == 0) return "0";
  std::string out;
  while (v > 0) {
    out.push_back(static_cast<char>('0' + static_cast<int>(v % 10)));
    v /= 10;
  }
  std::reverse(out.begin(), out.end());
  return out;
}

}  // namespace

void Decimal::normalize() {
  while (scale_ > 0 && coef_ % 10 == 0) {
    coef_ /= 10;
    --scale_;
  }
  if (coef_ == 0) scale_ = 0;
  if (scale_ > kMaxScale) overflow("scale");
}

std::optional<Decimal> Decimal::try_parse(std::string_view text) {
  if (text.empty()) return std::nullopt;
  size_t i = 0;
  bool negative = false;
  if (text[0] == '-' || text[0] == '+') {
    negative = text[0] == '-';
    ++i;
  }
  __int128 coef = 0;
  int scale = 0;
  int int_digits = 0;
  int group = -1;  // digits since last comma, -1 when no comma seen
  bool seen_point = false;
  bool any_digit = false;
  for (; i < text.size(); ++i) {
    char c = text[i];
    if (c >= '0' && c <= '9') {
      if (__builtin_mul_overflow(coef, 10, &coef) ||
          __builtin_add_overflow(coef, c - '0', &coef)) {
        return std::nullopt;
      }
      any_digit = true;
      if (seen_point) {
        ++scale;
      } else {
        ++int_digits;
        if (group >= 0) ++group;
      }
    } else if (c == ',' && !seen_point) {
      if (int_digits == 0 || (group >= 0 && group != 3)) return std::nullopt;
      if (group < 0 && int_digits > 3) return std::nullopt;
      group = 0;
    } else if (c == '.' && !seen_point) {
      if (group >= 0 && group != 3) return std::nullopt;
      seen_point = true;
    } else {
      return std::nullopt;
    }
  }
  if (!any_digit) return std::nullopt;
  if (!seen_point && group >= 0 && group != 3) return std::nullopt;
  if (scale > kMaxScale) return std::nullopt;
  return Decimal(negative ? -coef : coef, scale);
}

Decimal Decimal::parse(std::string_view text) {
  auto d = try_parse(text);
  if (!d) {
    throw Error(ErrorCode::kInvalidArgument,
                "not a decimal number: '" + std::string(text) + "'");
  }
  return *d;
}

Decimal Decimal::from_double(double value) {
  if (!std::isfinite(value)) {
    throw Error(ErrorCode::kInvalidArgument, "non-finite value");
  }
  std::array<char, 64> buf{};
  auto res = std::to_chars(buf.data(), buf.data() + buf.size(), value,
                           std::chars_format::fixed);
  if (res.ec != std::errc()) overflow("from_double");
  return parse(std::string_view(buf.data(), res.ptr - buf.data()));
}

Decimal Decimal::from_double(double value, int significant_digits) {
  if (!std::isfinite(value)) {
    throw Error(ErrorCode::kInvalidArgument, "non-finite value");
  }
  if (significant_digits < 1 || significant_digits > 17) {
    throw Error(ErrorCode::kInvalidArgument, "significant digits must be in [1, 17]");
  }
  // "-d.ddde+XX"
  std::array<char, 64> buf{};
  auto res = std::to_chars(buf.data(), buf.data() + buf.size(), value,
                           std::chars_format::scientific, significant_digits - 1);
  if (res.ec != std::errc()) overflow("from_double");
  std::string_view text(buf.data(), res.ptr - buf.data());
  size_t e = text.find('e');
  std::string mantissa;
  for (char c : text.substr(0, e)) {
    if (c != '.') mantissa += c;
  }
  int exponent = std::stoi(std::string(text.substr(e + 1)));
  return parse(mantissa).shifted(exponent - (significant_digits - 1));
}

Decimal Decimal::pow10(int exponent) { return Decimal(1).shifted(exponent); }

Decimal Decimal::operator+(const Decimal& other) const {
  int scale = std::max(scale_, other.scale_);
  __int128 a = mul_checked(coef_, pow10_int(scale - scale_), "add");
  __int128 b = mul_checked(other.coef_, pow10_int(scale - other.scale_), "add");
  return Decimal(add_checked(a, b, "add"), scale);
}

Decimal Decimal::operator-() const { return Decimal(-coef_, scale_); }

Decimal Decimal::operator-(const Decimal& other) const {
  return *this + (-other);
}

Decimal Decimal::operator*(const Decimal& other) const {
  return Decimal(mul_checked(coef_, other.coef_, "mul"),
                 scale_ + other.scale_);
}

Decimal Decimal::half() const {
  // x / 2 == x * 5 / 10
  return Decimal(mul_checked(coef_, 5, "half"), scale_ + 1);
}

Decimal Decimal::shifted(int exponent) const {
  if (exponent >= 0) {
    int drop = std::min(exponent, scale_);
    int grow = exponent - drop;
    return Decimal(mul_checked(coef_, pow10_int(grow), "shift"),
                   scale_ - drop);
  }
  return Decimal(coef_, scale_ - exponent);
}

std::strong_ordering Decimal::operator<=>(const Decimal& other) const {
  int scale = std::max(scale_, other.scale_);
  __int128 a = mul_checked(coef_, pow10_int(scale - scale_), "cmp");
  __int128 b = mul_checked(other.coef_, pow10_int(scale - other.scale_), "cmp");
  if (a < b) return std::strong_ordering::less;
  if (a > b) return std::strong_ordering::greater;
  return std::strong_ordering::equal;
}

double Decimal::to_double() const {
  double out = 0;
  std::string s = to_string();
  std::from_chars(s.data(), s.data() + s.size(), out);
  return out;
}

std::string Decimal::to_string() const { return to_string(0); }

std::string Decimal::to_string(int min_fraction_digits) const {
  __int128 mag = coef_ < 0 ? -coef_ : coef_;
  std::string digits = digits_of(mag);
  int scale = scale_;
  if (scale < min_fraction_digits) {
    digits.append(static_cast<size_t>(min_fraction_digits - scale), '0');
    scale = min_fraction_digits;
  }
  if (static_cast<int>(digits.size()) <= scale) {
    digits.insert(0, static_cast<size_t>(scale - digits.size() + 1), '0');
  }
  std::string out;
  if (coef_ < 0) out.push_back('-');
  size_t int_len = digits.size() - static_cast<size_t>(scale);
  out.append(digits, 0, int_len);
  if (scale > 0) {
    out.push_back('.');
    out.append(digits, int_len, std::string::npos);
  }
  return out;
}

}  // namespace finkpi
