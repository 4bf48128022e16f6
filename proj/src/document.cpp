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

#include "finkpi/document.hpp"

#include <array>
#include <charconv>
#include <cstdio>
#include <utility>

namespace finkpi {
namespace {

template <typename E, size_t N>
std::optional<E> lookup(const std::array<std::pair<E, std::string_view>, N>& table,
                        std::string_view text) {
  for (const auto& [value, name] : table) {
    if (name == text) return value;
  }
  return std::nullopt;
}

template <typename E, size_t N>
std::string_view name_of(const std::array<std::pair<E, std::string_view>, N>& table,
                         E value) {
  for (const auto& [v, name] : table) {
    if (v == value) return name;
  }
  return "?";
}

constexpr std::array<std::pair<SourceKind, std::string_view>, 5> kSourceKinds{{
    {SourceKind::kTenK, "TenK"},
    {SourceKind::kTenQ, "TenQ"},
    {SourceKind::kEightK, "EightK"},
    {SourceKind::kEarningsRelease, "EarningsRelease"},
    {SourceKind::kTranscript, "Transcript"},
}};

constexpr std::array<std::pair<SectionKind, std::string_view>, 4> kSectionKinds{{
    {SectionKind::kNarrative, "Narrative"},
    {SectionKind::kTable, "Table"},
    {SectionKind::kHeader, "Header"},
    {SectionKind::kBoilerplate, "Boilerplate"},
}};

constexpr std::array<std::pair<SpanKind, std::string_view>, 6> kSpanKinds{{
    {SpanKind::kScalar, "Scalar"},
    {SpanKind::kRange, "Range"},
    {SpanKind::kPercent, "Percent"},
    {SpanKind::kPercentRange, "PercentRange"},
    {SpanKind::kCurrency, "Currency"},
    {SpanKind::kCurrencyRange, "CurrencyRange"},
}};

bool is_leap(int y) { return (y % 4 == 0 && y % 100 != 0) || y % 400 == 0; }

int days_in_month(int y, int m) {
  static constexpr int kDays[] = {31, 28, 31, 30, 31, 30, 31, 31, 30, 31, 30, 31};
  return m == 2 && is_leap(y) ? 29 : kDays[m - 1];
}

}  // namespace

std::string_view to_string(SourceKind kind) { return name_of(kSourceKinds, kind); }
std::string_view to_string(SectionKind kind) { return name_of(kSectionKinds, kind); }
std::string_view to_string(SpanKind kind) { return name_of(kSpanKinds, kind); }

std::optional<SourceKind> parse_source_kind(std::string_view text) {
  return lookup(kSourceKinds, text);
}
std::optional<SectionKind> parse_section_kind(std::string_view text) {
  return lookup(kSectionKinds, text);
}
std::optional<SpanKind> parse_span_kind(std::string_view text) {
  return lookup(kSpanKinds, text);
}

std::optional<Date> Date::parse(std::string_view iso) {
  if (iso.size() != 10 || iso[4] != '-' || iso[7] != '-') return std::nullopt;
  Date d;
  auto field = [&](size_t pos, size_t len, int& out) {
    auto r = std::from_chars(iso.data() + pos, iso.data() + pos + len, out);
    return r.ec == std::errc() && r.ptr == iso.data() + pos + len;
  };
  if (!field(0, 4, d.year) || !field(5, 2, d.month) || !field(8, 2, d.day)) {
    return std::nullopt;
  }
  if (d.month < 1 || d.month > 12) return std::nullopt;
  if (d.day < 1 || d.day > days_in_month(d.year, d.month)) return std::nullopt;
  return d;
}

std::string Date::to_string() const {
  char buf[16];
  std::snprintf(buf, sizeof(buf), "%04d-%02d-%02d", year, month, day);
  return buf;
}

const Section* Document::find_section(std::string_view section_id) const {
  for (const auto& s : sections) {
    if (s.section_id == section_id) return &s;
  }
  return nullptr;
}

}  // namespace finkpi
