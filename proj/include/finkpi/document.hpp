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

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "finkpi/decimal.hpp"

namespace finkpi {

enum class SourceKind { kTenK, kTenQ, kEightK, kEarningsRelease, kTranscript };
enum class SectionKind { kNarrative, kTable, kHeader, kBoilerplate };
enum class SpanKind {
  kScalar,
  kRange,
  kPercent,
  kPercentRange,
  kCurrency,
  kCurrencyRange,
};

std::string_view to_string(SourceKind kind);
std::string_view to_string(SectionKind kind);
std::string_view to_string(SpanKind kind);
std::optional<SourceKind> parse_source_kind(std::string_view text);
std::optional<SectionKind> parse_section_kind(std::string_view text);
std::optional<SpanKind> parse_span_kind(std::string_view text);

inline bool is_range_kind(SpanKind kind) {
  return kind == SpanKind::kRange || kind == SpanKind::kPercentRange ||
         kind == SpanKind::kCurrencyRange;
}

// Half-open byte offsets [start, end).
struct CharRange {
  std::size_t start = 0;
  std::size_t end = 0;

  std::size_t size() const { return end - start; }
  bool empty() const { return end <= start; }
  bool operator==(const CharRange&) const = default;
};

// Calendar date; validated on parse.
struct Date {
  int year = 1970;
  int month = 1;
  int day = 1;

  static std::optional<Date> parse(std::string_view iso);  // YYYY-MM-DD
  std::string to_string() const;
  auto operator<=>(const Date&) const = default;
};

struct DocumentMeta {
  std::string doc_id;
  SourceKind source_kind = SourceKind::kEarningsRelease;
  std::string company;
  Date published_on;
  int fiscal_year_end_month = 12;
};

struct NumericSpan {
  std::string span_id;
  std::string section_id;
  CharRange range;  // offsets into the owning section's body
  std::string surface;
  SpanKind kind = SpanKind::kScalar;
  Decimal low;
  Decimal high;
  std::string unit_token;  // "%", a scale word, or empty
};

struct Section {
  std::string section_id;
  std::string title;  // nearest preceding header text, if any
  std::string body;
  CharRange range;  // offsets into Document::raw_text
  SectionKind kind = SectionKind::kNarrative;
  std::vector<NumericSpan> numeric_spans;
};

struct Document {
  DocumentMeta meta;
  std::string raw_text;
  std::vector<Section> sections;

  const Section* find_section(std::string_view section_id) const;
};

}  // namespace finkpi
