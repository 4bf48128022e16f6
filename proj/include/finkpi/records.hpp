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

// Record types passed between extraction, rule injection, validation and
// the store.

#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "finkpi/decimal.hpp"
#include "finkpi/document.hpp"

namespace finkpi {

enum class ValueClass { kCurrency, kPercent, kCount };
enum class Granularity { kFY, kQ1, kQ2, kQ3, kQ4, kH1, kH2 };
enum class PeriodSource { kExplicit, kRelativePrior, kHeaderFallback, kUnresolved };
enum class Basis { kGAAP, kNonGAAP, kUnstated };
enum class Status { kActual, kGuidance };
enum class Unit { kUSD, kPercent, kCount };

std::string_view to_string(ValueClass v);
std::string_view to_string(Granularity g);
std::string_view to_string(PeriodSource s);
std::string_view to_string(Basis b);
std::string_view to_string(Status s);
std::string_view to_string(Unit u);
std::optional<ValueClass> parse_value_class(std::string_view text);
std::optional<Granularity> parse_granularity(std::string_view text);
std::optional<PeriodSource> parse_period_source(std::string_view text);
std::optional<Basis> parse_basis(std::string_view text);
std::optional<Status> parse_status(std::string_view text);
std::optional<Unit> parse_unit(std::string_view text);

inline bool is_quarter(Granularity g) {
  return g == Granularity::kQ1 || g == Granularity::kQ2 || g == Granularity::kQ3 ||
         g == Granularity::kQ4;
}

// Month (1-12) in which a fiscal period ends, relative to the fiscal year.
int period_end_month(Granularity g);

struct FiscalPeriod {
  Granularity granularity = Granularity::kFY;
  int year = 0;
  PeriodSource resolved_from = PeriodSource::kUnresolved;

  bool resolved() const { return resolved_from != PeriodSource::kUnresolved; }
  // "Q4 2024", "FY 2025"; "unresolved" when not resolved.
  std::string label() const;
  // Sort key: year * 100 + end month.
  int ordinal() const { return year * 100 + period_end_month(granularity); }
  bool same_period(const FiscalPeriod& o) const {
    return granularity == o.granularity && year == o.year;
  }
  bool operator==(const FiscalPeriod&) const = default;
};

struct Qualifier {
  Basis basis = Basis::kUnstated;
  Status status = Status::kActual;
  bool operator==(const Qualifier&) const = default;
};

struct Provenance {
  std::string doc_id;
  std::string section_id;
  CharRange range;  // offsets into the section body
  bool operator==(const Provenance&) const = default;
};

// Preliminary record produced by the extraction agent: face values and raw
// phrases only, nothing normalized yet.
struct RawKpiRecord {
  std::string metric;
  Decimal value_low;
  Decimal value_high;
  std::string unit_token;
  std::string period_phrase;
  // Explicit period co-mentioned in the same sentence; anchors "last year".
  std::string anchor_period_phrase;
  bool period_from_header = false;
  std::vector<std::string> qualifier_cues;
  Provenance provenance;
  double backend_confidence = 1.0;

  bool operator==(const RawKpiRecord&) const = default;
};

struct KpiRecord {
  std::string metric;
  Decimal value;
  Decimal value_low;
  Decimal value_high;
  Unit unit = Unit::kUSD;
  Decimal scale_applied = Decimal(1);
  FiscalPeriod period;
  Qualifier qualifier;
  Decimal confidence = Decimal(1);
  std::string company;
  Date published_on;
  Provenance provenance;
  std::vector<std::string> rules_applied;
  std::vector<std::string> qualifier_cues;

  bool operator==(const KpiRecord&) const = default;
};

}  // namespace finkpi
