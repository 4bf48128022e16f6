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

// Domain rules turning raw extractions into canonical KPI records: range
// midpoints, unit scaling, fiscal period resolution and qualifier
// classification. Each rule can be switched off to measure its effect.

#pragma once

#include <array>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "finkpi/records.hpp"
#include "finkpi/taxonomy.hpp"

namespace finkpi {

struct RuleSet {
  bool range_midpoint = true;
  bool unit_resolution = true;
  bool period_resolution = true;
  bool qualifier_classification = true;

  static constexpr std::array<std::string_view, 4> kRuleNames = {
      "range_midpoint", "unit_resolution", "period_resolution",
      "qualifier_classification"};

  static RuleSet all_off() { return {false, false, false, false}; }
  // Throws Error(kConfigError) for an unknown rule name.
  void set(std::string_view rule, bool enabled);
  bool enabled(std::string_view rule) const;
  std::vector<std::string> enabled_names() const;

  bool operator==(const RuleSet&) const = default;
};

struct NormalizedRange {
  Decimal value;
  Decimal low;
  Decimal high;
  bool operator==(const NormalizedRange&) const = default;
};

// Exact mean of the bounds. Throws Error(kInvalidRange) if low > high.
NormalizedRange normalize_range(const Decimal& low, const Decimal& high);

struct ResolvedUnit {
  Decimal value;
  Unit unit = Unit::kUSD;
  Decimal scale_applied = Decimal(1);
  bool operator==(const ResolvedUnit&) const = default;
};

// Multiplier for a scale token ("" -> 1, "K"/"thousand" -> 1e3, ...), or
// nullopt if the token is not a scale word.
std::optional<Decimal> scale_for_token(std::string_view unit_token);
Unit default_unit(ValueClass value_class);

// Throws Error(kUnitClassConflict) for a percent token on a non-percent
// metric or a scale word on a percent metric; Error(kUnknownUnitToken) for
// anything outside the grammar.
ResolvedUnit resolve_unit(const Decimal& face_value, std::string_view unit_token,
                          ValueClass value_class);

// Explicit phrases are taken at face value as fiscal periods of the issuer.
// "last year" / "prior year" need an explicit anchor phrase and resolve to
// the same granularity one year earlier. Anything else is Unresolved.
// published_on and fiscal_year_end_month are accepted for calendar mapping
// but no conversion is applied.
FiscalPeriod resolve_period(std::string_view phrase, const Date& published_on,
                            int fiscal_year_end_month,
                            std::string_view anchor_phrase = {});

bool is_forward_looking_cue(std::string_view cue);
Qualifier classify_qualifier(const std::vector<std::string>& cues);

enum class RejectionReason {
  kUnresolvedPeriod,
  kUnitClassConflict,
  kUnknownUnitToken,
  kInvalidRange,
  kUnknownMetric,
};
std::string_view to_string(RejectionReason r);

struct Rejection {
  RejectionReason reason;
  std::string detail;
  bool operator==(const Rejection&) const = default;
};

using RuleResult = std::variant<KpiRecord, Rejection>;

// Disabled rules degrade instead of failing: ranges collapse to their low
// bound, face values keep scale 1 and the metric's default unit, relative
// periods take their anchor unshifted, and every record reads as an
// unqualified actual.
RuleResult apply_rules(const RawKpiRecord& raw, const RuleSet& rules,
                       const DocumentMeta& meta, const MetricTaxonomy& taxonomy);

}  // namespace finkpi
