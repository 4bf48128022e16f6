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

#include "finkpi/records.hpp"

#include <array>
#include <utility>

namespace finkpi {
namespace {

template <typename E, size_t N>
using NameTable = std::array<std::pair<E, std::string_view>, N>;

template <typename E, size_t N>
std::string_view name_of(const NameTable<E, N>& table, E value) {
  for (const auto& [v, name] : table) {
    if (v == value) return name;
  }
  return "?";
}

template <typename E, size_t N>
std::optional<E> value_of(const NameTable<E, N>& table, std::string_view text) {
  for (const auto& [v, name] : table) {
    if (name == text) return v;
  }
  return std::nullopt;
}

constexpr NameTable<ValueClass, 3> kValueClasses{{
    {ValueClass::kCurrency, "Currency"},
    {ValueClass::kPercent, "Percent"},
    {ValueClass::kCount, "Count"},
}};
constexpr NameTable<Granularity, 7> kGranularities{{
    {Granularity::kFY, "FY"},
    {Granularity::kQ1, "Q1"},
    {Granularity::kQ2, "Q2"},
    {Granularity::kQ3, "Q3"},
    {Granularity::kQ4, "Q4"},
    {Granularity::kH1, "H1"},
    {Granularity::kH2, "H2"},
}};
constexpr NameTable<PeriodSource, 4> kPeriodSources{{
    {PeriodSource::kExplicit, "Explicit"},
    {PeriodSource::kRelativePrior, "RelativePrior"},
    {PeriodSource::kHeaderFallback, "HeaderFallback"},
    {PeriodSource::kUnresolved, "Unresolved"},
}};
constexpr NameTable<Basis, 3> kBases{{
    {Basis::kGAAP, "GAAP"},
    {Basis::kNonGAAP, "NonGAAP"},
    {Basis::kUnstated, "Unstated"},
}};
constexpr NameTable<Status, 2> kStatuses{{
    {Status::kActual, "Actual"},
    {Status::kGuidance, "Guidance"},
}};
constexpr NameTable<Unit, 3> kUnits{{
    {Unit::kUSD, "USD"},
    {Unit::kPercent, "Percent"},
    {Unit::kCount, "Count"},
}};

}  // namespace

std::string_view to_string(ValueClass v) { return name_of(kValueClasses, v); }
std::string_view to_string(Granularity g) { return name_of(kGranularities, g); }
std::string_view to_string(PeriodSource s) { return name_of(kPeriodSources, s); }
std::string_view to_string(Basis b) { return name_of(kBases, b); }
std::string_view to_string(Status s) { return name_of(kStatuses, s); }
std::string_view to_string(Unit u) { return name_of(kUnits, u); }

std::optional<ValueClass> parse_value_class(std::string_view t) {
  return value_of(kValueClasses, t);
}
std::optional<Granularity> parse_granularity(std::string_view t) {
  return value_of(kGranularities, t);
}
std::optional<PeriodSource> parse_period_source(std::string_view t) {
  return value_of(kPeriodSources, t);
}
std::optional<Basis> parse_basis(std::string_view t) { return value_of(kBases, t); }
std::optional<Status> parse_status(std::string_view t) { return value_of(kStatuses, t); }
std::optional<Unit> parse_unit(std::string_view t) { return value_of(kUnits, t); }

int period_end_month(Granularity g) {
  switch (g) {
    case Granularity::kQ1: return 3;
    case Granularity::kQ2:
    case Granularity::kH1: return 6;
    case Granularity::kQ3: return 9;
    case Granularity::kQ4:
    case Granularity::kH2:
    case Granularity::kFY: return 12;
  }
  return 12;
}

std::string FiscalPeriod::label() const {
  if (!resolved()) return "unresolved";
  return std::string(to_string(granularity)) + " " + std::to_string(year);
}

}  // namespace finkpi
