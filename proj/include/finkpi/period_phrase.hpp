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

// Fiscal period phrases: "Q4 2024", "FY 2025", "H1 2023", "fourth quarter of
// 2024", "fiscal year 2025", bare years, and the relative forms "last year" /
// "prior year".

#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "finkpi/document.hpp"
#include "finkpi/records.hpp"

namespace finkpi {

inline constexpr int kMinFiscalYear = 1990;
inline constexpr int kMaxFiscalYear = 2100;

struct PeriodMention {
  CharRange range;
  std::string text;
  bool relative = false;

  bool operator==(const PeriodMention&) const = default;
};

// Non-overlapping mentions in order of appearance. Matching is
// case-insensitive and whole-word.
std::vector<PeriodMention> find_period_mentions(std::string_view text);

struct ExplicitPeriod {
  Granularity granularity = Granularity::kFY;
  int year = 0;
  bool operator==(const ExplicitPeriod&) const = default;
};

// Parses one complete explicit phrase. A bare year reads as FY.
std::optional<ExplicitPeriod> parse_explicit_period(std::string_view phrase);

bool is_relative_prior_phrase(std::string_view phrase);

}  // namespace finkpi
