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

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "finkpi/records.hpp"

namespace finkpi {

struct MetricEntry {
  std::string canonical_name;
  std::vector<std::string> aliases;
  ValueClass value_class = ValueClass::kCurrency;
  // Human label used in prompts and explanations ("operating margin").
  std::string display_name;
  // Percent-valued mentions of a currency metric ("revenue grew 12%") are
  // recorded under this metric when set.
  std::string growth_metric;
};

struct AliasHit {
  std::size_t start = 0;
  std::size_t end = 0;
  std::string alias;  // as it appears in the text
  std::string canonical_name;

  bool operator==(const AliasHit&) const = default;
};

// Canonical metric names with their surface aliases. Alias matching is
// case-insensitive and whole-word; overlapping hits resolve to the longest.
class MetricTaxonomy {
 public:
  MetricTaxonomy() = default;
  // Throws Error(kInvalidArgument) on duplicate canonical names or an alias
  // claimed by two metrics.
  explicit MetricTaxonomy(std::vector<MetricEntry> entries);

  // revenue, revenue_yoy_growth, operating_income, operating_margin,
  // free_cash_flow, eps, gross_margin, consensus_delta.
  static const MetricTaxonomy& default_taxonomy();

  const std::vector<MetricEntry>& entries() const { return entries_; }
  bool empty() const { return entries_.empty(); }
  const MetricEntry* find(std::string_view canonical_name) const;
  bool contains(std::string_view canonical_name) const {
    return find(canonical_name) != nullptr;
  }
  std::string display_name(std::string_view canonical_name) const;

  std::vector<AliasHit> find_aliases(std::string_view text) const;

 private:
  std::vector<MetricEntry> entries_;
};

}  // namespace finkpi
