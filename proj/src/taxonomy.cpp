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

#include "finkpi/taxonomy.hpp"

#include <algorithm>
#include <map>

#include "finkpi/error.hpp"
#include "text_util.hpp"

namespace finkpi {

MetricTaxonomy::MetricTaxonomy(std::vector<MetricEntry> entries)
    : entries_(std::move(entries)) {
  std::map<std::string, std::string> alias_owner;
  for (size_t i = 0; i < entries_.size(); ++i) {
    auto& e = entries_[i];
    if (e.canonical_name.empty()) {
      throw Error(ErrorCode::kInvalidArgument, "empty canonical metric name");
    }
    for (size_t j = 0; j < i; ++j) {
      if (entries_[j].canonical_name == e.canonical_name) {
        throw Error(ErrorCode::kInvalidArgument,
                    "duplicate canonical metric '" + e.canonical_name + "'");
      }
    }
    if (e.display_name.empty()) {
      e.display_name = e.canonical_name;
      std::replace(e.display_name.begin(), e.display_name.end(), '_', ' ');
    }
    for (const auto& alias : e.aliases) {
      std::string key = text::to_lower(alias);
      auto [it, inserted] = alias_owner.emplace(key, e.canonical_name);
      if (!inserted && it->second != e.canonical_name) {
        throw Error(ErrorCode::kInvalidArgument,
                    "alias '" + alias + "' maps to both '" + it->second +
                        "' and '" + e.canonical_name + "'");
      }
    }
  }
}

const MetricTaxonomy& MetricTaxonomy::default_taxonomy() {
  static const MetricTaxonomy kDefault({
      {"revenue",
       {"revenue", "revenues", "total revenue", "net revenue", "net sales"},
       ValueClass::kCurrency,
       "revenue",
       "revenue_yoy_growth"},
      {"revenue_yoy_growth",
       {"revenue growth", "yoy revenue growth", "revenue yoy growth"},
       ValueClass::kPercent,
       "revenue YoY growth",
       ""},
      {"operating_income",
       {"operating income", "income from operations"},
       ValueClass::kCurrency,
       "operating income",
       ""},
      {"operating_margin",
       {"operating margin", "operating margins"},
       ValueClass::kPercent,
       "operating margin",
       ""},
      {"free_cash_flow",
       {"free cash flow", "FCF"},
       ValueClass::kCurrency,
       "free cash flow",
       ""},
      {"eps",
       {"EPS", "earnings per share", "diluted EPS"},
       ValueClass::kCurrency,
       "EPS",
       ""},
      {"gross_margin",
       {"gross margin", "gross margins"},
       ValueClass::kPercent,
       "gross margin",
       ""},
      {"consensus_delta",
       {"consensus", "consensus estimate", "consensus estimates"},
       ValueClass::kCurrency,
       "consensus delta",
       ""},
  });
  return kDefault;
}

const MetricEntry* MetricTaxonomy::find(std::string_view canonical_name) const {
  for (const auto& e : entries_) {
    if (e.canonical_name == canonical_name) return &e;
  }
  return nullptr;
}

std::string MetricTaxonomy::display_name(std::string_view canonical_name) const {
  if (const MetricEntry* e = find(canonical_name)) return e->display_name;
  std::string out(canonical_name);
  std::replace(out.begin(), out.end(), '_', ' ');
  return out;
}

std::vector<AliasHit> MetricTaxonomy::find_aliases(std::string_view text) const {
  std::vector<AliasHit> all;
  for (const auto& e : entries_) {
    for (const auto& alias : e.aliases) {
      for (size_t pos : text::find_words_ci(text, alias)) {
        all.push_back({pos, pos + alias.size(),
                       std::string(text.substr(pos, alias.size())), e.canonical_name});
      }
    }
  }
  // Longest first at each position, then drop anything overlapping a kept hit.
  std::sort(all.begin(), all.end(), [](const AliasHit& a, const AliasHit& b) {
    if (a.end - a.start != b.end - b.start) return a.end - a.start > b.end - b.start;
    return a.start < b.start;
  });
  std::vector<AliasHit> kept;
  for (auto& hit : all) {
    bool overlaps = std::any_of(kept.begin(), kept.end(), [&](const AliasHit& k) {
      return hit.start < k.end && k.start < hit.end;
    });
    if (!overlaps) kept.push_back(std::move(hit));
  }
  std::sort(kept.begin(), kept.end(),
            [](const AliasHit& a, const AliasHit& b) { return a.start < b.start; });
  return kept;
}

}  // namespace finkpi
