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

// Text fixtures shared by the test binaries.

#pragma once

#include <string>
#include <variant>
#include <vector>

#include "finkpi/document.hpp"
#include "finkpi/extraction.hpp"
#include "finkpi/ingest.hpp"
#include "finkpi/rules.hpp"
#include "finkpi/validation.hpp"

namespace finkpi::testing {

inline constexpr const char* kConsensusSentence =
    "In Q1 2024, revenue grew 12% YoY to $4.3 billion, beating consensus by "
    "$150 million.";

// Operating margin actual, prior-year comparison, revenue and guidance range.
inline constexpr const char* kMarginParagraph =
    "Operating margin in Q4 2024 was 14.6%, up from 14.4% last year. Revenue "
    "grew 15.2% to $2.52 billion. The company expects operating margin to be "
    "between 15\xE2\x80\x93" "17% in FY 2025.";

inline DocumentMeta fixture_meta(const std::string& doc_id = "doc-1",
                                 const std::string& published = "2025-02-01") {
  DocumentMeta m;
  m.doc_id = doc_id;
  m.source_kind = SourceKind::kEarningsRelease;
  m.company = "ACME";
  m.published_on = *Date::parse(published);
  return m;
}

// Mock extraction, all rules, validation; keeps what the store would accept.
inline std::vector<KpiRecord> pipeline_records(const std::string& text,
                                               const DocumentMeta& meta = fixture_meta()) {
  const auto& tax = MetricTaxonomy::default_taxonomy();
  Document doc = ingest::load_document(text, ingest::InputFormat::kPlainText, meta);
  std::vector<KpiRecord> out;
  for (const auto& raw : extract_document(doc, MockBackend(tax), tax).records) {
    auto res = apply_rules(raw, RuleSet{}, doc.meta, tax);
    if (auto* r = std::get_if<KpiRecord>(&res)) {
      ValidatedRecord v = validate_record(*r, &doc, tax);
      if (v.outcome.disposition != Disposition::kFlagged) out.push_back(v.record);
    }
  }
  return out;
}

}  // namespace finkpi::testing
