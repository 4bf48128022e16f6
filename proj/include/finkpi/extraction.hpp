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

// Extraction agent: candidate KPI mentions, their sentence context, prompt
// construction for a completion backend and grounded parsing of its reply.

#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "finkpi/backend.hpp"
#include "finkpi/document.hpp"
#include "finkpi/records.hpp"
#include "finkpi/taxonomy.hpp"

namespace finkpi {

struct ContextualSpan {
  NumericSpan numeric;
  AliasHit alias;  // offsets into the section body
  std::string period_phrase;
  std::string anchor_period_phrase;
  bool period_from_header = false;
  std::vector<std::string> qualifier_cues;
  std::string sentence;
  CharRange sentence_range;
  std::string section_title;
  std::string doc_id;
  std::string section_id;

  bool operator==(const ContextualSpan&) const = default;
};

// One span per numeric span that has a taxonomy alias in its sentence. The
// closest alias to the left of the number wins; with none on the left, the
// closest one to the right. Context fields are left empty.
std::vector<ContextualSpan> detect_candidates(const Section& section,
                                              const MetricTaxonomy& taxonomy,
                                              std::string_view doc_id = "");

// Fills period_phrase, anchor_period_phrase and qualifier_cues from the
// sentence. With no period in the sentence, an explicit period in the
// section title is used instead and period_from_header is set.
ContextualSpan extract_context(ContextualSpan span);

// Cue lexicon in canonical spelling.
const std::vector<std::string>& qualifier_cue_lexicon();
std::vector<std::string> find_qualifier_cues(std::string_view sentence);

// Fields the backend is asked to fill, e.g. "Revenue" with unit hint "B".
struct TargetField {
  std::string name;
  std::string unit_hint;
  bool operator==(const TargetField&) const = default;
};

struct TargetSchema {
  std::vector<TargetField> fields;

  // "Period" followed by one field per taxonomy metric.
  static TargetSchema from_taxonomy(const MetricTaxonomy& taxonomy);
};

inline constexpr std::string_view kExtractionInstruction =
    "Extract financial KPIs from the earnings text using the schema below. "
    "Output in JSON. Normalize units and link metrics to fiscal periods.";

std::string build_extraction_prompt(const Section& section,
                                    const MetricTaxonomy& taxonomy,
                                    const TargetSchema& schema);

// Prefix of the single repair re-ask sent after an unparseable reply.
inline constexpr std::string_view kRepairPreamble =
    "Your previous reply was not valid JSON for the requested schema.";

std::string build_repair_prompt(std::string_view original_prompt,
                                std::string_view error);

struct ParsedCompletion {
  std::vector<RawKpiRecord> records;
  // One line per record not emitted: ungrounded value or unknown metric.
  std::vector<std::string> dropped;
};

// Accepts {"records": [...]} as emitted by the mock backend, and flat maps
// keyed by schema field name ({"Period": "Q1 2024", "Revenue": {value: 4.3,
// unit: "B"}, ...}) including unquoted keys. Throws
// Error(kMalformedCompletion) when no JSON object can be recovered.
ParsedCompletion parse_backend_output(std::string_view completion,
                                      const Section& section,
                                      std::string_view doc_id,
                                      const MetricTaxonomy& taxonomy);

struct SectionFailure {
  std::string section_id;
  std::string message;
  bool operator==(const SectionFailure&) const = default;
};

struct ExtractionReport {
  std::vector<RawKpiRecord> records;  // ordered by (section, span start)
  std::vector<SectionFailure> failures;
  std::size_t dropped = 0;
  std::size_t backend_calls = 0;
};

struct ExtractionOptions {
  int parallelism = 4;
  std::optional<TargetSchema> schema;  // defaults to the taxonomy's
};

ExtractionReport extract_document(const Document& doc,
                                  const CompletionBackend& backend,
                                  const MetricTaxonomy& taxonomy,
                                  const ExtractionOptions& options = {});

// Offline backend. Recovers the section from the prompt, reruns candidate
// detection and context extraction, and answers with exactly those records.
// Its reply is a pure function of (prompt, options).
class MockBackend : public CompletionBackend {
 public:
  struct Options {
    std::uint64_t seed = 0;
    // Share of records whose value is replaced by fabricated_value. Which
    // records are hit depends on the seed and the prompt only.
    double fabrication_rate = 0.0;
    std::string fabricated_value = "9.9";
    // Reply with broken JSON unless the prompt is a repair re-ask.
    bool malformed_unless_repair = false;
    // Reply with broken JSON to every prompt.
    bool always_malformed = false;
  };

  explicit MockBackend(MetricTaxonomy taxonomy);
  MockBackend(MetricTaxonomy taxonomy, Options options);

  std::string complete(std::string_view prompt) const override;
  std::string name() const override { return "mock"; }

 private:
  MetricTaxonomy taxonomy_;
  Options options_;
};

}  // namespace finkpi
