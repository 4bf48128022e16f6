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
// Question answering over the KPI store: intent parsing, SQL generation
// (deterministic template plus optional backend candidates), semantic
// constraint checks, execution with fallback, and plain-English rendering.

#pragma once

#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "finkpi/backend.hpp"
#include "finkpi/records.hpp"
#include "finkpi/serialize.hpp"
#include "finkpi/sql.hpp"
#include "finkpi/store.hpp"
#include "finkpi/taxonomy.hpp"

namespace finkpi {

enum class Aggregation { kNone, kAvg, kSum, kMin, kMax, kCount, kLatest };
enum class StatusFilter { kActualOnly, kGuidanceOnly, kBoth };
enum class Comparison { kYoY, kQoQ };

std::string_view to_string(Aggregation a);
std::string_view to_string(StatusFilter s);
std::string_view to_string(Comparison c);

// Granularity and years are independent: {Q4, no year} is "the latest Q4",
// {no granularity, 2022..2024} is a year range.
struct PeriodFilter {
  std::optional<Granularity> granularity;
  std::optional<int> year_from;
  std::optional<int> year_to;

  bool single_year() const { return year_from && year_to && *year_from == *year_to; }
  // "Q4 2024", "Q4", "2022-2024", "FY 2023-2024".
  std::string label() const;
  bool operator==(const PeriodFilter&) const = default;
};

struct QueryIntent {
  std::vector<std::string> metrics;
  std::optional<PeriodFilter> period_filter;
  Aggregation aggregation = Aggregation::kNone;
  // Only kGAAP or kNonGAAP. GAAP keeps rows whose basis is not NonGAAP.
  std::optional<Basis> basis_filter;
  StatusFilter status_filter = StatusFilter::kActualOnly;
  std::optional<std::string> company_filter;
  // Requires a period filter with a granularity; QoQ requires a quarter.
  std::optional<Comparison> comparison;

  bool operator==(const QueryIntent&) const = default;
};

Json to_json(const QueryIntent& intent);

// Throws ClarificationNeeded when no metric alias matches, or when a
// comparison is asked for without a usable period.
QueryIntent parse_intent(std::string_view question,
                         const MetricTaxonomy& taxonomy = MetricTaxonomy::default_taxonomy());

// Throws Error(kInvalidArgument) when the intent breaks its invariants.
void check_intent(const QueryIntent& intent);

enum class GenerationSource { kTemplate, kBackend };
std::string_view to_string(GenerationSource s);

struct SqlCandidate {
  std::string sql;
  QueryIntent intent;
  GenerationSource source = GenerationSource::kTemplate;
  int attempt = 0;
};

// The deterministic SQL for an intent.
std::string compile_template(const QueryIntent& intent);

// Backend prompt: instruction, schema card, two worked examples, question.
std::string build_sql_prompt(std::string_view question, const QueryIntent& intent,
                             const SchemaCard& card, std::string_view feedback = "");
// SQL statements found in a completion (fenced blocks or bare SELECTs).
std::vector<std::string> parse_sql_completion(std::string_view completion);

struct GenerationLog {
  std::vector<std::string> unparseable;  // backend SQL dropped by the parser
  bool backend_failed = false;
};

// Backend candidates (when a backend is given) followed by the template.
std::vector<SqlCandidate> generate_sql(const QueryIntent& intent, const SchemaCard& card,
                                       const CompletionBackend* backend = nullptr,
                                       std::string_view question = "",
                                       GenerationLog* log = nullptr);

// Backend candidates only, with rejection feedback in the prompt.
std::vector<SqlCandidate> regenerate_sql(const QueryIntent& intent, const SchemaCard& card,
                                         const CompletionBackend& backend,
                                         std::string_view question, std::string_view feedback,
                                         GenerationLog* log = nullptr);

struct ConstraintViolation {
  std::string rule;  // syntax, unit, temporal, qualifier
  std::string detail;
  bool operator==(const ConstraintViolation&) const = default;
};

struct ValidationReport {
  bool syntax_ok = true;
  bool unit_consistent = true;
  bool temporal_aligned = true;
  bool qualifier_correct = true;
  std::vector<ConstraintViolation> violations;

  bool passed() const {
    return syntax_ok && unit_consistent && temporal_aligned && qualifier_correct;
  }
};

Json to_json(const ValidationReport& report);

ValidationReport validate_constraints(const SqlCandidate& candidate, const SchemaCard& card);

enum class AttemptOutcome { kAccepted, kUnparseable, kConstraintFailure, kExecutionError,
                            kImplausible };
std::string_view to_string(AttemptOutcome o);

struct AttemptRecord {
  std::string sql;
  GenerationSource source = GenerationSource::kTemplate;
  AttemptOutcome outcome = AttemptOutcome::kAccepted;
  std::string detail;
  bool syntax_ok = true;
  bool constraints_ok = true;
};

struct AnswerBundle {
  std::string question;
  SqlCandidate chosen;
  ValidationReport validation;
  ResultTable result;
  std::string explanation;
  int attempts = 0;
  std::vector<AttemptRecord> log;
  std::string audit_id;
};

Json to_json(const AnswerBundle& bundle);

// Called once when every backend candidate was rejected; returns fresh
// candidates given a summary of the rejections.
using Regenerate = std::function<std::vector<SqlCandidate>(std::string_view feedback)>;

inline constexpr int kDefaultMaxRetries = 2;

// Tries candidates in order, at most max_retries + 1 executions. The last
// candidate is the template and always gets a slot.
AnswerBundle execute_with_feedback(const std::vector<SqlCandidate>& candidates,
                                   const KpiStore& store, int max_retries = kDefaultMaxRetries,
                                   const Regenerate& regenerate = nullptr);

std::string explain(const SqlCandidate& candidate, const ResultTable& result,
                    const MetricTaxonomy& taxonomy = MetricTaxonomy::default_taxonomy());

// First cell of the first row, when numeric.
std::optional<Decimal> headline_value(const ResultTable& result);

// Money with a scale word: 4300000000 at scale 1e9 -> "$4.3 billion".
std::string format_usd(const Decimal& value, const Decimal& scale);
std::string format_value(const Decimal& value, Unit unit, const Decimal& scale);

struct QueryConfig {
  const CompletionBackend* backend = nullptr;
  int max_retries = kDefaultMaxRetries;
};

// parse_intent, generate_sql, execute_with_feedback, explain; the whole
// transcript goes to the store's audit log. Rethrows ClarificationNeeded.
AnswerBundle answer(std::string_view question, const KpiStore& store,
                    const QueryConfig& config = {});

}  // namespace finkpi
