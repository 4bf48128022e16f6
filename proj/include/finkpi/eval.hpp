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
// Evaluation harness: a seeded synthetic corpus with known answers,
// extraction and query scoring, and rule ablation reports.

#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "finkpi/pipeline.hpp"
#include "finkpi/query.hpp"
#include "finkpi/records.hpp"
#include "finkpi/rules.hpp"
#include "finkpi/serialize.hpp"
#include "finkpi/validation.hpp"

namespace finkpi::eval {

struct SyntheticDocument {
  DocumentMeta meta;
  std::string text;
  bool has_range = false;
};

struct GoldLabel {
  std::string doc_id;
  std::vector<KpiRecord> records;
};

struct GoldQuestion {
  std::string question;
  QueryIntent intent;
};

struct SyntheticCorpus {
  std::uint64_t seed = 0;
  std::vector<SyntheticDocument> documents;
  std::vector<GoldLabel> gold;  // parallel to documents
  std::vector<GoldQuestion> questions;

  std::vector<KpiRecord> gold_records() const;
};

// Templated earnings-release paragraphs. The same (seed, n_docs) always
// yields the same corpus. Throws Error(kInvalidArgument) when n_docs < 1.
SyntheticCorpus generate_synthetic_corpus(std::uint64_t seed, int n_docs);

Json to_json(const SyntheticCorpus& corpus);

struct ExtractionMetrics {
  double precision = 0;
  double recall = 0;
  double f1 = 0;
  double unit_error_rate = 0;
  double period_misalignment_rate = 0;
  double structuring_accuracy = 0;
  double schema_compliance = 0;
  double qa_match_rate = 0;

  std::size_t predicted = 0;
  std::size_t gold = 0;
  std::size_t true_positives = 0;
  std::size_t key_matches = 0;
  std::size_t unit_errors = 0;
  std::size_t period_pairs = 0;
  std::size_t period_misaligned = 0;
  std::size_t exact = 0;
};

// 2PR / (P + R), or 0 when P + R is 0.
double f1_score(double precision, double recall);

// Predictions pair one-to-one with gold records sharing (doc_id, metric,
// period, status); a pair is a true positive when value (1e-9 relative),
// unit and scale agree. Unpaired records are then paired on (doc_id,
// metric, status) alone to measure period misalignment. Empty denominators
// give 0.
ExtractionMetrics score_extraction(const std::vector<ValidatedRecord>& predicted,
                                   const std::vector<KpiRecord>& gold);

struct QueryGold {
  QueryIntent intent;
  std::optional<double> answer;  // from the brute-force oracle
};

// Each ratio is nullopt (not applicable) when its denominator is empty.
struct QueryMetrics {
  std::optional<double> intent_accuracy;
  std::optional<double> sql_syntax_validity;   // over every SQL attempt
  std::optional<double> constraint_pass_rate;  // over every SQL attempt
  std::optional<double> execution_success_rate;
  std::optional<double> top1_oracle_accuracy;
  std::size_t questions = 0;
  std::size_t attempts = 0;
};

// bundles[i] answers gold[i]; a bundle with no chosen intent (the question
// needed clarification) counts as a failure everywhere.
QueryMetrics score_queries(const std::vector<AnswerBundle>& bundles,
                           const std::vector<QueryGold>& gold);

Json to_json(const ExtractionMetrics& m);
Json to_json(const QueryMetrics& m);

struct EvalRun {
  std::string label;  // "all rules", "no unit_resolution", ...
  RuleSet rules;
  ExtractionMetrics extraction;
  QueryMetrics queries;
  double seconds = 0;  // logged, never part of the report
};

struct EvalOptions {
  int parallelism = 1;
  bool run_queries = true;
};

// Every document through the pipeline with the mock backend into an
// in-memory store, then every question through answer().
EvalRun evaluate(const SyntheticCorpus& corpus, const RuleSet& rules,
                 const EvalOptions& options = {});

std::string label_for(const RuleSet& rules);

struct AblationReport {
  std::uint64_t seed = 0;
  std::size_t documents = 0;
  std::size_t questions = 0;
  std::vector<EvalRun> runs;  // runs[0] is the reference configuration
};

AblationReport run_ablation(const SyntheticCorpus& corpus, const std::vector<RuleSet>& configs,
                            const EvalOptions& options = {});

// The reference, each rule off alone, and every rule off.
std::vector<RuleSet> standard_ablation_matrix();

// Rows: extraction precision, unit error rate, period misalignment rate,
// QA match accuracy, SQL validity pass rate, top-1 answer accuracy; one
// column per run plus a delta against runs[0].
std::string to_markdown(const AblationReport& report);
Json to_json(const AblationReport& report);

}  // namespace finkpi::eval
