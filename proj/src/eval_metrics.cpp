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
#include <chrono>
#include <cmath>
#include <cstdio>
#include <map>
#include <sstream>
#include <tuple>

#include "finkpi/error.hpp"
#include "finkpi/eval.hpp"
#include "finkpi/ingest.hpp"
#include "finkpi/log.hpp"
#include "finkpi/oracle.hpp"

namespace finkpi::eval {

namespace {

double ratio(std::size_t num, std::size_t den) {
  return den == 0 ? 0.0 : static_cast<double>(num) / static_cast<double>(den);
}

std::optional<double> ratio_or_na(std::size_t num, std::size_t den) {
  if (den == 0) return std::nullopt;
  return static_cast<double>(num) / static_cast<double>(den);
}

bool values_equal(const Decimal& a, const Decimal& b) {
  if (a == b) return true;
  double x = a.to_double();
  double y = b.to_double();
  return std::fabs(x - y) <= 1e-9 * std::max(std::fabs(x), std::fabs(y));
}

using FullKey = std::tuple<std::string, std::string, int, int, int>;
using LooseKey = std::tuple<std::string, std::string, int>;

FullKey full_key(const KpiRecord& r) {
  return {r.provenance.doc_id, r.metric, static_cast<int>(r.period.granularity), r.period.year,
          static_cast<int>(r.qualifier.status)};
}

LooseKey loose_key(const KpiRecord& r) {
  return {r.provenance.doc_id, r.metric, static_cast<int>(r.qualifier.status)};
}

bool unit_ok(const KpiRecord& p, const KpiRecord& g) {
  return p.unit == g.unit && p.scale_applied == g.scale_applied;
}

bool true_positive(const KpiRecord& p, const KpiRecord& g) {
  return values_equal(p.value, g.value) && unit_ok(p, g);
}

bool field_exact(const KpiRecord& p, const KpiRecord& g) {
  return p.metric == g.metric && p.value == g.value && p.value_low == g.value_low &&
         p.value_high == g.value_high && p.unit == g.unit &&
         p.scale_applied == g.scale_applied && p.period == g.period &&
         p.qualifier == g.qualifier && p.company == g.company &&
         p.published_on == g.published_on;
}

// Pairs the members of two buckets one-to-one, preferring pairs for which
// `better` holds, in input order otherwise.
template <typename Better>
std::vector<std::pair<size_t, size_t>> pair_up(const std::vector<size_t>& left,
                                               const std::vector<size_t>& right, Better better) {
  std::vector<std::pair<size_t, size_t>> out;
  std::vector<bool> l_used(left.size()), r_used(right.size());
  for (size_t i = 0; i < left.size(); ++i) {
    for (size_t j = 0; j < right.size(); ++j) {
      if (!r_used[j] && better(left[i], right[j])) {
        out.push_back({left[i], right[j]});
        l_used[i] = r_used[j] = true;
        break;
      }
    }
  }
  size_t j = 0;
  for (size_t i = 0; i < left.size(); ++i) {
    if (l_used[i]) continue;
    while (j < right.size() && r_used[j]) ++j;
    if (j == right.size()) break;
    out.push_back({left[i], right[j]});
    r_used[j] = true;
  }
  return out;
}

}  // namespace

double f1_score(double precision, double recall) {
  double s = precision + recall;
  return s > 0 ? 2 * precision * recall / s : 0.0;
}

ExtractionMetrics score_extraction(const std::vector<ValidatedRecord>& predicted,
                                   const std::vector<KpiRecord>& gold) {
  ExtractionMetrics m;
  m.predicted = predicted.size();
  m.gold = gold.size();
  const auto& tax = MetricTaxonomy::default_taxonomy();

  std::map<FullKey, std::pair<std::vector<size_t>, std::vector<size_t>>> by_key;
  for (size_t i = 0; i < predicted.size(); ++i) {
    by_key[full_key(predicted[i].record)].first.push_back(i);
  }
  for (size_t i = 0; i < gold.size(); ++i) by_key[full_key(gold[i])].second.push_back(i);

  std::vector<bool> p_paired(predicted.size()), g_paired(gold.size());
  for (const auto& [key, bucket] : by_key) {
    auto pairs = pair_up(bucket.first, bucket.second, [&](size_t p, size_t g) {
      return true_positive(predicted[p].record, gold[g]);
    });
    for (auto [p, g] : pairs) {
      const KpiRecord& pr = predicted[p].record;
      p_paired[p] = g_paired[g] = true;
      ++m.key_matches;
      if (true_positive(pr, gold[g])) ++m.true_positives;
      if (!unit_ok(pr, gold[g])) ++m.unit_errors;
      if (field_exact(pr, gold[g])) ++m.exact;
    }
  }
  m.period_pairs = m.key_matches;

  std::map<LooseKey, std::pair<std::vector<size_t>, std::vector<size_t>>> loose;
  for (size_t i = 0; i < predicted.size(); ++i) {
    if (!p_paired[i]) loose[loose_key(predicted[i].record)].first.push_back(i);
  }
  for (size_t i = 0; i < gold.size(); ++i) {
    if (!g_paired[i]) loose[loose_key(gold[i])].second.push_back(i);
  }
  for (const auto& [key, bucket] : loose) {
    auto pairs = pair_up(bucket.first, bucket.second, [&](size_t p, size_t g) {
      return values_equal(predicted[p].record.value, gold[g].value);
    });
    m.period_pairs += pairs.size();
    m.period_misaligned += pairs.size();
  }

  std::size_t compliant = 0;
  std::size_t accepted = 0;
  for (const auto& v : predicted) {
    compliant += validate_schema(v.record, &tax).empty();
    accepted += v.outcome.disposition == Disposition::kAccepted;
  }
  m.precision = ratio(m.true_positives, m.predicted);
  m.recall = ratio(m.true_positives, m.gold);
  m.f1 = f1_score(m.precision, m.recall);
  m.unit_error_rate = ratio(m.unit_errors, m.key_matches);
  m.period_misalignment_rate = ratio(m.period_misaligned, m.period_pairs);
  m.structuring_accuracy = ratio(m.exact, m.gold);
  m.schema_compliance = ratio(compliant, m.predicted);
  m.qa_match_rate = ratio(accepted, m.predicted);
  return m;
}

QueryMetrics score_queries(const std::vector<AnswerBundle>& bundles,
                           const std::vector<QueryGold>& gold) {
  if (bundles.size() != gold.size()) {
    throw Error(ErrorCode::kInvalidArgument, "one bundle per gold answer is required");
  }
  QueryMetrics m;
  m.questions = bundles.size();
  std::size_t intent_ok = 0, syntax_ok = 0, constraints_ok = 0, executed = 0, top1 = 0;
  for (size_t i = 0; i < bundles.size(); ++i) {
    const AnswerBundle& b = bundles[i];
    bool answered = !b.chosen.intent.metrics.empty();
    intent_ok += answered && b.chosen.intent == gold[i].intent;
    bool ran = false;
    for (const auto& a : b.log) {
      ++m.attempts;
      syntax_ok += a.syntax_ok;
      constraints_ok += a.constraints_ok;
      ran = ran || a.outcome == AttemptOutcome::kAccepted ||
            a.outcome == AttemptOutcome::kImplausible;
    }
    executed += ran;
    top1 += answered && ran && answers_match(gold[i].answer, headline_value(b.result));
  }
  m.intent_accuracy = ratio_or_na(intent_ok, m.questions);
  m.sql_syntax_validity = ratio_or_na(syntax_ok, m.attempts);
  m.constraint_pass_rate = ratio_or_na(constraints_ok, m.attempts);
  m.execution_success_rate = ratio_or_na(executed, m.questions);
  m.top1_oracle_accuracy = ratio_or_na(top1, m.questions);
  return m;
}

Json to_json(const ExtractionMetrics& m) {
  return {{"precision", m.precision},
          {"recall", m.recall},
          {"f1", m.f1},
          {"unit_error_rate", m.unit_error_rate},
          {"period_misalignment_rate", m.period_misalignment_rate},
          {"structuring_accuracy", m.structuring_accuracy},
          {"schema_compliance", m.schema_compliance},
          {"qa_match_rate", m.qa_match_rate},
          {"counts",
           {{"predicted", m.predicted},
            {"gold", m.gold},
            {"true_positives", m.true_positives},
            {"key_matches", m.key_matches},
            {"unit_errors", m.unit_errors},
            {"period_pairs", m.period_pairs},
            {"period_misaligned", m.period_misaligned},
            {"exact", m.exact}}}};
}

namespace {

Json optional_json(const std::optional<double>& v) { return v ? Json(*v) : Json(nullptr); }

}  // namespace

Json to_json(const QueryMetrics& m) {
  return {{"intent_accuracy", optional_json(m.intent_accuracy)},
          {"sql_syntax_validity", optional_json(m.sql_syntax_validity)},
          {"constraint_pass_rate", optional_json(m.constraint_pass_rate)},
          {"execution_success_rate", optional_json(m.execution_success_rate)},
          {"top1_oracle_accuracy", optional_json(m.top1_oracle_accuracy)},
          {"questions", m.questions},
          {"attempts", m.attempts}};
}

std::string label_for(const RuleSet& rules) {
  auto on = rules.enabled_names();
  if (on.size() == RuleSet::kRuleNames.size()) return "all rules";
  if (on.empty()) return "no rules";
  std::string out;
  for (auto name : RuleSet::kRuleNames) {
    if (rules.enabled(name)) continue;
    out += out.empty() ? "no " : ", ";
    out += name;
  }
  return out;
}

EvalRun evaluate(const SyntheticCorpus& corpus, const RuleSet& rules,
                 const EvalOptions& options) {
  auto started = std::chrono::steady_clock::now();
  const auto& tax = MetricTaxonomy::default_taxonomy();
  EvalRun run;
  run.label = label_for(rules);
  run.rules = rules;

  MockBackend backend(tax);
  auto store = init_store(":memory:");
  std::vector<ValidatedRecord> predicted;
  for (const auto& sd : corpus.documents) {
    Document doc = ingest::load_document(sd.text, ingest::InputFormat::kPlainText, sd.meta);
    DocumentResult result = process_document(doc, backend, rules, tax, options.parallelism);
    store->upsert_records(result.storable());
    predicted.insert(predicted.end(), result.validated.begin(), result.validated.end());
  }
  run.extraction = score_extraction(predicted, corpus.gold_records());

  if (options.run_queries) {
    std::vector<KpiRecord> gold_records = corpus.gold_records();
    std::vector<AnswerBundle> bundles;
    std::vector<QueryGold> gold;
    for (const auto& q : corpus.questions) {
      gold.push_back({q.intent, oracle_answer(q.intent, gold_records)});
      try {
        bundles.push_back(answer(q.question, *store));
      } catch (const ClarificationNeeded&) {
        AnswerBundle empty;
        empty.question = q.question;
        bundles.push_back(std::move(empty));
      }
    }
    run.queries = score_queries(bundles, gold);
  }
  run.seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
  log_debug("eval '" + run.label + "' took " + std::to_string(run.seconds) + "s");
  return run;
}

std::vector<RuleSet> standard_ablation_matrix() {
  std::vector<RuleSet> out{RuleSet{}};
  for (auto name : RuleSet::kRuleNames) {
    RuleSet r;
    r.set(name, false);
    out.push_back(r);
  }
  out.push_back(RuleSet::all_off());
  return out;
}

AblationReport run_ablation(const SyntheticCorpus& corpus, const std::vector<RuleSet>& configs,
                            const EvalOptions& options) {
  if (configs.empty()) throw Error(ErrorCode::kInvalidArgument, "no rule configurations");
  AblationReport report;
  report.seed = corpus.seed;
  report.documents = corpus.documents.size();
  report.questions = corpus.questions.size();
  for (const auto& rules : configs) report.runs.push_back(evaluate(corpus, rules, options));
  return report;
}

namespace {

struct Row {
  const char* name;
  const char* key;
  std::optional<double> (*get)(const EvalRun&);
};

const Row kRows[] = {
    {"Extraction precision", "extraction_precision",
     [](const EvalRun& r) -> std::optional<double> { return r.extraction.precision; }},
    {"Unit error rate", "unit_error_rate",
     [](const EvalRun& r) -> std::optional<double> { return r.extraction.unit_error_rate; }},
    {"Period misalignment rate", "period_misalignment_rate",
     [](const EvalRun& r) -> std::optional<double> {
       return r.extraction.period_misalignment_rate;
     }},
    {"QA match accuracy", "qa_match_accuracy",
     [](const EvalRun& r) -> std::optional<double> { return r.extraction.qa_match_rate; }},
    {"SQL validity pass rate", "sql_validity_pass_rate",
     [](const EvalRun& r) { return r.queries.constraint_pass_rate; }},
    {"Top-1 answer accuracy", "top1_answer_accuracy",
     [](const EvalRun& r) { return r.queries.top1_oracle_accuracy; }},
};

std::string percent(const std::optional<double>& v) {
  if (!v) return "N/A";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.1f%%", *v * 100);
  return buf;
}

std::string points(double d) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%+.1f", d * 100);
  return buf;
}

}  // namespace

std::string to_markdown(const AblationReport& report) {
  std::ostringstream os;
  os << "## Rule ablation\n\n"
     << "Seed " << report.seed << ", " << report.documents << " documents, "
     << report.questions << " questions. Deltas are percentage points against \""
     << report.runs.at(0).label << "\".\n\n";
  os << "| Metric |";
  for (const auto& r : report.runs) os << " " << r.label << " |";
  os << "\n|---|";
  for (size_t i = 0; i < report.runs.size(); ++i) os << "---|";
  os << "\n";
  for (const auto& row : kRows) {
    os << "| " << row.name << " |";
    auto base = row.get(report.runs[0]);
    for (size_t i = 0; i < report.runs.size(); ++i) {
      auto v = row.get(report.runs[i]);
      os << " " << percent(v);
      if (i > 0 && v && base) os << " (" << points(*v - *base) << ")";
      os << " |";
    }
    os << "\n";
  }
  return os.str();
}

Json to_json(const AblationReport& report) {
  Json runs = Json::array();
  for (const auto& r : report.runs) {
    Json rules = Json::object();
    for (auto name : RuleSet::kRuleNames) rules[std::string(name)] = r.rules.enabled(name);
    Json table = Json::object();
    Json delta = Json::object();
    for (const auto& row : kRows) {
      auto v = row.get(r);
      auto base = row.get(report.runs[0]);
      table[row.key] = optional_json(v);
      delta[row.key] = v && base ? Json(*v - *base) : Json(nullptr);
    }
    runs.push_back({{"label", r.label},
                    {"rules", rules},
                    {"table", table},
                    {"delta", delta},
                    {"extraction", to_json(r.extraction)},
                    {"queries", to_json(r.queries)}});
  }
  return {{"seed", report.seed},
          {"documents", report.documents},
          {"questions", report.questions},
          {"runs", runs}};
}

}  // namespace finkpi::eval
