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
#include "finkpi/query.hpp"

#include <gtest/gtest.h>

#include <fstream>
#include <random>

#include "finkpi/error.hpp"
#include "finkpi/oracle.hpp"
#include "fixtures.hpp"
#include "generators.hpp"
#include "mutations.hpp"
#include "temp_dir.hpp"

namespace finkpi {
namespace {

using testing::margin_fy2025_guidance;
using testing::margin_q4_2024;
using testing::dense_record;
using testing::pick;
using testing::random_intent;
using testing::revenue_q4_2024_yoy;

std::unique_ptr<KpiStore> margin_store(std::shared_ptr<AuditLog> audit = nullptr) {
  auto store = init_store(":memory:", kSchemaVersion, std::move(audit));
  store->upsert_records(testing::pipeline_records(testing::kMarginParagraph));
  return store;
}

// Replies with a fixed list of completions, one per call, then repeats the last.
class ScriptedBackend : public CompletionBackend {
 public:
  explicit ScriptedBackend(std::vector<std::string> replies) : replies_(std::move(replies)) {}
  std::string complete(std::string_view prompt) const override {
    prompts_.emplace_back(prompt);
    size_t i = std::min(calls_++, replies_.size() - 1);
    return replies_[i];
  }
  std::string name() const override { return "scripted"; }
  const std::vector<std::string>& prompts() const { return prompts_; }

 private:
  std::vector<std::string> replies_;
  mutable size_t calls_ = 0;
  mutable std::vector<std::string> prompts_;
};

class FailingBackend : public CompletionBackend {
 public:
  std::string complete(std::string_view) const override {
    throw Error(ErrorCode::kIoError, "backend unreachable");
  }
  std::string name() const override { return "failing"; }
};

// ---- intent parsing ----

TEST(ParseIntentTest, ReferenceQuestion) {
  QueryIntent in = parse_intent("What was Q4 2024 operating margin?");
  EXPECT_EQ(in, margin_q4_2024());
}

TEST(ParseIntentTest, GuidanceAndBasis) {
  QueryIntent in = parse_intent("What is the FY 2025 operating margin guidance?");
  EXPECT_EQ(in, margin_fy2025_guidance());
  in = parse_intent("What was GAAP operating margin in Q4 2024?");
  EXPECT_EQ(in.basis_filter, Basis::kGAAP);
  in = parse_intent("What was adjusted EPS in Q4 2024?");
  EXPECT_EQ(in.metrics, std::vector<std::string>{"eps"});
  EXPECT_EQ(in.basis_filter, Basis::kNonGAAP);
  in = parse_intent("Compare guidance and actual revenue for FY 2024");
  EXPECT_EQ(in.status_filter, StatusFilter::kBoth);
}

TEST(ParseIntentTest, AggregationsRangesAndCompany) {
  QueryIntent in = parse_intent("What was the average operating margin between 2022 and 2024?");
  EXPECT_EQ(in.aggregation, Aggregation::kAvg);
  ASSERT_TRUE(in.period_filter);
  EXPECT_FALSE(in.period_filter->granularity);
  EXPECT_EQ(in.period_filter->year_from, 2022);
  EXPECT_EQ(in.period_filter->year_to, 2024);

  in = parse_intent("What was the total revenue in FY 2024?");
  EXPECT_EQ(in.metrics, std::vector<std::string>{"revenue"});
  EXPECT_EQ(in.aggregation, Aggregation::kNone);  // "total revenue" is an alias

  in = parse_intent("How many free cash flow records does ACME have?");
  EXPECT_EQ(in.aggregation, Aggregation::kCount);
  EXPECT_EQ(in.company_filter, "ACME");

  in = parse_intent("What was the latest Q4 gross margin?");
  EXPECT_EQ(in.aggregation, Aggregation::kLatest);
  EXPECT_EQ(in.period_filter, (PeriodFilter{Granularity::kQ4, std::nullopt, std::nullopt}));
}

TEST(ParseIntentTest, Comparisons) {
  QueryIntent in = parse_intent("How did Q4 2024 revenue change year over year?");
  EXPECT_EQ(in, revenue_q4_2024_yoy());
  in = parse_intent("What was revenue growth YoY in Q1 2024?");
  EXPECT_EQ(in.metrics, std::vector<std::string>{"revenue_yoy_growth"});
  EXPECT_FALSE(in.comparison);
  in = parse_intent("Revenue QoQ change in Q2 2024");
  EXPECT_EQ(in.comparison, Comparison::kQoQ);
}

TEST(ParseIntentTest, Clarifications) {
  try {
    parse_intent("What color is the logo?");
    FAIL() << "expected clarification";
  } catch (const ClarificationNeeded& e) {
    EXPECT_EQ(e.code(), ErrorCode::kClarificationNeeded);
    EXPECT_EQ(e.unmatched(), "color logo");
  }
  EXPECT_THROW(parse_intent("How did revenue change year over year?"), ClarificationNeeded);
  EXPECT_THROW(parse_intent("Revenue QoQ change in FY 2024"), ClarificationNeeded);
}

TEST(CheckIntentTest, Invariants) {
  EXPECT_NO_THROW(check_intent(margin_q4_2024()));
  QueryIntent in;
  EXPECT_THROW(check_intent(in), Error);
  in = revenue_q4_2024_yoy();
  in.aggregation = Aggregation::kAvg;
  EXPECT_THROW(check_intent(in), Error);
  in = revenue_q4_2024_yoy();
  in.period_filter->granularity = Granularity::kFY;
  in.comparison = Comparison::kQoQ;
  EXPECT_THROW(check_intent(in), Error);
}

// ---- templates ----

TEST(TemplateTest, ReferenceQuestionExecutes) {
  auto store = margin_store();
  auto t = store->execute_sql(compile_template(margin_q4_2024()));
  ASSERT_GE(t.row_count(), 1u);
  EXPECT_EQ(headline_value(t), Decimal::parse("14.6"));
}

TEST(TemplateTest, ShapeFollowsIntent) {
  std::string g = compile_template(margin_fy2025_guidance());
  EXPECT_NE(g.find("status = 'Guidance'"), std::string::npos) << g;
  QueryIntent c = margin_q4_2024();
  c.aggregation = Aggregation::kCount;
  EXPECT_EQ(compile_template(c).rfind("SELECT COUNT(*)", 0), 0u);
  std::string y = compile_template(revenue_q4_2024_yoy());
  EXPECT_NE(y.find("JOIN kpi prev"), std::string::npos) << y;
}

TEST(TemplateTest, EveryValidIntentCompilesToAPassingQuery) {
  std::mt19937_64 rng(5);
  auto store = init_store(":memory:");
  SchemaCard card = store->export_schema_card();
  for (int i = 0; i < 500; ++i) {
    QueryIntent in = random_intent(rng);
    SqlCandidate c{compile_template(in), in, GenerationSource::kTemplate, 0};
    ValidationReport r = validate_constraints(c, card);
    ASSERT_TRUE(r.passed()) << c.sql << "\n" << to_json(r).dump();
    EXPECT_NO_THROW(store->execute_sql(c.sql)) << c.sql;
  }
}

TEST(TemplateTest, AgreesWithBruteForceOracle) {
  std::mt19937_64 rng(17);
  int answered = 0;
  for (int round = 0; round < 20; ++round) {
    auto store = init_store(":memory:");
    std::vector<KpiRecord> records;
    for (int i = 0; i < 120; ++i) records.push_back(dense_record(rng, i));
    store->upsert_records(records);
    records = store->all_records();
    for (int q = 0; q < 40; ++q) {
      QueryIntent in = random_intent(rng);
      std::string sql = compile_template(in);
      auto expected = oracle_answer(in, records);
      auto actual = headline_value(store->execute_sql(sql));
      ASSERT_TRUE(answers_match(expected, actual))
          << sql << "\nintent " << to_json(in).dump() << "\noracle "
          << (expected ? std::to_string(*expected) : "none") << " sql "
          << (actual ? actual->to_string() : "none");
      if (expected) ++answered;
    }
  }
  EXPECT_GT(answered, 300);  // the generator is dense enough to be meaningful
}

// ---- constraint checks ----

TEST(ValidateConstraintsTest, Examples) {
  auto store = init_store(":memory:");
  SchemaCard card = store->export_schema_card();
  QueryIntent a = margin_q4_2024();
  auto check = [&](const std::string& sql) {
    return validate_constraints({sql, a, GenerationSource::kBackend, 0}, card);
  };
  EXPECT_TRUE(check("SELECT value FROM kpi WHERE metric = 'operating_margin' AND "
                    "period_granularity = 'Q4' AND period_year = 2024 AND status = 'Actual'")
                  .passed());
  auto r = check("SELECT value FROM kpi WHERE metric = 'operating_margin' AND "
                 "period_granularity = 'Q4' AND period_year = 2024");
  EXPECT_FALSE(r.qualifier_correct);
  EXPECT_TRUE(r.unit_consistent);
  r = check("SELECT value FROM sales WHERE metric = 'operating_margin'");
  EXPECT_FALSE(r.syntax_ok);
  r = check("SELECT nonsense FROM kpi");
  EXPECT_FALSE(r.syntax_ok);
  r = check("DELETE FROM kpi");
  EXPECT_FALSE(r.syntax_ok);
  ASSERT_FALSE(r.violations.empty());
  EXPECT_EQ(r.violations[0].rule, "syntax");
}

TEST(ValidateConstraintsTest, SeededMutationsAreAllCaught) {
  auto store = init_store(":memory:");
  SchemaCard card = store->export_schema_card();
  auto mutations = testing::seeded_mutations();
  ASSERT_EQ(mutations.size(), 30u);
  for (const auto& m : mutations) {
    ValidationReport r = validate_constraints(m.candidate, card);
    EXPECT_TRUE(r.syntax_ok) << m.name << ": " << m.candidate.sql;
    EXPECT_TRUE(testing::flagged(m, r)) << m.name << ": " << m.candidate.sql << "\n"
                                        << to_json(r).dump();
  }
}

// ---- execution with feedback ----

SqlCandidate backend(const std::string& sql, const QueryIntent& in) {
  return {sql, in, GenerationSource::kBackend, 0};
}

SqlCandidate templated(const QueryIntent& in) {
  return {compile_template(in), in, GenerationSource::kTemplate, 0};
}

TEST(ExecuteWithFeedbackTest, FirstValidCandidateWins) {
  auto store = margin_store();
  QueryIntent a = margin_q4_2024();
  std::string good =
      "SELECT value FROM kpi WHERE metric = 'operating_margin' AND period_granularity = 'Q4' "
      "AND period_year = 2024 AND status = 'Actual'";
  auto b = execute_with_feedback({backend(good, a), templated(a)}, *store);
  EXPECT_EQ(b.attempts, 1);
  EXPECT_EQ(b.chosen.source, GenerationSource::kBackend);
  EXPECT_EQ(headline_value(b.result), Decimal::parse("14.6"));
}

TEST(ExecuteWithFeedbackTest, RejectedCandidateFallsThrough) {
  auto store = margin_store();
  QueryIntent a = margin_q4_2024();
  std::string bad =
      "SELECT value FROM kpi WHERE metric = 'operating_margin' AND period_granularity = 'Q4' "
      "AND period_year = 2024 AND status = 'Guidance'";
  auto b = execute_with_feedback({backend(bad, a), templated(a)}, *store);
  EXPECT_EQ(b.attempts, 2);
  ASSERT_EQ(b.log.size(), 2u);
  EXPECT_EQ(b.log[0].outcome, AttemptOutcome::kConstraintFailure);
  EXPECT_EQ(b.chosen.source, GenerationSource::kTemplate);
  EXPECT_EQ(headline_value(b.result), Decimal::parse("14.6"));
}

TEST(ExecuteWithFeedbackTest, BudgetReservesTheTemplateSlot) {
  auto store = margin_store();
  QueryIntent a = margin_q4_2024();
  std::vector<SqlCandidate> cands;
  for (int i = 0; i < 6; ++i) cands.push_back(backend("SELECT value FROM kpi", a));
  cands.push_back(templated(a));
  auto b = execute_with_feedback(cands, *store, 2);
  EXPECT_EQ(b.attempts, 3);
  EXPECT_EQ(b.chosen.source, GenerationSource::kTemplate);
  b = execute_with_feedback(cands, *store, 0);
  EXPECT_EQ(b.attempts, 1);
  EXPECT_EQ(b.log[0].source, GenerationSource::kTemplate);
}

TEST(ExecuteWithFeedbackTest, RegeneratesOnceWithFeedback) {
  auto store = margin_store();
  QueryIntent a = margin_q4_2024();
  int calls = 0;
  std::string seen;
  Regenerate regen = [&](std::string_view feedback) {
    ++calls;
    seen = std::string(feedback);
    return std::vector<SqlCandidate>{backend(
        "SELECT value FROM kpi WHERE metric = 'operating_margin' AND period_granularity = 'Q4' "
        "AND period_year = 2024 AND status = 'Actual' LIMIT 5",
        a)};
  };
  auto b = execute_with_feedback({backend("SELECT value FROM kpi", a), templated(a)}, *store, 2,
                                 regen);
  EXPECT_EQ(calls, 1);
  EXPECT_NE(seen.find("ConstraintFailure"), std::string::npos) << seen;
  EXPECT_EQ(b.attempts, 2);
  EXPECT_EQ(b.chosen.source, GenerationSource::kBackend);
}

TEST(ExecuteWithFeedbackTest, EmptyStoreExplainsTheMiss) {
  auto store = init_store(":memory:");
  QueryIntent a = margin_q4_2024();
  auto b = execute_with_feedback({templated(a)}, *store);
  EXPECT_EQ(b.result.row_count(), 0u);
  EXPECT_EQ(b.explanation, "No records match operating margin for Q4 2024 (actual).");
  EXPECT_THROW(execute_with_feedback({}, *store), Error);
}

// ---- rendering ----

TEST(ExplainTest, Goldens) {
  auto store = margin_store();
  auto b = execute_with_feedback({templated(margin_q4_2024())}, *store);
  EXPECT_EQ(b.explanation, "Q4 2024 operating margin (actual) was 14.6%.");
  b = execute_with_feedback({templated(margin_fy2025_guidance())}, *store);
  EXPECT_EQ(b.explanation, "FY 2025 operating margin (guidance) is 16.0% (range 15.0% to 17.0%).");
  b = answer("How did Q4 2024 operating margin change year over year?", *store);
  EXPECT_EQ(b.explanation,
            "Q4 2024 operating margin (actual) was 14.6%, up 0.2 points from Q4 2023 (14.4%).");
}

TEST(ExplainTest, Money) {
  EXPECT_EQ(format_usd(Decimal::parse("4300000000"), Decimal::pow10(9)), "$4.3 billion");
  EXPECT_EQ(format_usd(Decimal::parse("150000000"), Decimal::pow10(6)), "$150 million");
  EXPECT_EQ(format_usd(Decimal::parse("1234567"), Decimal(1)), "$1,234,567");
  EXPECT_EQ(format_value(Decimal::parse("14.6"), Unit::kPercent, Decimal(1)), "14.6%");
}

// ---- end to end ----

TEST(AnswerTest, ReferenceQuestionsAndAudit) {
  testing::TempDir dir;
  auto audit = std::make_shared<AuditLog>(dir / "audit.jsonl", fixed_clock("T"));
  auto store = margin_store(audit);
  auto b = answer("What was GAAP operating margin in Q4 2024?", *store);
  EXPECT_EQ(headline_value(b.result), Decimal::parse("14.6"));
  ASSERT_FALSE(b.audit_id.empty());
  auto entry = audit->find(b.audit_id);
  ASSERT_TRUE(entry);
  EXPECT_EQ((*entry)["event"], "query");
  EXPECT_EQ((*entry)["data"]["sql"], b.chosen.sql);

  b = answer("What is the FY 2025 operating margin guidance?", *store);
  EXPECT_EQ(headline_value(b.result), Decimal(16));

  EXPECT_THROW(answer("What color is the logo?", *store), ClarificationNeeded);
  EXPECT_EQ(audit->entries().back()["event"], "clarification");
}

TEST(AnswerTest, ScriptedBackendCandidatesAreChecked) {
  auto store = margin_store();
  ScriptedBackend wrong({"```sql\nSELECT value FROM kpi WHERE metric = 'operating_margin' AND "
                         "period_granularity = 'Q4' AND period_year = 2024 AND "
                         "status = 'Guidance'\n```"});
  QueryConfig cfg;
  cfg.backend = &wrong;
  auto b = answer("What was Q4 2024 operating margin?", *store, cfg);
  EXPECT_EQ(headline_value(b.result), Decimal::parse("14.6"));
  EXPECT_EQ(b.chosen.source, GenerationSource::kTemplate);
  ASSERT_GE(wrong.prompts().size(), 2u);  // one regeneration round
  EXPECT_NE(wrong.prompts()[1].find("Guidance"), std::string::npos);

  ScriptedBackend firewall({"DROP TABLE kpi;"});
  cfg.backend = &firewall;
  b = answer("What was Q4 2024 operating margin?", *store, cfg);
  EXPECT_EQ(headline_value(b.result), Decimal::parse("14.6"));
  EXPECT_EQ(store->all_records().size(), 3u);

  FailingBackend down;
  cfg.backend = &down;
  b = answer("What was Q4 2024 operating margin?", *store, cfg);
  EXPECT_EQ(b.chosen.source, GenerationSource::kTemplate);
}

TEST(PromptTest, CarriesSchemaExamplesAndQuestion) {
  auto store = margin_store();
  std::string p = build_sql_prompt("What was Q4 2024 operating margin?", margin_q4_2024(),
                                   store->export_schema_card(), "previous attempt failed");
  EXPECT_NE(p.find("operating_margin"), std::string::npos);
  EXPECT_NE(p.find("previous attempt failed"), std::string::npos);
  EXPECT_NE(p.find("What was Q4 2024 operating margin?"), std::string::npos);
  auto sqls = parse_sql_completion("Here:\n```sql\nSELECT 1 FROM kpi;\n```\n");
  ASSERT_EQ(sqls.size(), 1u);
  EXPECT_EQ(parse_sql_completion("Sure. SELECT value FROM kpi; done").size(), 1u);
}

}  // namespace
}  // namespace finkpi
