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

#include "finkpi/validation.hpp"

#include <gtest/gtest.h>

#include <random>

#include "finkpi/extraction.hpp"
#include "finkpi/ingest.hpp"
#include "finkpi/rules.hpp"
#include "fixtures.hpp"

namespace finkpi {
namespace {

using testing::fixture_meta;

const MetricTaxonomy& tax() { return MetricTaxonomy::default_taxonomy(); }

struct Fixture {
  Document doc;
  std::vector<KpiRecord> records;
};

Fixture margin_fixture() {
  Fixture f;
  f.doc = ingest::load_document(testing::kMarginParagraph, ingest::InputFormat::kPlainText,
                                fixture_meta());
  for (const auto& raw : extract_document(f.doc, MockBackend(tax()), tax()).records) {
    auto res = apply_rules(raw, RuleSet{}, f.doc.meta, tax());
    if (auto* r = std::get_if<KpiRecord>(&res)) f.records.push_back(*r);
  }
  return f;
}

const KpiRecord& guidance_of(const Fixture& f) {
  for (const auto& r : f.records) {
    if (r.qualifier.status == Status::kGuidance) return r;
  }
  throw std::runtime_error("fixture lacks guidance");
}

TEST(RunChecksTest, GuidanceRecordPassesEverything) {
  Fixture f = margin_fixture();
  ASSERT_EQ(f.records.size(), 3u);  // revenue lines carry no period
  const KpiRecord& g = guidance_of(f);
  auto out = run_checks(g, &f.doc, tax());
  ASSERT_EQ(out.checks.size(), 5u);
  for (const auto& c : out.checks) {
    EXPECT_EQ(c.outcome, CheckOutcome::kPass) << c.check_id << ": " << c.detail;
    EXPECT_FALSE(c.question.empty());
  }
  EXPECT_EQ(out.disposition, Disposition::kAccepted);
  EXPECT_EQ(score_confidence(g, out), Decimal(1));
}

TEST(RunChecksTest, NegativeRevenueIsFlagged) {
  KpiRecord r;
  r.metric = "revenue";
  r.value = r.value_low = r.value_high = Decimal(-5);
  r.unit = Unit::kUSD;
  r.period = {Granularity::kFY, 2024, PeriodSource::kExplicit};
  r.published_on = *Date::parse("2025-02-01");
  r.provenance = {"doc-1", "s1", {0, 2}};
  auto out = run_checks(r, nullptr, tax());
  EXPECT_EQ(out.find(CheckKind::kUnitPlausible)->outcome, CheckOutcome::kFail);
  EXPECT_EQ(out.find(CheckKind::kValueInSource)->outcome, CheckOutcome::kSkipped);
  EXPECT_EQ(out.disposition, Disposition::kFlagged);
}

TEST(RunChecksTest, WrongMidpointIsCorrected) {
  Fixture f = margin_fixture();
  KpiRecord g = guidance_of(f);
  g.value = Decimal::parse("16.1");
  auto out = run_checks(g, &f.doc, tax());
  EXPECT_EQ(out.find(CheckKind::kRangeMidpoint)->outcome, CheckOutcome::kFail);
  EXPECT_EQ(out.disposition, Disposition::kCorrected);
  ASSERT_EQ(out.corrections.size(), 1u);
  EXPECT_EQ(out.corrections[0], (FieldCorrection{"value", "16.1", "16"}));

  ValidatedRecord v = validate_record(g, &f.doc, tax());
  EXPECT_EQ(v.record.value, Decimal(16));
  EXPECT_EQ(v.record.confidence, Decimal::parse("0.85"));
  // Re-validating the corrected record is clean.
  EXPECT_EQ(run_checks(v.record, &f.doc, tax()).disposition, Disposition::kAccepted);
}

TEST(RunChecksTest, ValueMustMatchScaledSource) {
  Fixture f = margin_fixture();
  KpiRecord r = f.records[0];
  r.value = r.value_low = r.value_high = Decimal::parse("14.7");
  auto out = run_checks(r, &f.doc, tax());
  EXPECT_EQ(out.find(CheckKind::kValueInSource)->outcome, CheckOutcome::kFail);
  EXPECT_EQ(out.disposition, Disposition::kFlagged);
}

TEST(RunChecksTest, PeriodBands) {
  Fixture f = margin_fixture();
  KpiRecord r = f.records[0];
  r.period.year = 2019;
  EXPECT_EQ(run_checks(r, &f.doc, tax()).find(CheckKind::kPeriodConsistent)->outcome,
            CheckOutcome::kFail);
  KpiRecord g = guidance_of(f);
  g.period.year = 2030;
  EXPECT_EQ(run_checks(g, &f.doc, tax()).find(CheckKind::kPeriodConsistent)->outcome,
            CheckOutcome::kPass);
  g.period.year = 2022;
  EXPECT_EQ(run_checks(g, &f.doc, tax()).find(CheckKind::kPeriodConsistent)->outcome,
            CheckOutcome::kFail);
}

TEST(RunChecksTest, QualifierMustFollowCues) {
  Fixture f = margin_fixture();
  KpiRecord g = guidance_of(f);
  g.qualifier.status = Status::kActual;
  auto out = run_checks(g, &f.doc, tax());
  EXPECT_EQ(out.find(CheckKind::kQualifierConsistent)->outcome, CheckOutcome::kFail);
  EXPECT_EQ(out.disposition, Disposition::kFlagged);
}

TEST(RunChecksTest, MarginAboveHundredIsImplausible) {
  Fixture f = margin_fixture();
  KpiRecord r = f.records[0];
  r.value = r.value_low = r.value_high = Decimal(146);
  EXPECT_EQ(run_checks(r, &f.doc, tax()).find(CheckKind::kUnitPlausible)->outcome,
            CheckOutcome::kFail);
}

TEST(ScoreConfidenceTest, Formula) {
  KpiRecord r;
  ValidationOutcome o;
  for (int i = 0; i < 5; ++i) o.checks.push_back({"c", CheckKind::kValueInSource, "q",
                                                   CheckOutcome::kPass, ""});
  EXPECT_EQ(score_confidence(r, o), Decimal(1));
  o.checks[0].outcome = CheckOutcome::kFail;
  o.disposition = Disposition::kFlagged;
  EXPECT_EQ(score_confidence(r, o), Decimal::parse("0.85"));
  o.checks[0].outcome = CheckOutcome::kSkipped;
  o.checks[1].outcome = CheckOutcome::kSkipped;
  o.disposition = Disposition::kAccepted;
  EXPECT_EQ(score_confidence(r, o), Decimal::parse("0.90"));
  for (auto& c : o.checks) c.outcome = CheckOutcome::kFail;
  EXPECT_EQ(score_confidence(r, o), Decimal::parse("0.25"));
  o.checks.push_back(o.checks[0]);
  o.checks.push_back(o.checks[0]);
  EXPECT_EQ(score_confidence(r, o), Decimal(0));
}

TEST(ScoreConfidenceTest, AddingAFailNeverRaisesTheScore) {
  std::mt19937_64 rng(3);
  KpiRecord r;
  for (int i = 0; i < 2000; ++i) {
    ValidationOutcome o;
    for (int k = 0; k < 5; ++k) {
      o.checks.push_back({"c", CheckKind::kValueInSource, "q",
                          static_cast<CheckOutcome>(rng() % 3), ""});
    }
    o.disposition = static_cast<Disposition>(rng() % 3);
    Decimal before = score_confidence(r, o);
    for (auto& c : o.checks) {
      if (c.outcome != CheckOutcome::kFail) {
        c.outcome = CheckOutcome::kFail;
        break;
      }
    }
    EXPECT_LE(score_confidence(r, o), before);
  }
}

KpiRecord well_formed() {
  KpiRecord r;
  r.metric = "operating_margin";
  r.value = Decimal(16);
  r.value_low = Decimal(15);
  r.value_high = Decimal(17);
  r.unit = Unit::kPercent;
  r.period = {Granularity::kFY, 2025, PeriodSource::kExplicit};
  r.qualifier = {Basis::kUnstated, Status::kGuidance};
  r.provenance = {"doc-1", "s1", {10, 16}};
  return r;
}

TEST(ValidateSchemaTest, Cases) {
  EXPECT_TRUE(validate_schema(well_formed(), &tax()).empty());

  KpiRecord r = well_formed();
  r.period = FiscalPeriod{};
  auto v = validate_schema(r);
  ASSERT_EQ(v.size(), 1u);
  EXPECT_EQ(v[0].kind, ViolationKind::kUnresolvedPeriod);

  r = well_formed();
  r.value = r.value_low = r.value_high = Decimal(5000);
  v = validate_schema(r);
  ASSERT_EQ(v.size(), 1u);
  EXPECT_EQ(v[0].kind, ViolationKind::kPercentOutOfBand);

  r = well_formed();
  r.value = Decimal::parse("16.1");
  EXPECT_EQ(validate_schema(r)[0].kind, ViolationKind::kValueNotMidpoint);
  r = well_formed();
  std::swap(r.value_low, r.value_high);
  EXPECT_EQ(validate_schema(r)[0].kind, ViolationKind::kInvertedBounds);
  r = well_formed();
  r.scale_applied = Decimal(1000);
  EXPECT_EQ(validate_schema(r)[0].kind, ViolationKind::kInvalidScale);
  r = well_formed();
  r.confidence = Decimal::parse("1.5");
  EXPECT_EQ(validate_schema(r)[0].kind, ViolationKind::kConfidenceOutOfRange);
  r = well_formed();
  r.provenance.doc_id.clear();
  EXPECT_EQ(validate_schema(r)[0].kind, ViolationKind::kMissingProvenance);
  r = well_formed();
  r.metric = "headcount";
  EXPECT_TRUE(validate_schema(r).empty());
  EXPECT_EQ(validate_schema(r, &tax())[0].kind, ViolationKind::kUnknownMetric);
  r = well_formed();
  r.unit = static_cast<Unit>(17);
  EXPECT_EQ(validate_schema(r)[0].kind, ViolationKind::kInvalidEnum);
  r = well_formed();
  r.period.year = 1800;
  EXPECT_EQ(validate_schema(r)[0].kind, ViolationKind::kYearOutOfRange);
}

TEST(ValidateSchemaTest, RuleOutputsAreSchemaClean) {
  Fixture f = margin_fixture();
  for (const auto& r : f.records) {
    EXPECT_TRUE(validate_schema(validate_record(r, &f.doc, tax()).record, &tax()).empty());
  }
}

}  // namespace
}  // namespace finkpi
