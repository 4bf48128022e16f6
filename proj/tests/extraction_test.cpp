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

#include "finkpi/extraction.hpp"

#include <gtest/gtest.h>

#include <random>

#include "finkpi/error.hpp"
#include "finkpi/ingest.hpp"
#include "finkpi/period_phrase.hpp"
#include "finkpi/serialize.hpp"
#include "fixtures.hpp"

namespace finkpi {
namespace {

using testing::fixture_meta;
using testing::kConsensusSentence;
using testing::kMarginParagraph;

const MetricTaxonomy& tax() { return MetricTaxonomy::default_taxonomy(); }

Section section_of(const std::string& body, const std::string& title = "") {
  Section s;
  s.section_id = "s1";
  s.title = title;
  s.body = body;
  s.range = {0, body.size()};
  s.numeric_spans = ingest::detect_numeric_spans(s);
  return s;
}

Document doc_of(const std::string& text, const std::string& id = "doc-1") {
  return ingest::load_document(text, ingest::InputFormat::kPlainText, fixture_meta(id));
}

std::vector<ContextualSpan> contexts(const Section& s) {
  auto out = detect_candidates(s, tax(), "doc-1");
  for (auto& c : out) c = extract_context(std::move(c));
  return out;
}

// --- taxonomy -------------------------------------------------------------

TEST(TaxonomyTest, DefaultCoversReportedMetrics) {
  for (const char* m : {"revenue", "revenue_yoy_growth", "operating_income",
                        "operating_margin", "free_cash_flow", "eps", "gross_margin",
                        "consensus_delta"}) {
    EXPECT_TRUE(tax().contains(m)) << m;
  }
  EXPECT_EQ(tax().find("operating_margin")->value_class, ValueClass::kPercent);
  EXPECT_EQ(tax().find("revenue")->growth_metric, "revenue_yoy_growth");
}

TEST(TaxonomyTest, AliasClaimedTwiceIsRejected) {
  EXPECT_THROW(MetricTaxonomy({{"a", {"sales"}, ValueClass::kCurrency, "", ""},
                               {"b", {"Sales"}, ValueClass::kCurrency, "", ""}}),
               Error);
  EXPECT_THROW(MetricTaxonomy({{"a", {"x"}, ValueClass::kCurrency, "", ""},
                               {"a", {"y"}, ValueClass::kCurrency, "", ""}}),
               Error);
}

TEST(TaxonomyTest, LongestAliasWinsAndMatchingIgnoresCase) {
  auto hits = tax().find_aliases("TOTAL REVENUE rose; revenue growth slowed.");
  ASSERT_EQ(hits.size(), 2u);
  EXPECT_EQ(hits[0].alias, "TOTAL REVENUE");
  EXPECT_EQ(hits[0].canonical_name, "revenue");
  EXPECT_EQ(hits[1].canonical_name, "revenue_yoy_growth");
}

TEST(TaxonomyTest, AliasesMatchWholeWordsOnly) {
  EXPECT_TRUE(tax().find_aliases("Revenues2 and prerevenue").empty());
}

// --- period phrases -------------------------------------------------------

TEST(PeriodPhraseTest, FindsExplicitAndRelativeMentions) {
  auto m = find_period_mentions(
      "Q4 2024 vs last year; FY 2025, H1 2023, fourth quarter of 2022, fiscal "
      "year 2021 and 2019.");
  std::vector<std::string> texts;
  for (const auto& x : m) texts.push_back(x.text);
  EXPECT_EQ(texts, (std::vector<std::string>{"Q4 2024", "last year", "FY 2025", "H1 2023",
                                             "fourth quarter of 2022", "fiscal year 2021",
                                             "2019"}));
  EXPECT_TRUE(m[1].relative);
  EXPECT_FALSE(m[0].relative);
}

TEST(PeriodPhraseTest, ParsesExplicitPhrases) {
  EXPECT_EQ(parse_explicit_period("Q4 2024"), (ExplicitPeriod{Granularity::kQ4, 2024}));
  EXPECT_EQ(parse_explicit_period("FY2025"), (ExplicitPeriod{Granularity::kFY, 2025}));
  EXPECT_EQ(parse_explicit_period("h2 2023"), (ExplicitPeriod{Granularity::kH2, 2023}));
  EXPECT_EQ(parse_explicit_period("second half of fiscal 2022"),
            (ExplicitPeriod{Granularity::kH2, 2022}));
  EXPECT_EQ(parse_explicit_period("2020"), (ExplicitPeriod{Granularity::kFY, 2020}));
  EXPECT_FALSE(parse_explicit_period("Q5 2024"));
  EXPECT_FALSE(parse_explicit_period("FY 1850"));
  EXPECT_FALSE(parse_explicit_period("last year"));
  EXPECT_TRUE(is_relative_prior_phrase("prior year"));
  EXPECT_FALSE(is_relative_prior_phrase("Q4 2024"));
}

// --- candidates and context ------------------------------------------------

TEST(DetectCandidatesTest, MarginSentencePairsWithOperatingMargin) {
  auto c = contexts(section_of("Operating margin in Q4 2024 was 14.6%"));
  ASSERT_EQ(c.size(), 1u);
  EXPECT_EQ(c[0].alias.canonical_name, "operating_margin");
  EXPECT_EQ(c[0].period_phrase, "Q4 2024");
  EXPECT_EQ(c[0].sentence, "Operating margin in Q4 2024 was 14.6%");
}

TEST(DetectCandidatesTest, NumberWithoutAliasIsDropped) {
  EXPECT_TRUE(detect_candidates(section_of("Headcount reached 5,000"), tax()).empty());
}

TEST(DetectCandidatesTest, GrowthAndLevelBothPairWithRevenue) {
  auto c = detect_candidates(section_of("Revenue grew 15.2% to $2.52 billion"), tax());
  ASSERT_EQ(c.size(), 2u);
  EXPECT_EQ(c[0].alias.canonical_name, "revenue");
  EXPECT_EQ(c[0].numeric.surface, "15.2%");
  EXPECT_EQ(c[1].alias.canonical_name, "revenue");
  EXPECT_EQ(c[1].numeric.surface, "$2.52 billion");
}

TEST(DetectCandidatesTest, PrecedingAliasWinsOverCloserFollowingOne) {
  auto c = detect_candidates(section_of(kConsensusSentence), tax());
  ASSERT_EQ(c.size(), 3u);
  EXPECT_EQ(c[1].numeric.surface, "$4.3 billion");
  EXPECT_EQ(c[1].alias.canonical_name, "revenue");
  EXPECT_EQ(c[2].alias.canonical_name, "consensus_delta");
}

TEST(DetectCandidatesTest, FollowingAliasUsedWhenNothingPrecedes) {
  auto c = detect_candidates(section_of("At 31.5%, gross margin improved in Q2 2024."),
                             tax());
  ASSERT_EQ(c.size(), 1u);
  EXPECT_EQ(c[0].alias.canonical_name, "gross_margin");
}

TEST(DetectCandidatesTest, AliasesDoNotCrossSentences) {
  auto c = detect_candidates(section_of("Revenue was flat. Headcount was 5,000."), tax());
  EXPECT_TRUE(c.empty());
}

TEST(ExtractContextTest, GuidanceSentence) {
  auto c = contexts(section_of(
      "The company expects operating margin to be between 15\xE2\x80\x93" "17% in FY 2025."));
  ASSERT_EQ(c.size(), 1u);
  EXPECT_EQ(c[0].period_phrase, "FY 2025");
  EXPECT_EQ(c[0].qualifier_cues, std::vector<std::string>{"expects"});
  EXPECT_EQ(c[0].numeric.low, Decimal(15));
  EXPECT_EQ(c[0].numeric.high, Decimal(17));
}

TEST(ExtractContextTest, ConsensusSentenceHasPeriodAndNoCues) {
  auto c = contexts(section_of(kConsensusSentence));
  ASSERT_FALSE(c.empty());
  for (const auto& x : c) {
    EXPECT_EQ(x.period_phrase, "Q1 2024");
    EXPECT_TRUE(x.qualifier_cues.empty());
  }
}

TEST(ExtractContextTest, NoPeriodAndNoHeaderLeavesPhraseEmpty) {
  auto c = contexts(section_of("Revenue grew 15.2% to $2.52 billion."));
  ASSERT_EQ(c.size(), 2u);
  EXPECT_EQ(c[0].period_phrase, "");
  EXPECT_FALSE(c[0].period_from_header);
}

TEST(ExtractContextTest, RelativePeriodIsAnchoredToCoMention) {
  auto c = contexts(section_of("Operating margin in Q4 2024 was 14.6%, up from 14.4% last year."));
  ASSERT_EQ(c.size(), 2u);
  EXPECT_EQ(c[0].period_phrase, "Q4 2024");
  EXPECT_EQ(c[0].anchor_period_phrase, "");
  EXPECT_EQ(c[1].period_phrase, "last year");
  EXPECT_EQ(c[1].anchor_period_phrase, "Q4 2024");
}

TEST(ExtractContextTest, FallsBackToHeaderTitle) {
  auto c = contexts(section_of("The company expects revenue of $5.1 billion.", "FY 2026 OUTLOOK"));
  ASSERT_EQ(c.size(), 1u);
  EXPECT_EQ(c[0].period_phrase, "FY 2026");
  EXPECT_TRUE(c[0].period_from_header);
}

TEST(ExtractContextTest, NonGaapIsNotAlsoReadAsGaap) {
  EXPECT_EQ(find_qualifier_cues("Adjusted, non-GAAP EPS was approximately $1.10."),
            (std::vector<std::string>{"adjusted", "non-GAAP", "approximately"}));
  EXPECT_EQ(find_qualifier_cues("GAAP operating income will be lower."),
            (std::vector<std::string>{"GAAP", "will be"}));
}

// --- prompt ---------------------------------------------------------------

TEST(PromptTest, DomainAwarePromptCarriesSchemaAndInstruction) {
  TargetSchema schema{{{"Period", ""},
                       {"Revenue", "B"},
                       {"Revenue_YoY_Growth", ""},
                       {"Consensus_Delta", "M"}}};
  std::string p = build_extraction_prompt(section_of(kConsensusSentence), tax(), schema);
  EXPECT_EQ(p.rfind(kExtractionInstruction, 0), 0u);
  for (const char* f : {"Period", "Revenue (B)", "Revenue_YoY_Growth", "Consensus_Delta (M)",
                        "Output in JSON", kConsensusSentence}) {
    EXPECT_NE(p.find(f), std::string::npos) << f;
  }
  EXPECT_EQ(p.find("Extract key financial figures"), std::string::npos);
}

TEST(PromptTest, EmptyTaxonomyOmitsAliasList) {
  std::string p = build_extraction_prompt(section_of("Revenue was $1 million."),
                                          MetricTaxonomy(), TargetSchema{{{"Period", ""}}});
  EXPECT_NE(p.find("Schema:"), std::string::npos);
  EXPECT_EQ(p.find("Metric aliases"), std::string::npos);
}

TEST(PromptTest, ByteIdenticalAcrossBuilds) {
  Section s = section_of(kMarginParagraph, "RESULTS");
  std::string first =
      build_extraction_prompt(s, tax(), TargetSchema::from_taxonomy(tax()));
  for (int i = 0; i < 10; ++i) {
    EXPECT_EQ(build_extraction_prompt(s, tax(), TargetSchema::from_taxonomy(tax())), first);
  }
}

TEST(PromptTest, DefaultSchemaNamesFollowTheTaxonomy) {
  auto schema = TargetSchema::from_taxonomy(tax());
  ASSERT_EQ(schema.fields.size(), tax().entries().size() + 1);
  EXPECT_EQ(schema.fields[0].name, "Period");
  EXPECT_EQ(schema.fields[2], (TargetField{"Revenue_YoY_Growth", "%"}));
}

// --- completion parsing ------------------------------------------------------

TEST(ParseBackendOutputTest, FlatDomainAwareOutput) {
  Section s = section_of(kConsensusSentence);
  auto parsed = parse_backend_output(
      R"({ "Period": "Q1 2024", "Revenue": {value: 4.3, unit: "B"}, )"
      R"("Revenue_YoY_Growth": "12%", "Consensus_Delta": {value: 150, unit: "M"} })",
      s, "doc-1", tax());
  EXPECT_TRUE(parsed.dropped.empty());
  ASSERT_EQ(parsed.records.size(), 3u);
  const auto& growth = parsed.records[0];
  EXPECT_EQ(growth.metric, "revenue_yoy_growth");
  EXPECT_EQ(growth.value_low, Decimal(12));
  EXPECT_EQ(growth.unit_token, "%");
  const auto& revenue = parsed.records[1];
  EXPECT_EQ(revenue.metric, "revenue");
  EXPECT_EQ(revenue.value_low, Decimal::parse("4.3"));
  EXPECT_EQ(revenue.value_high, Decimal::parse("4.3"));
  EXPECT_EQ(revenue.unit_token, "B");
  EXPECT_EQ(revenue.period_phrase, "Q1 2024");
  EXPECT_EQ(s.body.substr(revenue.provenance.range.start, revenue.provenance.range.size()),
            "$4.3 billion");
  const auto& delta = parsed.records[2];
  EXPECT_EQ(delta.metric, "consensus_delta");
  EXPECT_EQ(delta.value_low, Decimal(150));
  EXPECT_EQ(delta.unit_token, "M");
}

TEST(ParseBackendOutputTest, EmptyObjectYieldsNothing) {
  auto parsed = parse_backend_output("{}", section_of(kConsensusSentence), "d", tax());
  EXPECT_TRUE(parsed.records.empty());
  EXPECT_TRUE(parsed.dropped.empty());
}

TEST(ParseBackendOutputTest, FabricatedValueIsDropped) {
  Section s = section_of(kConsensusSentence);
  MockBackend::Options opt;
  opt.fabrication_rate = 1.0;
  opt.fabricated_value = "9.9";
  MockBackend backend(tax(), opt);
  std::string reply = backend.complete(
      build_extraction_prompt(s, tax(), TargetSchema::from_taxonomy(tax())));
  ASSERT_NE(reply.find("9.9"), std::string::npos);
  auto parsed = parse_backend_output(reply, s, "doc-1", tax());
  EXPECT_TRUE(parsed.records.empty());
  EXPECT_EQ(parsed.dropped.size(), 3u);
}

TEST(ParseBackendOutputTest, FlatValueNotInTextIsDropped) {
  auto parsed = parse_backend_output(R"({"Revenue": "9.9B"})",
                                     section_of(kConsensusSentence), "d", tax());
  EXPECT_TRUE(parsed.records.empty());
  ASSERT_EQ(parsed.dropped.size(), 1u);
}

TEST(ParseBackendOutputTest, UnknownMetricIsDropped) {
  auto parsed = parse_backend_output(
      R"({"records": [{"metric": "headcount", "value_low": "12", "value_high": "12"}]})",
      section_of(kConsensusSentence), "d", tax());
  EXPECT_TRUE(parsed.records.empty());
  EXPECT_EQ(parsed.dropped.size(), 1u);
}

TEST(ParseBackendOutputTest, FencedReplyIsAccepted) {
  auto parsed = parse_backend_output("```json\n{\"Revenue\": \"$4.3 billion\"}\n```",
                                     section_of(kConsensusSentence), "d", tax());
  ASSERT_EQ(parsed.records.size(), 1u);
  EXPECT_EQ(parsed.records[0].unit_token, "billion");
  EXPECT_EQ(parsed.records[0].period_phrase, "Q1 2024");
}

TEST(ParseBackendOutputTest, BrokenJsonIsMalformed) {
  Section s = section_of(kConsensusSentence);
  for (const char* bad : {"no json here", "{\"records\": [", "{\"records\": 5}",
                          "{\"records\": [{\"metric\": \"revenue\"}]}", "42"}) {
    try {
      parse_backend_output(bad, s, "d", tax());
      ADD_FAILURE() << bad;
    } catch (const Error& e) {
      EXPECT_EQ(e.code(), ErrorCode::kMalformedCompletion) << bad;
    }
  }
}

// --- whole documents ---------------------------------------------------------

TEST(ExtractDocumentTest, MarginParagraphYieldsFiveRecords) {
  Document doc = doc_of(kMarginParagraph);
  MockBackend backend(tax());
  auto report = extract_document(doc, backend, tax());
  EXPECT_TRUE(report.failures.empty());
  ASSERT_EQ(report.records.size(), 5u);
  const auto& r = report.records;
  EXPECT_EQ(r[0].metric, "operating_margin");
  EXPECT_EQ(r[0].value_low, Decimal::parse("14.6"));
  EXPECT_EQ(r[0].period_phrase, "Q4 2024");
  EXPECT_EQ(r[1].metric, "operating_margin");
  EXPECT_EQ(r[1].value_low, Decimal::parse("14.4"));
  EXPECT_EQ(r[1].period_phrase, "last year");
  EXPECT_EQ(r[1].anchor_period_phrase, "Q4 2024");
  EXPECT_EQ(r[2].metric, "revenue_yoy_growth");
  EXPECT_EQ(r[2].value_low, Decimal::parse("15.2"));
  EXPECT_EQ(r[3].metric, "revenue");
  EXPECT_EQ(r[3].value_low, Decimal::parse("2.52"));
  EXPECT_EQ(r[3].unit_token, "billion");
  EXPECT_EQ(r[4].metric, "operating_margin");
  EXPECT_EQ(r[4].value_low, Decimal(15));
  EXPECT_EQ(r[4].value_high, Decimal(17));
  EXPECT_EQ(r[4].period_phrase, "FY 2025");
  EXPECT_EQ(r[4].qualifier_cues, std::vector<std::string>{"expects"});
  for (const auto& rec : r) {
    EXPECT_EQ(rec.provenance.doc_id, "doc-1");
    EXPECT_EQ(rec.backend_confidence, 1.0);
  }
}

TEST(ExtractDocumentTest, NoNumbersNoRecordsNoCalls) {
  MockBackend backend(tax());
  auto report = extract_document(doc_of("Nothing numeric is said here."), backend, tax());
  EXPECT_TRUE(report.records.empty());
  EXPECT_EQ(report.backend_calls, 0u);
}

TEST(ExtractDocumentTest, RepairReAskRecovers) {
  MockBackend::Options opt;
  opt.malformed_unless_repair = true;
  MockBackend backend(tax(), opt);
  auto report = extract_document(doc_of(kConsensusSentence), backend, tax());
  EXPECT_TRUE(report.failures.empty());
  EXPECT_EQ(report.backend_calls, 2u);
  EXPECT_EQ(report.records.size(), 3u);
}

TEST(ExtractDocumentTest, PersistentGarbageFailsOnlyThatSection) {
  MockBackend::Options opt;
  opt.always_malformed = true;
  MockBackend backend(tax(), opt);
  auto report = extract_document(doc_of(kConsensusSentence), backend, tax());
  ASSERT_EQ(report.failures.size(), 1u);
  EXPECT_EQ(report.failures[0].section_id, "s1");
  EXPECT_EQ(report.backend_calls, 2u);
  EXPECT_TRUE(report.records.empty());
}

class SelectiveBackend : public CompletionBackend {
 public:
  explicit SelectiveBackend(const CompletionBackend& inner) : inner_(inner) {}
  std::string complete(std::string_view prompt) const override {
    if (prompt.find("Section id: s3\n") != std::string_view::npos) return "garbage";
    return inner_.complete(prompt);
  }
  std::string name() const override { return "selective"; }

 private:
  const CompletionBackend& inner_;
};

std::string many_sections(int n) {
  std::string text;
  for (int i = 0; i < n; ++i) {
    text += "Revenue in Q" + std::to_string(i % 4 + 1) + " 20" + std::to_string(10 + i) +
            " was $" + std::to_string(i + 1) + ".5 million.\n\n";
  }
  return text;
}

TEST(ExtractDocumentTest, FailingSectionDoesNotAbortTheDocument) {
  MockBackend mock(tax());
  SelectiveBackend backend(mock);
  Document doc = doc_of(many_sections(5));
  ASSERT_EQ(doc.sections.size(), 5u);
  auto report = extract_document(doc, backend, tax());
  ASSERT_EQ(report.failures.size(), 1u);
  EXPECT_EQ(report.failures[0].section_id, "s3");
  EXPECT_EQ(report.records.size(), 4u);
}

TEST(ExtractDocumentTest, OrderIsIndependentOfParallelism) {
  Document doc = doc_of(many_sections(12));
  MockBackend backend(tax());
  ExtractionOptions serial;
  serial.parallelism = 1;
  auto a = extract_document(doc, backend, tax(), serial);
  auto b = extract_document(doc, backend, tax());
  ASSERT_EQ(a.records.size(), 12u);
  EXPECT_EQ(a.records, b.records);
  for (size_t i = 0; i < a.records.size(); ++i) {
    EXPECT_EQ(a.records[i].provenance.section_id, "s" + std::to_string(i + 1));
  }
}

TEST(ExtractDocumentTest, RunsAreIdentical) {
  Document doc = doc_of(kMarginParagraph);
  MockBackend backend(tax());
  auto dump = [&] {
    Json j = Json::array();
    for (const auto& r : extract_document(doc, backend, tax()).records) j.push_back(to_json(r));
    return j.dump();
  };
  EXPECT_EQ(dump(), dump());
}

TEST(ExtractDocumentTest, FabricationDependsOnSeed) {
  Document doc = doc_of(many_sections(40));
  auto kept = [&](std::uint64_t seed) {
    MockBackend::Options opt;
    opt.seed = seed;
    opt.fabrication_rate = 0.5;
    MockBackend backend(tax(), opt);
    auto report = extract_document(doc, backend, tax());
    EXPECT_EQ(report.records.size() + report.dropped, 40u);
    std::vector<std::string> ids;
    for (const auto& r : report.records) ids.push_back(r.provenance.section_id);
    return ids;
  };
  EXPECT_EQ(kept(1), kept(1));
  EXPECT_NE(kept(1), kept(2));
}

// Every emitted record carries the face values of a span in its section.
TEST(ExtractionPropertyTest, RecordsAreGroundedAndInTaxonomy) {
  std::mt19937_64 rng(11);
  const std::vector<std::string> subjects = {"Revenue", "Operating margin", "Free cash flow",
                                             "Gross margin", "EPS", "Headcount"};
  const std::vector<std::string> amounts = {"$1.2 billion", "14.6%", "$350 million",
                                            "15\xE2\x80\x93" "17%", "$0.85", "3,100",
                                            "22 to 24 percent"};
  MockBackend backend(tax());
  for (int trial = 0; trial < 200; ++trial) {
    std::string text;
    int sentences = 1 + static_cast<int>(rng() % 6);
    for (int i = 0; i < sentences; ++i) {
      text += subjects[rng() % subjects.size()] + " in Q" + std::to_string(rng() % 4 + 1) +
              " 2024 was " + amounts[rng() % amounts.size()] + ". ";
      if (rng() % 4 == 0) text += "\n\n";
    }
    Document doc = doc_of(text);
    auto report = extract_document(doc, backend, tax());
    EXPECT_TRUE(report.failures.empty());
    for (const auto& r : report.records) {
      EXPECT_TRUE(tax().contains(r.metric));
      EXPECT_LE(r.value_low, r.value_high);
      const Section* s = doc.find_section(r.provenance.section_id);
      ASSERT_NE(s, nullptr);
      bool grounded = false;
      for (const auto& span : s->numeric_spans) {
        grounded |= span.range == r.provenance.range && span.low == r.value_low &&
                    span.high == r.value_high;
      }
      EXPECT_TRUE(grounded) << text;
    }
  }
}

}  // namespace
}  // namespace finkpi
