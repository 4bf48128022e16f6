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
#include "finkpi/pipeline.hpp"

#include <gtest/gtest.h>

#include <fstream>

#include "finkpi/config.hpp"
#include "finkpi/error.hpp"
#include "fixtures.hpp"
#include "temp_dir.hpp"

namespace finkpi {
namespace {

namespace fs = std::filesystem;
using testing::TempDir;

// Margins above 100% fail the plausibility check.
constexpr const char* kImplausible =
    "Operating margin in Q4 2024 was 146%. Gross margin in Q4 2024 was 212%.";

const MetricTaxonomy& tax() { return MetricTaxonomy::default_taxonomy(); }

void write(const fs::path& p, const std::string& text) {
  std::ofstream out(p, std::ios::binary);
  out << text;
}

void write_sidecar(const fs::path& txt, const std::string& doc_id) {
  fs::path side = txt;
  side.replace_extension(".json");
  write(side, R"({"doc_id": ")" + doc_id +
                  R"(", "company": "ACME", "published_on": "2025-02-01", )"
                  R"("source_kind": "EarningsRelease"})");
}

TEST(ProcessDocumentTest, MarginParagraph) {
  Document doc = ingest::load_document(testing::kMarginParagraph,
                                       ingest::InputFormat::kPlainText, testing::fixture_meta());
  DocumentResult r = process_document(doc, MockBackend(tax()), RuleSet{}, tax());
  EXPECT_EQ(r.doc_id, "doc-1");
  EXPECT_EQ(r.count(Disposition::kAccepted), 3u);
  EXPECT_EQ(r.rejections.size(), 2u);  // the revenue sentence has no period
  EXPECT_EQ(r.storable().size(), 3u);
}

TEST(ProcessDocumentTest, FlaggedRecordsAreNotStorable) {
  Document doc = ingest::load_document(kImplausible, ingest::InputFormat::kPlainText,
                                       testing::fixture_meta());
  DocumentResult r = process_document(doc, MockBackend(tax()), RuleSet{}, tax());
  ASSERT_EQ(r.validated.size(), 2u);
  EXPECT_EQ(r.count(Disposition::kFlagged), r.validated.size());
  EXPECT_TRUE(r.storable().empty());
  Json entry = review_entry(r.validated[0]);
  EXPECT_EQ(entry["disposition"], "Flagged");
  EXPECT_EQ(entry["checks"].size(), 5u);
}

TEST(IngestFilesTest, OneValidFile) {
  TempDir dir;
  write(dir / "acme.txt", testing::kMarginParagraph);
  write_sidecar(dir / "acme.txt", "acme-q4");
  auto store = init_store(":memory:");
  IngestOptions opts;
  opts.review_path = dir / "review.jsonl";
  auto report = ingest_files(expand_inputs({dir / "acme.txt"}), *store, MockBackend(tax()), opts);
  ASSERT_EQ(report.files.size(), 1u);
  EXPECT_TRUE(report.files[0].ok) << report.files[0].error;
  EXPECT_EQ(report.files[0].doc_id, "acme-q4");
  EXPECT_GE(report.files[0].accepted, 1u);
  EXPECT_EQ(store->row_count(), 3u);
  EXPECT_FALSE(report.all_failed());
  EXPECT_EQ(store->all_records()[0].company, "ACME");
}

TEST(IngestFilesTest, PartialSidecarKeepsDefaults) {
  TempDir dir;
  write(dir / "acme.txt", testing::kMarginParagraph);
  write(dir / "acme.json", R"({"company": "ACME"})");
  DocumentMeta m = meta_for(dir / "acme.txt");
  EXPECT_EQ(m.doc_id, "acme");
  EXPECT_EQ(m.company, "ACME");
  EXPECT_EQ(m.source_kind, SourceKind::kEarningsRelease);
  write(dir / "acme.json", "[1]");
  EXPECT_THROW(meta_for(dir / "acme.txt"), Error);
}

TEST(IngestFilesTest, DirectoryWithOneUnreadableFile) {
  TempDir dir;
  for (int i = 0; i < 4; ++i) {
    fs::path p = dir / ("f" + std::to_string(i) + ".txt");
    write(p, testing::kMarginParagraph);
    write_sidecar(p, "doc-" + std::to_string(i));
  }
  fs::create_symlink(dir / "missing-target.txt", dir / "f9.txt");
  write(dir / "notes.md", "ignored");
  auto inputs = expand_inputs({dir.path()});
  ASSERT_EQ(inputs.size(), 5u);
  auto store = init_store(":memory:");
  auto report = ingest_files(inputs, *store, MockBackend(tax()), {});
  ASSERT_EQ(report.files.size(), 5u);
  EXPECT_EQ(report.failed(), 1u);
  EXPECT_FALSE(report.all_failed());
  EXPECT_FALSE(report.files[4].ok);
  EXPECT_NE(report.files[4].error.find("f9.txt"), std::string::npos);
  EXPECT_EQ(store->row_count(), 12u);
  EXPECT_NE(render(report).find("5 files, 1 failed"), std::string::npos);
  EXPECT_EQ(to_json(report)["failed"], 1);
}

TEST(IngestFilesTest, EmptyDirectoryAndTotalFailure) {
  TempDir dir;
  fs::create_directories(dir / "empty");
  auto store = init_store(":memory:");
  auto report = ingest_files(expand_inputs({dir / "empty"}), *store, MockBackend(tax()), {});
  EXPECT_TRUE(report.files.empty());
  EXPECT_FALSE(report.all_failed());
  EXPECT_EQ(render(report), "0 files\n");

  write(dir / "bad.txt", std::string("\xff\xfe broken", 9));
  report = ingest_files({dir / "bad.txt", dir / "gone.txt"}, *store, MockBackend(tax()), {});
  EXPECT_TRUE(report.all_failed());
}

TEST(IngestFilesTest, ReingestIsIdempotentAndReviewGetsFlagged) {
  TempDir dir;
  write(dir / "acme.txt", testing::kMarginParagraph);
  write_sidecar(dir / "acme.txt", "acme-q4");
  auto store = init_store(":memory:");
  IngestOptions opts;
  opts.review_path = dir / "out" / "review.jsonl";
  auto first = ingest_files({dir / "acme.txt"}, *store, MockBackend(tax()), opts);
  auto second = ingest_files({dir / "acme.txt"}, *store, MockBackend(tax()), opts);
  EXPECT_EQ(first.files[0].stored, 3u);
  EXPECT_EQ(second.files[0].stored, 0u);
  EXPECT_EQ(store->row_count(), 3u);

  write(dir / "odd.txt", kImplausible);
  auto flagged = ingest_files({dir / "odd.txt"}, *store, MockBackend(tax()), opts);
  EXPECT_EQ(flagged.files[0].flagged, 2u);
  EXPECT_EQ(flagged.files[0].stored, 0u);
  std::ifstream in(opts.review_path);
  std::string line;
  int lines = 0;
  while (std::getline(in, line)) {
    EXPECT_EQ(Json::parse(line)["disposition"], "Flagged");
    ++lines;
  }
  EXPECT_EQ(lines, 2);
}

TEST(MetaForTest, SidecarOrFallback) {
  TempDir dir;
  write(dir / "plain.txt", "text");
  DocumentMeta m = meta_for(dir / "plain.txt");
  EXPECT_EQ(m.doc_id, "plain");
  EXPECT_GE(m.published_on.year, 2020);
  write(dir / "bad.txt", "text");
  write(dir / "bad.json", "{not json");
  EXPECT_THROW(meta_for(dir / "bad.txt"), Error);
}

TEST(ConfigTest, FileEnvironmentAndValidation) {
  TempDir dir;
  write(dir / "finkpi.json", R"({"backend": "mock", "rules": {"unit_resolution": false},
      "store_path": "kpi.db", "parallelism": 2, "server": {"port": 9000}})");
  PipelineConfig c = load_config(dir / "finkpi.json");
  EXPECT_EQ(c.store_path, dir / "kpi.db");
  EXPECT_FALSE(c.rules.unit_resolution);
  EXPECT_TRUE(c.rules.period_resolution);
  EXPECT_EQ(c.parallelism, 2);
  EXPECT_EQ(c.server.port, 9000);
  EXPECT_NO_THROW(validate_config(c));

  std::map<std::string, std::string> env = {{"FINKPI_BACKEND", "live"},
                                            {"FINKPI_API_TOKEN", "s3cret"}};
  auto lookup = [&](const char* k) -> const char* {
    auto it = env.find(k);
    return it == env.end() ? nullptr : it->second.c_str();
  };
  apply_environment(c, lookup);
  EXPECT_EQ(c.backend, BackendKind::kLive);
  EXPECT_EQ(c.server.bearer_token, "s3cret");
  EXPECT_THROW(validate_config(c), Error);  // live without credentials
  env["FINKPI_LLM_URL"] = "https://llm.example/v1/chat/completions";
  env["FINKPI_LLM_API_KEY"] = "k";
  apply_environment(c, lookup);
  EXPECT_NO_THROW(validate_config(c));

  auto code = [](const Json& j) {
    try {
      validate_config(config_from_json(j));
    } catch (const Error& e) {
      return e.code();
    }
    return ErrorCode::kOverflow;
  };
  EXPECT_EQ(code({{"colour", 1}}), ErrorCode::kConfigError);
  EXPECT_EQ(code({{"rules", {{"spellcheck", false}}}}), ErrorCode::kConfigError);
  EXPECT_EQ(code({{"parallelism", 0}}), ErrorCode::kConfigError);
  EXPECT_EQ(code({{"backend", "gpt"}}), ErrorCode::kConfigError);
  EXPECT_EQ(code({{"store_path", "/no/such/dir/kpi.db"}}), ErrorCode::kConfigError);
  EXPECT_THROW(load_config(dir / "absent.json"), Error);
}

}  // namespace
}  // namespace finkpi
