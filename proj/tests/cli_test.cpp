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
// Runs the finkpi binary as a user would.

#include <gtest/gtest.h>
#include <sys/wait.h>

#include <cstdlib>
#include <fstream>
#include <sstream>

#include "finkpi/serialize.hpp"
#include "fixtures.hpp"
#include "temp_dir.hpp"

namespace finkpi {
namespace {

namespace fs = std::filesystem;
using testing::TempDir;

struct CliRun {
  int exit_code = -1;
  std::string out;
  std::string err;
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string quote(const std::string& s) {
  std::string q = "'";
  for (char c : s) q += c == '\'' ? std::string("'\\''") : std::string(1, c);
  return q + "'";
}

// Runs finkpi with `args` inside `dir`, with the FINKPI_* environment cleared.
CliRun finkpi(const fs::path& dir, const std::vector<std::string>& args) {
  std::string cmd = "cd " + quote(dir.string()) +
                    " && env -u FINKPI_BACKEND -u FINKPI_STORE -u FINKPI_AUDIT_LOG "
                    "-u FINKPI_API_TOKEN " +
                    quote(FINKPI_CLI_PATH);
  for (const auto& a : args) cmd += " " + quote(a);
  cmd += " > stdout.txt 2> stderr.txt";
  int status = std::system(cmd.c_str());
  CliRun r;
  r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  r.out = slurp(dir / "stdout.txt");
  r.err = slurp(dir / "stderr.txt");
  return r;
}

void write(const fs::path& p, const std::string& text) { std::ofstream(p) << text; }

void write_filing(const fs::path& dir) {
  fs::create_directories(dir / "in");
  write(dir / "in" / "acme-q4.txt", testing::kMarginParagraph);
  write(dir / "in" / "acme-q4.json", R"({"company": "ACME", "published_on": "2025-02-01"})");
}

TEST(CliTest, IngestThenQuery) {
  TempDir dir;
  write_filing(dir.path());
  CliRun ingest = finkpi(dir.path(), {"ingest", "in"});
  ASSERT_EQ(ingest.exit_code, 0) << ingest.err;
  EXPECT_NE(ingest.out.find("acme-q4.txt: accepted 3"), std::string::npos) << ingest.out;
  EXPECT_TRUE(fs::exists(dir / "finkpi.db"));

  CliRun q = finkpi(dir.path(), {"query", "What was operating margin in Q4 2024?"});
  ASSERT_EQ(q.exit_code, 0) << q.err;
  EXPECT_NE(q.out.find("Q4 2024 operating margin (actual) was 14.6%."), std::string::npos)
      << q.out;
  EXPECT_NE(q.out.find("SELECT"), std::string::npos);
  EXPECT_NE(q.out.find("audit: evt-"), std::string::npos);
}

TEST(CliTest, IngestExitCodes) {
  TempDir dir;
  write_filing(dir.path());
  CliRun missing = finkpi(dir.path(), {"ingest", "nope.txt"});
  EXPECT_EQ(missing.exit_code, 1);
  EXPECT_NE(missing.out.find("1 failed"), std::string::npos) << missing.out;
  CliRun partial = finkpi(dir.path(), {"ingest", "in", "nope.txt"});
  EXPECT_EQ(partial.exit_code, 0) << partial.err;
  EXPECT_NE(partial.out.find("2 files, 1 failed"), std::string::npos) << partial.out;
}

TEST(CliTest, JsonOutputs) {
  TempDir dir;
  write_filing(dir.path());
  CliRun ingest = finkpi(dir.path(), {"--json", "ingest", "in"});
  ASSERT_EQ(ingest.exit_code, 0);
  Json report = Json::parse(ingest.out);
  EXPECT_EQ(report["file_count"], 1);
  EXPECT_EQ(report["stored"], 3);

  CliRun q = finkpi(dir.path(), {"--json", "query", "What is the FY 2025 operating margin guidance?"});
  ASSERT_EQ(q.exit_code, 0);
  Json bundle = Json::parse(q.out);
  EXPECT_EQ(bundle["rows"][0][0], "16");
  EXPECT_EQ(bundle["source"], "Template");

  CliRun c = finkpi(dir.path(), {"--json", "query", "What color is the logo?"});
  EXPECT_EQ(c.exit_code, 2);
  EXPECT_EQ(Json::parse(c.out)["error"]["code"], "ClarificationNeeded");
}

TEST(CliTest, ClarificationHint) {
  TempDir dir;
  CliRun c = finkpi(dir.path(), {"query", "What color is the logo?"});
  EXPECT_EQ(c.exit_code, 2);
  EXPECT_NE(c.err.find("hint:"), std::string::npos) << c.err;
}

TEST(CliTest, NoRuleFlagChangesExtraction) {
  TempDir dir;
  write_filing(dir.path());
  // Without the midpoint rule the guidance range fails its midpoint check,
  // so it goes to the review file instead of the store.
  CliRun ingest = finkpi(dir.path(), {"--no-rule", "range_midpoint", "ingest", "in"});
  ASSERT_EQ(ingest.exit_code, 0) << ingest.err;
  EXPECT_NE(ingest.out.find("flagged 1"), std::string::npos) << ingest.out;
  EXPECT_NE(slurp(dir / "finkpi-review.jsonl").find("RangeMidpoint"), std::string::npos);
  CliRun q = finkpi(dir.path(), {"--json", "query", "What is the FY 2025 operating margin guidance?"});
  ASSERT_EQ(q.exit_code, 0);
  EXPECT_EQ(Json::parse(q.out)["row_count"], 0);

  CliRun bad = finkpi(dir.path(), {"--no-rule", "vibes", "ingest", "in"});
  EXPECT_NE(bad.exit_code, 0);
}

TEST(CliTest, ConfigFileAndErrors) {
  TempDir dir;
  write_filing(dir.path());
  fs::create_directories(dir / "data");
  write(dir / "finkpi.json", R"({"store_path": "data/kpi.db", "audit_path": "data/audit.jsonl"})");
  CliRun ok = finkpi(dir.path(), {"--config", "finkpi.json", "ingest", "in"});
  ASSERT_EQ(ok.exit_code, 0) << ok.err;
  EXPECT_TRUE(fs::exists(dir / "data" / "kpi.db"));
  EXPECT_TRUE(fs::exists(dir / "data" / "audit.jsonl"));

  write(dir / "bad.json", R"({"store_path": "x.db", "colour": "blue"})");
  CliRun bad = finkpi(dir.path(), {"--config", "bad.json", "ingest", "in"});
  EXPECT_EQ(bad.exit_code, 1);
  EXPECT_NE(bad.err.find("colour"), std::string::npos) << bad.err;

  CliRun usage = finkpi(dir.path(), {"frobnicate"});
  EXPECT_NE(usage.exit_code, 0);
}

TEST(CliTest, EvalWritesReport) {
  TempDir dir;
  CliRun e = finkpi(dir.path(), {"eval", "--seed", "4", "--docs", "10", "--json-out", "r.json"});
  ASSERT_EQ(e.exit_code, 0) << e.err;
  EXPECT_NE(e.out.find("Extraction precision"), std::string::npos) << e.out;
  Json r = Json::parse(slurp(dir / "r.json"));
  EXPECT_EQ(r["seed"], 4);
  EXPECT_EQ(r["documents"], 10);
}

}  // namespace
}  // namespace finkpi
