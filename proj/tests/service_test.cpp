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
#include "finkpi/service.hpp"

#include <gtest/gtest.h>
#include <httplib.h>
#include <sqlite3.h>

#include <random>
#include <thread>

#include "finkpi/audit.hpp"
#include "fixtures.hpp"
#include "generators.hpp"
#include "temp_dir.hpp"

namespace finkpi {
namespace {

std::unique_ptr<KpiStore> margin_store(std::shared_ptr<AuditLog> audit = nullptr) {
  auto store = init_store(":memory:", kSchemaVersion, std::move(audit));
  store->upsert_records(testing::pipeline_records(testing::kMarginParagraph));
  return store;
}

HttpRequest post_query(const std::string& body) { return {"POST", "/query", {}, body, ""}; }
HttpRequest get(const std::string& path, std::map<std::string, std::string> params = {}) {
  return {"GET", path, std::move(params), "", ""};
}

std::string error_code(const HttpResponse& r) { return r.body["error"]["code"]; }

TEST(ServiceTest, QueryAnswersWithBundle) {
  auto store = margin_store();
  Service svc(*store, {});
  auto r = svc.handle(post_query(R"({"question": "What was operating margin in Q4 2024?"})"));
  ASSERT_EQ(r.status, 200) << r.body.dump();
  EXPECT_NE(r.body["explanation"].get<std::string>().find("14.6"), std::string::npos);
  EXPECT_FALSE(r.body["sql"].get<std::string>().empty());
  EXPECT_EQ(r.body["row_count"], 1);
  EXPECT_EQ(r.body["rows"].size(), 1u);
}

TEST(ServiceTest, BadBodiesAre400) {
  auto store = margin_store();
  Service svc(*store, {});
  for (const char* body : {"", "not json", "[]", R"({"q": "x"})", R"({"question": 3})",
                           R"({"question": "   "})"}) {
    auto r = svc.handle(post_query(body));
    EXPECT_EQ(r.status, 400) << body;
    EXPECT_EQ(error_code(r), "InvalidArgument") << body;
  }
}

TEST(ServiceTest, ClarificationIs422WithUnmatchedTerms) {
  auto store = margin_store();
  Service svc(*store, {});
  auto r = svc.handle(post_query(R"({"question": "What color is the logo?"})"));
  ASSERT_EQ(r.status, 422);
  EXPECT_EQ(error_code(r), "ClarificationNeeded");
  EXPECT_TRUE(r.body["error"]["unmatched"].is_string());
  EXPECT_FALSE(r.body["error"]["unmatched"].get<std::string>().empty());
}

TEST(ServiceTest, BearerTokenGuardsEverythingButHealth) {
  auto store = margin_store();
  ServiceOptions opts;
  opts.bearer_token = "s3cret";
  Service svc(*store, opts);
  EXPECT_EQ(svc.handle(get("/schema")).status, 401);
  auto wrong = get("/schema");
  wrong.authorization = "Bearer nope";
  EXPECT_EQ(svc.handle(wrong).status, 401);
  auto right = get("/schema");
  right.authorization = "Bearer s3cret";
  EXPECT_EQ(svc.handle(right).status, 200);
  EXPECT_EQ(svc.handle(get("/health")).status, 200);
}

TEST(ServiceTest, HealthAndSchema) {
  auto store = margin_store();
  Service svc(*store, {});
  auto h = svc.handle(get("/health"));
  EXPECT_EQ(h.body["status"], "ok");
  EXPECT_EQ(h.body["schema_version"], kSchemaVersion);
  EXPECT_EQ(h.body["records"], store->row_count());
  auto s = svc.handle(get("/schema"));
  ASSERT_EQ(s.status, 200);
  EXPECT_EQ(s.body["table"], "kpi");
  EXPECT_FALSE(s.body["columns"].empty());
}

TEST(ServiceTest, RecordsPaginateAndFilter) {
  auto store = init_store(":memory:");
  std::mt19937_64 rng(3);
  std::vector<KpiRecord> recs;
  for (int i = 0; i < 60; ++i) recs.push_back(testing::random_valid_record(rng, i));
  store->upsert_records(recs);
  Service svc(*store, {});

  size_t seen = 0;
  for (int page = 1; page <= 4; ++page) {
    auto r = svc.handle(get("/records", {{"page", std::to_string(page)}}));
    ASSERT_EQ(r.status, 200);
    EXPECT_EQ(r.body["total"], 60);
    EXPECT_EQ(r.body["page_size"], 25);
    size_t n = r.body["records"].size();
    EXPECT_EQ(n, page < 3 ? 25u : page == 3 ? 10u : 0u) << page;
    seen += n;
  }
  EXPECT_EQ(seen, 60u);

  std::string metric = recs[0].metric;
  auto f = svc.handle(get("/records", {{"metric", metric}, {"page_size", "500"}}));
  ASSERT_EQ(f.status, 200);
  size_t expected = std::count_if(recs.begin(), recs.end(),
                                  [&](const KpiRecord& r) { return r.metric == metric; });
  EXPECT_EQ(f.body["total"], expected);
  for (const auto& r : f.body["records"]) EXPECT_EQ(r["metric"], metric);

  for (auto params : std::vector<std::map<std::string, std::string>>{
           {{"page", "0"}}, {{"page_size", "501"}}, {{"year", "soon"}}, {{"status", "Maybe"}},
           {{"sort", "metric"}}, {{"page", "9223372036854775807"}}}) {
    auto r = svc.handle(get("/records", params));
    EXPECT_EQ(r.status, 400) << params.begin()->first;
  }
}

TEST(ServiceTest, UnknownRoutesAndMethods) {
  auto store = margin_store();
  Service svc(*store, {});
  EXPECT_EQ(svc.handle(get("/nope")).status, 404);
  EXPECT_EQ(svc.handle(get("/query")).status, 405);
  EXPECT_EQ(svc.handle({"POST", "/records", {}, "", ""}).status, 405);
}

TEST(ServiceTest, InternalFailureIs500WithAuditId) {
  testing::TempDir dir;
  auto audit = std::make_shared<AuditLog>(dir / "audit.jsonl");
  auto store = init_store(dir / "kpi.db", kSchemaVersion, audit);
  store->upsert_records(testing::pipeline_records(testing::kMarginParagraph));
  {
    // Another writer breaks the store under the running service.
    sqlite3* db = nullptr;
    ASSERT_EQ(sqlite3_open((dir / "kpi.db").c_str(), &db), SQLITE_OK);
    ASSERT_EQ(sqlite3_exec(db, "DROP TABLE kpi", nullptr, nullptr, nullptr), SQLITE_OK);
    sqlite3_close(db);
  }
  Service svc(*store, {});
  auto r = svc.handle(get("/records"));
  ASSERT_EQ(r.status, 500);
  std::string id = r.body["error"]["audit_id"];
  ASSERT_FALSE(id.empty());
  auto entry = audit->find(id);
  ASSERT_TRUE(entry);
  EXPECT_EQ((*entry)["event"], "error");
  EXPECT_EQ((*entry)["data"]["path"], "/records");
}

TEST(ServiceTest, ServesOverHttp) {
  auto store = margin_store();
  ServiceOptions opts;
  opts.bearer_token = "t";
  Service svc(*store, opts);
  int port = svc.bind("127.0.0.1", 0);
  ASSERT_GT(port, 0);
  std::thread server([&] { svc.run(); });

  httplib::Client client("127.0.0.1", port);
  client.set_bearer_token_auth("t");
  auto health = client.Get("/health");
  ASSERT_TRUE(health);
  EXPECT_EQ(health->status, 200);
  EXPECT_EQ(health->get_header_value("Content-Type"), "application/json");

  auto q = client.Post("/query", R"({"question": "What was operating margin in Q4 2024?"})",
                       "application/json");
  ASSERT_TRUE(q);
  EXPECT_EQ(q->status, 200);
  EXPECT_NE(Json::parse(q->body)["explanation"].get<std::string>().find("14.6"),
            std::string::npos);

  auto recs = client.Get("/records?page_size=2&page=1");
  ASSERT_TRUE(recs);
  EXPECT_EQ(Json::parse(recs->body)["records"].size(), 2u);

  auto missing = client.Get("/missing");
  ASSERT_TRUE(missing);
  EXPECT_EQ(missing->status, 404);
  EXPECT_EQ(Json::parse(missing->body)["error"]["code"], "InvalidArgument");

  httplib::Client anonymous("127.0.0.1", port);
  auto denied = anonymous.Get("/schema");
  ASSERT_TRUE(denied);
  EXPECT_EQ(denied->status, 401);

  svc.stop();
  server.join();
}

}  // namespace
}  // namespace finkpi
