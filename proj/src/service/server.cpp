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
#include <httplib.h>

#include <charconv>
#include <cstdint>

#include "finkpi/error.hpp"
#include "finkpi/log.hpp"
#include "finkpi/service.hpp"

namespace finkpi {

struct Service::Server {
  httplib::Server http;
  bool bound = false;
};

namespace {

HttpResponse error_response(int status, ErrorCode code, const std::string& message,
                            Json extra = Json::object()) {
  Json err = {{"code", error_code_name(code)}, {"message", message}};
  for (auto& [k, v] : extra.items()) err[k] = v;
  return {status, {{"error", err}}};
}

HttpResponse bad_request(const std::string& message) {
  return error_response(400, ErrorCode::kInvalidArgument, message);
}

std::optional<long long> parse_int(const std::string& s) {
  long long v = 0;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || p != s.data() + s.size()) return std::nullopt;
  return v;
}

}  // namespace

Service::Service(const KpiStore& store, ServiceOptions options)
    : store_(store), options_(std::move(options)), server_(std::make_unique<Server>()) {}

Service::~Service() { stop(); }

HttpResponse Service::handle(const HttpRequest& req) const {
  try {
    if (req.path == "/health") {
      if (req.method != "GET") return error_response(405, ErrorCode::kInvalidArgument, "use GET");
      return {200,
              {{"status", "ok"},
               {"schema_version", store_.schema_version()},
               {"records", store_.row_count()}}};
    }
    if (!options_.bearer_token.empty() &&
        req.authorization != "Bearer " + options_.bearer_token) {
      return error_response(401, ErrorCode::kInvalidArgument, "missing or wrong bearer token");
    }
    if (req.path == "/query") {
      if (req.method != "POST") return error_response(405, ErrorCode::kInvalidArgument, "use POST");
      return query(req);
    }
    if (req.path == "/schema") {
      if (req.method != "GET") return error_response(405, ErrorCode::kInvalidArgument, "use GET");
      return {200, to_json(store_.export_schema_card())};
    }
    if (req.path == "/records") {
      if (req.method != "GET") return error_response(405, ErrorCode::kInvalidArgument, "use GET");
      return records(req);
    }
    return error_response(404, ErrorCode::kInvalidArgument, "no route for " + req.path);
  } catch (const std::exception& e) {
    return failure(req.path, e);
  }
}

HttpResponse Service::failure(const std::string& where, const std::exception& e) const {
  Json extra = Json::object();
  ErrorCode code = ErrorCode::kExecutionError;
  if (const auto* err = dynamic_cast<const Error*>(&e)) code = err->code();
  std::string audit_id;
  if (AuditLog* audit = store_.audit()) {
    try {
      audit_id = audit->append("error", {{"path", where},
                                         {"code", error_code_name(code)},
                                         {"message", e.what()}});
    } catch (const std::exception& nested) {
      log_warn(std::string("cannot audit a failure: ") + nested.what());
    }
  }
  extra["audit_id"] = audit_id;
  return error_response(500, code, e.what(), extra);
}

HttpResponse Service::query(const HttpRequest& req) const {
  Json body;
  try {
    body = Json::parse(req.body);
  } catch (const Json::exception&) {
    return bad_request("body must be a JSON object with a \"question\" string");
  }
  if (!body.is_object() || !body.contains("question") || !body["question"].is_string()) {
    return bad_request("body must be a JSON object with a \"question\" string");
  }
  std::string question = body["question"].get<std::string>();
  if (question.find_first_not_of(" \t\r\n") == std::string::npos) {
    return bad_request("question is empty");
  }
  QueryConfig cfg;
  cfg.backend = options_.backend;
  cfg.max_retries = options_.max_retries;
  try {
    return {200, to_json(answer(question, store_, cfg))};
  } catch (const ClarificationNeeded& e) {
    return error_response(422, e.code(), e.what(), {{"unmatched", e.unmatched()}});
  }
}

HttpResponse Service::records(const HttpRequest& req) const {
  RecordFilter filter;
  size_t page = 1;
  size_t page_size = options_.default_page_size;
  for (const auto& [key, value] : req.params) {
    if (key == "metric") {
      filter.metric = value;
    } else if (key == "company") {
      filter.company = value;
    } else if (key == "year") {
      auto y = parse_int(value);
      if (!y) return bad_request("year must be an integer");
      filter.year = static_cast<int>(*y);
    } else if (key == "status") {
      auto s = parse_status(value);
      if (!s) return bad_request("status must be Actual or Guidance");
      filter.status = *s;
    } else if (key == "page" || key == "page_size") {
      auto n = parse_int(value);
      if (!n || *n < 1) return bad_request(key + " must be a positive integer");
      (key == "page" ? page : page_size) = static_cast<size_t>(*n);
    } else {
      return bad_request("unknown parameter '" + key + "'");
    }
  }
  if (page_size > options_.max_page_size) {
    return bad_request("page_size must be at most " + std::to_string(options_.max_page_size));
  }
  // SQLite OFFSET is a signed 64-bit integer.
  if (page - 1 > static_cast<size_t>(INT64_MAX) / page_size) {
    return bad_request("page is out of range");
  }
  RecordPage p = store_.list_records(filter, page, page_size);
  Json rows = Json::array();
  for (const auto& r : p.records) rows.push_back(to_json(r));
  return {200,
          {{"records", rows},
           {"page", p.page},
           {"page_size", p.page_size},
           {"total", p.total}}};
}

int Service::bind(const std::string& host, int port) {
  auto dispatch = [this](const httplib::Request& in, httplib::Response& out) {
    HttpRequest req{in.method, in.path, {}, in.body, in.get_header_value("Authorization")};
    for (const auto& [k, v] : in.params) req.params[k] = v;
    HttpResponse res = handle(req);
    out.status = res.status;
    out.set_content(res.body.dump(), "application/json");
  };
  auto& http = server_->http;
  for (const char* path : {"/query", "/schema", "/records", "/health"}) {
    http.Get(path, dispatch);
    http.Post(path, dispatch);
  }
  http.set_error_handler([this](const httplib::Request& in, httplib::Response& out) {
    if (!out.body.empty()) return;
    HttpRequest req{in.method, in.path, {}, in.body, in.get_header_value("Authorization")};
    HttpResponse res = handle(req);
    out.status = res.status;
    out.set_content(res.body.dump(), "application/json");
  });
  int bound = port == 0 ? http.bind_to_any_port(host) : (http.bind_to_port(host, port) ? port : -1);
  if (bound < 0) {
    throw Error(ErrorCode::kIoError, "cannot listen on " + host + ":" + std::to_string(port));
  }
  server_->bound = true;
  return bound;
}

void Service::run() {
  if (!server_->bound) throw Error(ErrorCode::kInvalidArgument, "bind() before run()");
  server_->http.listen_after_bind();
}

void Service::stop() {
  if (server_ && server_->bound) server_->http.stop();
}

}  // namespace finkpi
