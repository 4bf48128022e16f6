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
// Network-facing pieces: the live completion backend and the JSON API.
//
//   POST /query    {"question": "..."}          -> answer bundle
//   GET  /schema                                -> schema card
//   GET  /records  ?metric=&year=&status=&company=&page=&page_size=
//   GET  /health                                -> {"status": "ok", ...}
//
// Errors are {"error": {"code", "message", ...}} with status 400 for bad
// requests, 401 for a missing or wrong bearer token, 404/405 for unknown
// routes, 422 when a question needs clarification and 500 otherwise. A
// 500 carries the audit id under which the failure was logged.

#pragma once

#include <map>
#include <memory>
#include <string>

#include "finkpi/backend.hpp"
#include "finkpi/config.hpp"
#include "finkpi/query.hpp"
#include "finkpi/store.hpp"

namespace finkpi {

// OpenAI-style chat completions over HTTP(S). Throws Error(kIoError) when
// the endpoint is unreachable or answers with a non-2xx status and
// Error(kMalformedCompletion) when the reply has no message content.
class HttpCompletionBackend : public CompletionBackend {
 public:
  explicit HttpCompletionBackend(LiveBackendConfig config, int timeout_seconds = 60);
  std::string complete(std::string_view prompt) const override;
  std::string name() const override;

 private:
  LiveBackendConfig config_;
  int timeout_seconds_;
};

// The mock backend unless the config selects a configured live one.
std::unique_ptr<CompletionBackend> make_backend(const PipelineConfig& config,
                                                const MetricTaxonomy& taxonomy);

struct HttpRequest {
  std::string method;
  std::string path;
  std::map<std::string, std::string> params;
  std::string body;
  std::string authorization;  // the Authorization header, if any
};

struct HttpResponse {
  int status = 200;
  Json body;
};

struct ServiceOptions {
  // Backend for SQL candidates on /query; null means template SQL only.
  const CompletionBackend* backend = nullptr;
  int max_retries = kDefaultMaxRetries;
  std::string bearer_token;
  size_t default_page_size = 25;
  size_t max_page_size = 500;
};

class Service {
 public:
  Service(const KpiStore& store, ServiceOptions options);
  ~Service();

  HttpResponse handle(const HttpRequest& request) const;

  // Binds the listening socket; port 0 picks a free one. Returns the port.
  int bind(const std::string& host, int port);
  // Serves requests until stop(). Requires a successful bind().
  void run();
  void stop();

 private:
  HttpResponse query(const HttpRequest& request) const;
  HttpResponse records(const HttpRequest& request) const;
  HttpResponse failure(const std::string& where, const std::exception& e) const;

  const KpiStore& store_;
  ServiceOptions options_;
  struct Server;
  std::unique_ptr<Server> server_;
};

}  // namespace finkpi
