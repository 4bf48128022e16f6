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

#include "finkpi/error.hpp"
#include "finkpi/extraction.hpp"
#include "finkpi/serialize.hpp"
#include "finkpi/service.hpp"

namespace finkpi {

namespace {

struct Endpoint {
  std::string origin;  // scheme://host[:port]
  std::string path;
};

Endpoint split_url(const std::string& url) {
  auto scheme = url.find("://");
  if (scheme == std::string::npos) {
    throw Error(ErrorCode::kConfigError, "backend url needs a scheme: " + url);
  }
  auto slash = url.find('/', scheme + 3);
  if (slash == std::string::npos) return {url, "/"};
  return {url.substr(0, slash), url.substr(slash)};
}

}  // namespace

HttpCompletionBackend::HttpCompletionBackend(LiveBackendConfig config, int timeout_seconds)
    : config_(std::move(config)), timeout_seconds_(timeout_seconds) {
  split_url(config_.url);
}

std::string HttpCompletionBackend::name() const {
  return config_.model.empty() ? "live" : "live:" + config_.model;
}

std::string HttpCompletionBackend::complete(std::string_view prompt) const {
  Endpoint ep = split_url(config_.url);
  httplib::Client client(ep.origin);
  client.set_connection_timeout(timeout_seconds_);
  client.set_read_timeout(timeout_seconds_);
  client.set_bearer_token_auth(config_.api_key);
  Json request = {{"messages", Json::array({{{"role", "user"}, {"content", prompt}}})},
                  {"temperature", 0}};
  if (!config_.model.empty()) request["model"] = config_.model;
  auto res = client.Post(ep.path, request.dump(), "application/json");
  if (!res) {
    throw Error(ErrorCode::kIoError,
                "backend request failed: " + httplib::to_string(res.error()));
  }
  if (res->status < 200 || res->status >= 300) {
    throw Error(ErrorCode::kIoError, "backend answered HTTP " + std::to_string(res->status));
  }
  try {
    Json reply = Json::parse(res->body);
    return reply.at("choices").at(0).at("message").at("content").get<std::string>();
  } catch (const Json::exception& e) {
    throw Error(ErrorCode::kMalformedCompletion,
                std::string("backend reply has no message content: ") + e.what());
  }
}

std::unique_ptr<CompletionBackend> make_backend(const PipelineConfig& config,
                                                const MetricTaxonomy& taxonomy) {
  if (config.backend == BackendKind::kLive && config.live.configured()) {
    return std::make_unique<HttpCompletionBackend>(config.live);
  }
  return std::make_unique<MockBackend>(taxonomy);
}

}  // namespace finkpi
