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
#include "finkpi/config.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include "finkpi/error.hpp"

namespace finkpi {

namespace fs = std::filesystem;

namespace {

[[noreturn]] void bad(const std::string& msg) { throw Error(ErrorCode::kConfigError, msg); }

void only_keys(const Json& j, const std::string& where, const std::set<std::string>& allowed) {
  if (!j.is_object()) bad(where + " must be an object");
  for (const auto& [k, v] : j.items()) {
    if (!allowed.count(k)) bad("unknown key '" + k + "' in " + where);
  }
}

std::string string_at(const Json& j, const char* key) {
  if (!j.at(key).is_string()) bad(std::string(key) + " must be a string");
  return j.at(key).get<std::string>();
}

int int_at(const Json& j, const char* key) {
  if (!j.at(key).is_number_integer()) bad(std::string(key) + " must be an integer");
  return j.at(key).get<int>();
}

fs::path path_at(const Json& j, const char* key, const fs::path& base) {
  fs::path p = string_at(j, key);
  if (p.is_relative() && !base.empty() && p != ":memory:") p = base / p;
  return p;
}

BackendKind backend_kind(const std::string& s) {
  if (s == "mock") return BackendKind::kMock;
  if (s == "live") return BackendKind::kLive;
  bad("backend must be \"mock\" or \"live\", got \"" + s + "\"");
}

}  // namespace

PipelineConfig config_from_json(const Json& j, const fs::path& base_dir) {
  only_keys(j, "config", {"backend", "rules", "store_path", "audit_path", "review_path",
                          "parallelism", "max_retries", "llm", "server"});
  PipelineConfig c;
  if (j.contains("backend")) c.backend = backend_kind(string_at(j, "backend"));
  if (j.contains("rules")) {
    const Json& r = j.at("rules");
    if (!r.is_object()) bad("rules must be an object");
    for (const auto& [name, on] : r.items()) {
      if (!on.is_boolean()) bad("rule '" + name + "' must be true or false");
      c.rules.set(name, on.get<bool>());
    }
  }
  if (j.contains("store_path")) c.store_path = path_at(j, "store_path", base_dir);
  if (j.contains("audit_path")) c.audit_path = path_at(j, "audit_path", base_dir);
  if (j.contains("review_path")) c.review_path = path_at(j, "review_path", base_dir);
  if (j.contains("parallelism")) c.parallelism = int_at(j, "parallelism");
  if (j.contains("max_retries")) c.max_retries = int_at(j, "max_retries");
  if (j.contains("llm")) {
    const Json& l = j.at("llm");
    only_keys(l, "llm", {"url", "model", "api_key"});
    if (l.contains("url")) c.live.url = string_at(l, "url");
    if (l.contains("model")) c.live.model = string_at(l, "model");
    if (l.contains("api_key")) c.live.api_key = string_at(l, "api_key");
  }
  if (j.contains("server")) {
    const Json& s = j.at("server");
    only_keys(s, "server", {"host", "port", "bearer_token"});
    if (s.contains("host")) c.server.host = string_at(s, "host");
    if (s.contains("port")) c.server.port = int_at(s, "port");
    if (s.contains("bearer_token")) c.server.bearer_token = string_at(s, "bearer_token");
  }
  return c;
}

PipelineConfig load_config(const fs::path& path) {
  std::ifstream in(path);
  if (!in) bad("cannot read config " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  Json j;
  try {
    j = Json::parse(ss.str());
  } catch (const Json::exception& e) {
    bad(path.string() + ": " + e.what());
  }
  return config_from_json(j, path.parent_path());
}

void apply_environment(PipelineConfig& c, const EnvLookup& env) {
  auto get = [&](const char* name) -> std::optional<std::string> {
    const char* v = env(name);
    if (!v || !*v) return std::nullopt;
    return std::string(v);
  };
  if (auto v = get("FINKPI_BACKEND")) c.backend = backend_kind(*v);
  if (auto v = get("FINKPI_STORE")) c.store_path = *v;
  if (auto v = get("FINKPI_AUDIT_LOG")) c.audit_path = *v;
  if (auto v = get("FINKPI_LLM_URL")) c.live.url = *v;
  if (auto v = get("FINKPI_LLM_API_KEY")) c.live.api_key = *v;
  if (auto v = get("FINKPI_LLM_MODEL")) c.live.model = *v;
  if (auto v = get("FINKPI_API_TOKEN")) c.server.bearer_token = *v;
}

void validate_config(const PipelineConfig& c) {
  if (c.backend == BackendKind::kLive && !c.live.configured()) {
    bad("the live backend needs FINKPI_LLM_URL and FINKPI_LLM_API_KEY; use the mock backend "
        "otherwise");
  }
  if (c.parallelism < 1 || c.parallelism > 256) bad("parallelism must be in [1, 256]");
  if (c.max_retries < 0 || c.max_retries > 10) bad("max_retries must be in [0, 10]");
  if (c.server.port < 0 || c.server.port > 65535) bad("port must be in [0, 65535]");
  if (c.store_path.empty()) bad("store_path must be set");
  if (c.store_path != ":memory:") {
    fs::path dir = c.store_path.parent_path();
    std::error_code ec;
    if (!dir.empty() && !fs::is_directory(dir, ec)) {
      bad("store directory " + dir.string() + " does not exist");
    }
  }
}

}  // namespace finkpi
