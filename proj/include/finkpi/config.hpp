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
// Runtime configuration for the CLI and the HTTP service. Loaded from a
// JSON file, then overridden by FINKPI_* environment variables.
//
//   {
//     "backend": "mock" | "live",
//     "rules": {"unit_resolution": false, ...},
//     "store_path": "finkpi.db",
//     "audit_path": "finkpi-audit.jsonl",
//     "review_path": "finkpi-review.jsonl",
//     "parallelism": 4,
//     "max_retries": 2,
//     "llm": {"url": "...", "model": "...", "api_key": "..."},
//     "server": {"host": "127.0.0.1", "port": 8080, "bearer_token": ""}
//   }
//
// Relative paths resolve against the directory of the config file.

#pragma once

#include <filesystem>
#include <functional>
#include <string>

#include "finkpi/rules.hpp"
#include "finkpi/serialize.hpp"

namespace finkpi {

enum class BackendKind { kMock, kLive };

struct LiveBackendConfig {
  std::string url;  // OpenAI-style chat completions endpoint
  std::string api_key;
  std::string model;

  bool configured() const { return !url.empty() && !api_key.empty(); }
};

struct ServerConfig {
  std::string host = "127.0.0.1";
  int port = 8080;
  std::string bearer_token;  // empty disables the check
};

struct PipelineConfig {
  BackendKind backend = BackendKind::kMock;
  RuleSet rules;
  std::filesystem::path store_path = "finkpi.db";
  std::filesystem::path audit_path = "finkpi-audit.jsonl";
  std::filesystem::path review_path = "finkpi-review.jsonl";
  int parallelism = 4;
  int max_retries = 2;
  LiveBackendConfig live;
  ServerConfig server;
};

// Throws Error(kConfigError) on unknown keys, wrong types or unknown rules.
PipelineConfig config_from_json(const Json& j,
                                const std::filesystem::path& base_dir = {});
PipelineConfig load_config(const std::filesystem::path& path);

using EnvLookup = std::function<const char*(const char*)>;

// FINKPI_BACKEND, FINKPI_STORE, FINKPI_AUDIT_LOG, FINKPI_LLM_URL,
// FINKPI_LLM_API_KEY, FINKPI_LLM_MODEL, FINKPI_API_TOKEN.
void apply_environment(PipelineConfig& config, const EnvLookup& env);

// Throws Error(kConfigError) when a live backend lacks credentials,
// numbers are out of range, or the store directory does not exist.
void validate_config(const PipelineConfig& config);

}  // namespace finkpi
