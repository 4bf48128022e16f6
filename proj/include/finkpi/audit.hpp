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
// Append-only JSONL event log. Each line is
//   {"id": "evt-000001", "ts": "...", "event": "<type>", "data": {...}}
// Ids are sequential per file and continue across reopen.

#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "finkpi/serialize.hpp"

namespace finkpi {

using Clock = std::function<std::string()>;

// UTC wall clock, "2026-01-31T12:00:00Z".
std::string utc_now();
// Always returns `timestamp`; used for reproducible logs.
Clock fixed_clock(std::string timestamp);

class AuditLog {
 public:
  // Creates the file (and missing parent directories) when absent.
  // Throws Error(kIoError) when the file cannot be opened for append.
  explicit AuditLog(std::filesystem::path path, Clock clock = utc_now);

  AuditLog(const AuditLog&) = delete;
  AuditLog& operator=(const AuditLog&) = delete;

  // Appends one line and returns its id. Safe to call from many threads.
  std::string append(std::string_view event, Json data);

  std::optional<Json> find(std::string_view id) const;
  std::vector<Json> entries() const;
  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
  Clock clock_;
  mutable std::mutex mu_;
  std::uint64_t next_ = 1;
};

}  // namespace finkpi
