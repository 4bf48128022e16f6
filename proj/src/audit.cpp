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
#include "finkpi/audit.hpp"

#include <chrono>
#include <cstdio>
#include <ctime>
#include <fstream>

#include "finkpi/error.hpp"

namespace finkpi {

std::string utc_now() {
  std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

Clock fixed_clock(std::string timestamp) {
  return [ts = std::move(timestamp)] { return ts; };
}

namespace {

std::vector<Json> read_lines(const std::filesystem::path& path) {
  std::vector<Json> out;
  std::ifstream in(path);
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    Json j = Json::parse(line, nullptr, false);
    if (!j.is_discarded()) out.push_back(std::move(j));
  }
  return out;
}

}  // namespace

AuditLog::AuditLog(std::filesystem::path path, Clock clock)
    : path_(std::move(path)), clock_(std::move(clock)) {
  std::error_code ec;
  if (path_.has_parent_path()) std::filesystem::create_directories(path_.parent_path(), ec);
  std::ofstream touch(path_, std::ios::app);
  if (!touch) throw Error(ErrorCode::kIoError, "cannot open audit log " + path_.string());
  next_ = read_lines(path_).size() + 1;
}

std::string AuditLog::append(std::string_view event, Json data) {
  std::lock_guard lock(mu_);
  char id[32];
  std::snprintf(id, sizeof id, "evt-%06llu", static_cast<unsigned long long>(next_));
  Json line = {{"id", id}, {"ts", clock_()}, {"event", event}, {"data", std::move(data)}};
  std::ofstream out(path_, std::ios::app);
  out << line.dump() << '\n';
  out.flush();
  if (!out) throw Error(ErrorCode::kIoError, "cannot append to audit log " + path_.string());
  ++next_;
  return id;
}

std::optional<Json> AuditLog::find(std::string_view id) const {
  std::lock_guard lock(mu_);
  for (auto& j : read_lines(path_)) {
    if (j.value("id", "") == id) return j;
  }
  return std::nullopt;
}

std::vector<Json> AuditLog::entries() const {
  std::lock_guard lock(mu_);
  return read_lines(path_);
}

}  // namespace finkpi
