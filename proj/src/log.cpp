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

#include "finkpi/log.hpp"

#include <cstdlib>
#include <cstring>
#include <iostream>
#include <mutex>

namespace finkpi {
namespace {

std::mutex& log_mutex() {
  static std::mutex m;
  return m;
}

bool debug_enabled() {
  static const bool enabled = [] {
    const char* v = std::getenv("FINKPI_LOG");
    return v != nullptr && std::strcmp(v, "debug") == 0;
  }();
  return enabled;
}

}  // namespace

void log_debug(std::string_view message) {
  if (!debug_enabled()) return;
  std::lock_guard lock(log_mutex());
  std::clog << "[debug] " << message << '\n';
}

void log_warn(std::string_view message) {
  std::lock_guard lock(log_mutex());
  std::clog << "[warn] " << message << '\n';
}

}  // namespace finkpi
