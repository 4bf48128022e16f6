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

#pragma once

#include <string>
#include <string_view>

namespace finkpi {

// Prompt in, completion out. Implementations must tolerate concurrent calls.
class CompletionBackend {
 public:
  virtual ~CompletionBackend() = default;
  virtual std::string complete(std::string_view prompt) const = 0;
  virtual std::string name() const = 0;
};

}  // namespace finkpi
