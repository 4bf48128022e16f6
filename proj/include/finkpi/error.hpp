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

#include <stdexcept>
#include <string>
#include <string_view>

namespace finkpi {

enum class ErrorCode {
  kInvalidArgument,
  kDecodeError,
  kEmptyDocument,
  kMalformedCompletion,
  kInvalidRange,
  kUnitClassConflict,
  kUnknownUnitToken,
  kIoError,
  kSchemaVersionMismatch,
  kGateViolation,
  kSqlSyntaxError,
  kNonSelectRejected,
  kExecutionError,
  kClarificationNeeded,
  kConfigError,
  kOverflow,
};

std::string_view error_code_name(ErrorCode code);

// Every failure raised by the library carries one of the codes above so
// callers (CLI exit codes, HTTP status mapping) can dispatch on it.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

// Raised when a question names no known metric. `unmatched` is the phrase
// that could not be resolved; the HTTP layer maps this to 422.
class ClarificationNeeded : public Error {
 public:
  ClarificationNeeded(const std::string& message, std::string unmatched)
      : Error(ErrorCode::kClarificationNeeded, message),
        unmatched_(std::move(unmatched)) {}

  const std::string& unmatched() const { return unmatched_; }

 private:
  std::string unmatched_;
};

}  // namespace finkpi
