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

#include "finkpi/error.hpp"

namespace finkpi {

std::string_view error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidArgument: return "InvalidArgument";
    case ErrorCode::kDecodeError: return "DecodeError";
    case ErrorCode::kEmptyDocument: return "EmptyDocument";
    case ErrorCode::kMalformedCompletion: return "MalformedCompletion";
    case ErrorCode::kInvalidRange: return "InvalidRange";
    case ErrorCode::kUnitClassConflict: return "UnitClassConflict";
    case ErrorCode::kUnknownUnitToken: return "UnknownUnitToken";
    case ErrorCode::kIoError: return "IoError";
    case ErrorCode::kSchemaVersionMismatch: return "SchemaVersionMismatch";
    case ErrorCode::kGateViolation: return "GateViolation";
    case ErrorCode::kSqlSyntaxError: return "SqlSyntaxError";
    case ErrorCode::kNonSelectRejected: return "NonSelectRejected";
    case ErrorCode::kExecutionError: return "ExecutionError";
    case ErrorCode::kClarificationNeeded: return "ClarificationNeeded";
    case ErrorCode::kConfigError: return "ConfigError";
    case ErrorCode::kOverflow: return "Overflow";
  }
  return "Unknown";
}

}  // namespace finkpi
