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

// Per-record consistency questions, confidence scoring and the schema gate
// in front of the store.

#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "finkpi/document.hpp"
#include "finkpi/records.hpp"
#include "finkpi/taxonomy.hpp"

namespace finkpi {

enum class CheckKind {
  kValueInSource,
  kPeriodConsistent,
  kUnitPlausible,
  kRangeMidpoint,
  kQualifierConsistent,
};
enum class CheckOutcome { kPass, kFail, kSkipped };
enum class Disposition { kAccepted, kCorrected, kFlagged };

std::string_view to_string(CheckKind k);
std::string_view to_string(CheckOutcome o);
std::string_view to_string(Disposition d);

struct QACheck {
  std::string check_id;  // "<kind>"; unique within one outcome
  CheckKind kind = CheckKind::kValueInSource;
  std::string question;
  CheckOutcome outcome = CheckOutcome::kSkipped;
  std::string detail;
  bool operator==(const QACheck&) const = default;
};

struct FieldCorrection {
  std::string field;
  std::string before;
  std::string after;
  bool operator==(const FieldCorrection&) const = default;
};

struct ValidationOutcome {
  std::vector<QACheck> checks;  // one per CheckKind, in enum order
  Disposition disposition = Disposition::kAccepted;
  std::vector<FieldCorrection> corrections;

  std::size_t count(CheckOutcome o) const;
  const QACheck* find(CheckKind k) const;
};

// Runs all five checks. `doc` may be null when the source is unavailable;
// ValueInSource is then Skipped. Percent bands: margins in [-100, 100],
// other percentages in [-100, 1000]; revenue must be non-negative.
ValidationOutcome run_checks(const KpiRecord& record, const Document* doc,
                             const MetricTaxonomy& taxonomy);

// 1 - 0.15 per Fail - 0.05 per Skipped, floored at 0; Corrected caps at 0.85.
Decimal score_confidence(const KpiRecord& record, const ValidationOutcome& outcome);

struct ValidatedRecord {
  KpiRecord record;  // corrections applied, confidence scored
  ValidationOutcome outcome;
};

ValidatedRecord validate_record(KpiRecord record, const Document* doc,
                                const MetricTaxonomy& taxonomy);

enum class ViolationKind {
  kEmptyMetric,
  kUnknownMetric,
  kUnresolvedPeriod,
  kYearOutOfRange,
  kInvertedBounds,
  kValueNotMidpoint,
  kPercentOutOfBand,
  kInvalidScale,
  kConfidenceOutOfRange,
  kInvalidEnum,
  kMissingProvenance,
};
std::string_view to_string(ViolationKind v);

struct Violation {
  ViolationKind kind;
  std::string detail;
  bool operator==(const Violation&) const = default;
};

// Empty iff every record invariant holds. With a taxonomy, the metric must
// also be one of its canonical names.
std::vector<Violation> validate_schema(const KpiRecord& record,
                                       const MetricTaxonomy* taxonomy = nullptr);

}  // namespace finkpi
