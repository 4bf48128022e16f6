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
// Reference semantics for query intents, evaluated directly over records
// with no SQL involved. The generated SQL must agree with this.

#pragma once

#include <optional>
#include <vector>

#include "finkpi/query.hpp"
#include "finkpi/records.hpp"

namespace finkpi {

// The headline number an intent asks for:
//  - None / Latest: value of the first matching record when ordered by
//    period (latest first), publication date (latest first), confidence
//    (highest first), then metric, granularity, status, doc and section.
//  - Avg / Sum / Min / Max / Count: the aggregate over every matching
//    record; with several metrics, the group of the alphabetically first
//    metric that has rows. Count of nothing is 0; other empty aggregates
//    have no answer.
//  - YoY / QoQ: current minus prior value for the first current record
//    (same order) that has a prior-period partner with equal metric,
//    status and company.
std::optional<double> oracle_answer(const QueryIntent& intent,
                                    const std::vector<KpiRecord>& records);

// Equal within 1e-9 relative, or 1e-9 absolute near zero.
bool answers_match(const std::optional<double>& expected, const std::optional<Decimal>& actual);

}  // namespace finkpi
