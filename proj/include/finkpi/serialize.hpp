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

// JSON forms of the pipeline's hand-off types. Decimals are written as
// strings so values survive the trip exactly.

#pragma once

#include <nlohmann/json.hpp>

#include "finkpi/document.hpp"
#include "finkpi/records.hpp"

namespace finkpi {

using Json = nlohmann::json;

Json to_json(const DocumentMeta& meta);
// Sidecar reader. Throws Error(kInvalidArgument) on missing or bad keys.
DocumentMeta meta_from_json(const Json& j);

Json to_json(const NumericSpan& span);
Json to_json(const Section& section);
Json to_json(const Document& doc);
Document document_from_json(const Json& j);

Json to_json(const FiscalPeriod& period);
Json to_json(const Qualifier& qualifier);
Json to_json(const Provenance& provenance);
Json to_json(const RawKpiRecord& record);
Json to_json(const KpiRecord& record);
KpiRecord kpi_record_from_json(const Json& j);

}  // namespace finkpi
