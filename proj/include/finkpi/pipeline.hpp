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
// End-to-end ingestion: load, extract, apply rules, validate, persist.
// Shared by the CLI, the HTTP service and the evaluation harness.

#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "finkpi/backend.hpp"
#include "finkpi/document.hpp"
#include "finkpi/extraction.hpp"
#include "finkpi/rules.hpp"
#include "finkpi/serialize.hpp"
#include "finkpi/store.hpp"
#include "finkpi/validation.hpp"

namespace finkpi {

struct DocumentResult {
  std::string doc_id;
  // Every record that survived the rules, with its validation outcome.
  std::vector<ValidatedRecord> validated;
  std::vector<Rejection> rejections;
  std::vector<SectionFailure> failures;

  std::size_t count(Disposition d) const;
  // Accepted and Corrected records. Flagged ones go to review instead.
  std::vector<KpiRecord> storable() const;
};

DocumentResult process_document(const Document& doc, const CompletionBackend& backend,
                                const RuleSet& rules, const MetricTaxonomy& taxonomy,
                                int parallelism = 4);

// One line of the review queue: the record, its disposition and checks.
Json review_entry(const ValidatedRecord& v);

struct FileReport {
  std::string path;
  std::string doc_id;
  bool ok = false;
  std::string error;
  std::size_t accepted = 0;
  std::size_t corrected = 0;
  std::size_t flagged = 0;
  std::size_t rejected = 0;
  std::size_t stored = 0;  // rows new to the store
};

struct IngestReport {
  std::vector<FileReport> files;

  std::size_t failed() const;
  bool all_failed() const { return !files.empty() && failed() == files.size(); }
};

Json to_json(const IngestReport& report);
std::string render(const IngestReport& report);

// Files named on the command line plus the .txt/.htm/.html files directly
// inside named directories, sorted. Missing paths are kept so that the
// ingest report lists them.
std::vector<std::filesystem::path> expand_inputs(const std::vector<std::filesystem::path>& paths);

// Metadata for a filing: doc_id = stem, no company and the file's
// modification date, overridden key by key by the JSON sidecar <stem>.json
// when one exists.
DocumentMeta meta_for(const std::filesystem::path& file);

struct IngestOptions {
  RuleSet rules;
  int parallelism = 4;
  // Flagged records are appended here as JSON lines; empty disables.
  std::filesystem::path review_path;
};

IngestReport ingest_files(const std::vector<std::filesystem::path>& inputs, KpiStore& store,
                          const CompletionBackend& backend, const IngestOptions& options);

}  // namespace finkpi
