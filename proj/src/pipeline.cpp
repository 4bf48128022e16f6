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
#include "finkpi/pipeline.hpp"

#include <sys/stat.h>

#include <algorithm>
#include <ctime>
#include <fstream>
#include <sstream>

#include "finkpi/error.hpp"
#include "finkpi/ingest.hpp"

namespace finkpi {

namespace fs = std::filesystem;

std::size_t DocumentResult::count(Disposition d) const {
  std::size_t n = 0;
  for (const auto& v : validated) n += v.outcome.disposition == d;
  return n;
}

std::vector<KpiRecord> DocumentResult::storable() const {
  std::vector<KpiRecord> out;
  for (const auto& v : validated) {
    if (v.outcome.disposition != Disposition::kFlagged) out.push_back(v.record);
  }
  return out;
}

DocumentResult process_document(const Document& doc, const CompletionBackend& backend,
                                const RuleSet& rules, const MetricTaxonomy& taxonomy,
                                int parallelism) {
  DocumentResult out;
  out.doc_id = doc.meta.doc_id;
  ExtractionOptions opts;
  opts.parallelism = parallelism;
  ExtractionReport report = extract_document(doc, backend, taxonomy, opts);
  out.failures = std::move(report.failures);
  for (const auto& raw : report.records) {
    RuleResult r = apply_rules(raw, rules, doc.meta, taxonomy);
    if (auto* rej = std::get_if<Rejection>(&r)) {
      out.rejections.push_back(*rej);
    } else {
      out.validated.push_back(validate_record(std::get<KpiRecord>(std::move(r)), &doc, taxonomy));
    }
  }
  return out;
}

Json review_entry(const ValidatedRecord& v) {
  Json checks = Json::array();
  for (const auto& c : v.outcome.checks) {
    checks.push_back({{"check_id", c.check_id},
                      {"question", c.question},
                      {"outcome", to_string(c.outcome)},
                      {"detail", c.detail}});
  }
  return {{"record", to_json(v.record)},
          {"disposition", to_string(v.outcome.disposition)},
          {"checks", checks}};
}

std::size_t IngestReport::failed() const {
  std::size_t n = 0;
  for (const auto& f : files) n += !f.ok;
  return n;
}

Json to_json(const IngestReport& report) {
  Json files = Json::array();
  std::size_t stored = 0;
  for (const auto& f : report.files) {
    stored += f.stored;
    Json j = {{"path", f.path}, {"doc_id", f.doc_id}, {"ok", f.ok}};
    if (f.ok) {
      j["accepted"] = f.accepted;
      j["corrected"] = f.corrected;
      j["flagged"] = f.flagged;
      j["rejected"] = f.rejected;
      j["stored"] = f.stored;
    } else {
      j["error"] = f.error;
    }
    files.push_back(j);
  }
  return {{"files", files},
          {"file_count", report.files.size()},
          {"failed", report.failed()},
          {"stored", stored}};
}

std::string render(const IngestReport& report) {
  std::ostringstream os;
  os << report.files.size() << (report.files.size() == 1 ? " file" : " files");
  if (report.failed()) os << ", " << report.failed() << " failed";
  os << "\n";
  for (const auto& f : report.files) {
    if (f.ok) {
      os << "  " << f.path << ": accepted " << f.accepted << ", corrected " << f.corrected
         << ", flagged " << f.flagged << ", rejected " << f.rejected << " (" << f.stored
         << " new rows)\n";
    } else {
      os << "  " << f.path << ": error: " << f.error << "\n";
    }
  }
  return os.str();
}

namespace {

bool ingestible(const fs::path& p) {
  std::string ext = p.extension().string();
  return ext == ".txt" || ext == ".htm" || ext == ".html";
}

std::string read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIoError, "cannot read " + p.string());
  std::ostringstream os;
  os << in.rdbuf();
  if (in.bad()) throw Error(ErrorCode::kIoError, "cannot read " + p.string());
  return os.str();
}

Date modification_date(const fs::path& p) {
  struct stat st {};
  if (::stat(p.c_str(), &st) != 0) throw Error(ErrorCode::kIoError, "cannot stat " + p.string());
  std::tm tm{};
  gmtime_r(&st.st_mtime, &tm);
  return {tm.tm_year + 1900, tm.tm_mon + 1, tm.tm_mday};
}

}  // namespace

std::vector<fs::path> expand_inputs(const std::vector<fs::path>& paths) {
  std::vector<fs::path> out;
  for (const auto& p : paths) {
    std::error_code ec;
    if (fs::is_directory(p, ec)) {
      std::vector<fs::path> inside;
      for (const auto& e : fs::directory_iterator(p, ec)) {
        if (!e.is_directory() && ingestible(e.path())) inside.push_back(e.path());
      }
      std::sort(inside.begin(), inside.end());
      out.insert(out.end(), inside.begin(), inside.end());
    } else {
      out.push_back(p);
    }
  }
  return out;
}

DocumentMeta meta_for(const fs::path& file) {
  DocumentMeta m;
  m.doc_id = file.stem().string();
  m.published_on = modification_date(file);
  fs::path sidecar = file;
  sidecar.replace_extension(".json");
  std::error_code ec;
  if (!fs::exists(sidecar, ec)) return m;
  // Sidecar keys override the defaults above.
  Json merged = to_json(m);
  try {
    Json j = Json::parse(read_file(sidecar));
    if (!j.is_object()) throw Error(ErrorCode::kInvalidArgument, "expected a JSON object");
    merged.update(j);
  } catch (const Json::exception& e) {
    throw Error(ErrorCode::kInvalidArgument, sidecar.string() + ": " + e.what());
  }
  return meta_from_json(merged);
}

IngestReport ingest_files(const std::vector<fs::path>& inputs, KpiStore& store,
                          const CompletionBackend& backend, const IngestOptions& options) {
  IngestReport report;
  std::ofstream review;
  if (!options.review_path.empty()) {
    if (options.review_path.has_parent_path()) {
      fs::create_directories(options.review_path.parent_path());
    }
    review.open(options.review_path, std::ios::app);
    if (!review) throw Error(ErrorCode::kIoError, "cannot open " + options.review_path.string());
  }
  for (const auto& path : inputs) {
    FileReport f;
    f.path = path.string();
    try {
      std::string bytes = read_file(path);
      DocumentMeta meta = meta_for(path);
      f.doc_id = meta.doc_id;
      std::string ext = path.extension().string();
      auto format = ext == ".htm" || ext == ".html" ? ingest::InputFormat::kHtml
                                                    : ingest::InputFormat::kPlainText;
      Document doc = ingest::load_document(bytes, format, std::move(meta));
      DocumentResult result =
          process_document(doc, backend, options.rules, store.taxonomy(), options.parallelism);
      f.accepted = result.count(Disposition::kAccepted);
      f.corrected = result.count(Disposition::kCorrected);
      f.flagged = result.count(Disposition::kFlagged);
      f.rejected = result.rejections.size();
      f.stored = store.upsert_records(result.storable());
      if (review.is_open()) {
        for (const auto& v : result.validated) {
          if (v.outcome.disposition == Disposition::kFlagged) {
            review << review_entry(v).dump() << "\n";
          }
        }
        review.flush();
      }
      f.ok = true;
    } catch (const Error& e) {
      f.error = e.what();
    } catch (const fs::filesystem_error& e) {
      f.error = e.what();
    }
    report.files.push_back(std::move(f));
  }
  return report;
}

}  // namespace finkpi
