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
// finkpi: ingest filings, ask questions, serve the JSON API, evaluate.

#include <CLI11.hpp>

#include <csignal>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <iostream>

#include "finkpi/config.hpp"
#include "finkpi/error.hpp"
#include "finkpi/eval.hpp"
#include "finkpi/pipeline.hpp"
#include "finkpi/query.hpp"
#include "finkpi/service.hpp"
#include "finkpi/store.hpp"

namespace fs = std::filesystem;
using namespace finkpi;

namespace {

constexpr int kExitError = 1;
constexpr int kExitClarification = 2;

Service* g_service = nullptr;

void on_signal(int) {
  if (g_service) g_service->stop();
}

struct Globals {
  std::string config_path;
  std::string store_path;
  std::vector<std::string> disabled_rules;
  bool json = false;
};

PipelineConfig resolve_config(const Globals& g) {
  PipelineConfig c = g.config_path.empty() ? PipelineConfig{} : load_config(g.config_path);
  apply_environment(c, [](const char* name) { return std::getenv(name); });
  if (!g.store_path.empty()) c.store_path = g.store_path;
  for (const auto& r : g.disabled_rules) c.rules.set(r, false);
  validate_config(c);
  return c;
}

std::unique_ptr<KpiStore> open_store(const PipelineConfig& c) {
  auto audit = std::make_shared<AuditLog>(c.audit_path);
  return init_store(c.store_path, kSchemaVersion, audit);
}

std::string cell_text(const Cell& c) {
  if (std::holds_alternative<std::monostate>(c)) return "";
  if (auto* i = std::get_if<std::int64_t>(&c)) return std::to_string(*i);
  if (auto* d = std::get_if<Decimal>(&c)) return d->to_string();
  return std::get<std::string>(c);
}

void print_table(const ResultTable& t, std::ostream& os) {
  std::vector<size_t> width(t.columns.size());
  for (size_t i = 0; i < t.columns.size(); ++i) width[i] = t.columns[i].size();
  for (const auto& row : t.rows) {
    for (size_t i = 0; i < row.size(); ++i) width[i] = std::max(width[i], cell_text(row[i]).size());
  }
  auto line = [&](auto get) {
    for (size_t i = 0; i < width.size(); ++i) {
      int w = i + 1 == width.size() ? 0 : static_cast<int>(width[i]);
      os << (i ? "  " : "") << std::left << std::setw(w) << get(i);
    }
    os << "\n";
  };
  line([&](size_t i) { return t.columns[i]; });
  line([&](size_t i) { return std::string(width[i], '-'); });
  for (const auto& row : t.rows) line([&](size_t i) { return cell_text(row[i]); });
}

int run_ingest(const Globals& g, const std::vector<std::string>& paths) {
  PipelineConfig c = resolve_config(g);
  auto store = open_store(c);
  auto backend = make_backend(c, store->taxonomy());
  std::vector<fs::path> inputs;
  for (const auto& p : paths) inputs.emplace_back(p);
  IngestOptions opts{c.rules, c.parallelism, c.review_path};
  IngestReport report = ingest_files(expand_inputs(inputs), *store, *backend, opts);
  if (g.json) {
    std::cout << to_json(report).dump(2) << "\n";
  } else {
    std::cout << render(report);
  }
  return report.all_failed() ? kExitError : 0;
}

int run_query(const Globals& g, const std::string& question) {
  PipelineConfig c = resolve_config(g);
  auto store = open_store(c);
  std::unique_ptr<CompletionBackend> backend;
  if (c.backend == BackendKind::kLive) backend = make_backend(c, store->taxonomy());
  QueryConfig qc{backend.get(), c.max_retries};
  try {
    AnswerBundle b = answer(question, *store, qc);
    if (g.json) {
      std::cout << to_json(b).dump(2) << "\n";
    } else {
      std::cout << b.chosen.sql << "\n\n" << b.explanation << "\n\n";
      print_table(b.result, std::cout);
      std::cout << "\naudit: " << b.audit_id << "\n";
    }
    return 0;
  } catch (const ClarificationNeeded& e) {
    if (g.json) {
      std::cout << Json{{"error",
                         {{"code", error_code_name(e.code())},
                          {"message", e.what()},
                          {"unmatched", e.unmatched()}}}}
                       .dump(2)
                << "\n";
    } else {
      std::cerr << e.what() << "\nhint: name a metric such as revenue, operating margin, "
                << "free cash flow or EPS.\n";
    }
    return kExitClarification;
  }
}

int run_serve(const Globals& g, const std::string& host, int port) {
  PipelineConfig c = resolve_config(g);
  if (!host.empty()) c.server.host = host;
  if (port >= 0) c.server.port = port;
  auto store = open_store(c);
  std::unique_ptr<CompletionBackend> backend;
  if (c.backend == BackendKind::kLive) backend = make_backend(c, store->taxonomy());
  ServiceOptions opts;
  opts.backend = backend.get();
  opts.max_retries = c.max_retries;
  opts.bearer_token = c.server.bearer_token;
  Service service(*store, opts);
  int bound = service.bind(c.server.host, c.server.port);
  g_service = &service;
  std::signal(SIGINT, on_signal);
  std::signal(SIGTERM, on_signal);
  std::cerr << "listening on " << c.server.host << ":" << bound << "\n";
  service.run();
  g_service = nullptr;
  return 0;
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::kIoError, "cannot write " + path);
  out << content;
}

std::vector<RuleSet> ablation_configs(const std::vector<std::string>& ablate) {
  RuleSet off;
  for (const auto& name : ablate) {
    if (name == "all") {
      off = RuleSet::all_off();
    } else {
      off.set(name, false);
    }
  }
  return {RuleSet{}, off};
}

int run_eval(const Globals& g, std::uint64_t seed, int docs, std::vector<std::string> ablate,
             const std::string& json_out, bool full_matrix) {
  auto corpus = eval::generate_synthetic_corpus(seed, docs);
  std::vector<RuleSet> configs;
  if (full_matrix) {
    configs = eval::standard_ablation_matrix();
  } else if (!ablate.empty()) {
    configs = ablation_configs(ablate);
  } else {
    RuleSet rules;
    for (const auto& r : g.disabled_rules) rules.set(r, false);
    configs = {rules};
  }
  auto report = eval::run_ablation(corpus, configs);
  Json j = to_json(report);
  if (!json_out.empty()) write_file(json_out, j.dump(2) + "\n");
  if (g.json) {
    std::cout << j.dump(2) << "\n";
  } else {
    std::cout << eval::to_markdown(report);
    if (report.runs.size() == 1) {
      const auto& m = report.runs[0].extraction;
      std::cout << "\nF1 " << m.f1 << ", recall " << m.recall << ", structuring accuracy "
                << m.structuring_accuracy << ", schema compliance " << m.schema_compliance
                << "\n";
    }
  }
  for (const auto& r : report.runs) {
    std::cerr << r.label << ": " << std::fixed << std::setprecision(2) << r.seconds << "s\n";
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"finkpi: KPI extraction and natural-language querying for financial filings"};
  app.require_subcommand(1);
  Globals g;
  app.add_option("--config", g.config_path, "JSON config file")->check(CLI::ExistingFile);
  app.add_option("--store", g.store_path, "Store path (overrides the config)");
  app.add_option("--no-rule", g.disabled_rules,
                 "Disable a domain rule (range_midpoint, unit_resolution, period_resolution, "
                 "qualifier_classification); repeatable");
  app.add_flag("--json", g.json, "Machine-readable output");

  auto* ingest = app.add_subcommand("ingest", "Extract KPIs from filings into the store");
  std::vector<std::string> paths;
  ingest->add_option("paths", paths, "Files or directories (.txt, .htm, .html)")->required();

  auto* query = app.add_subcommand("query", "Answer a question from the store");
  std::string question;
  query->add_option("question", question, "Natural-language question")->required();

  auto* serve = app.add_subcommand("serve", "Serve the JSON API");
  std::string host;
  int port = -1;
  serve->add_option("--host", host, "Listen address");
  serve->add_option("--port", port, "Listen port (0 picks a free one)");

  std::uint64_t seed = 42;
  int docs = 200;
  std::vector<std::string> ablate;
  std::string json_out;
  auto* evalc = app.add_subcommand("eval", "Score the pipeline on a synthetic corpus");
  evalc->add_option("--seed", seed, "Corpus seed");
  evalc->add_option("--docs", docs, "Number of documents")->check(CLI::PositiveNumber);
  evalc->add_option("--ablate", ablate,
                    "Compare all rules against these rules off ('all' for every rule)")
      ->delimiter(',');
  evalc->add_option("--json-out", json_out, "Also write the JSON report here");

  auto* ablatec = app.add_subcommand("ablate", "Run the standard rule ablation matrix");
  ablatec->add_option("--seed", seed, "Corpus seed");
  ablatec->add_option("--docs", docs, "Number of documents")->check(CLI::PositiveNumber);
  ablatec->add_option("--json-out", json_out, "Also write the JSON report here");

  CLI11_PARSE(app, argc, argv);
  try {
    if (*ingest) return run_ingest(g, paths);
    if (*query) return run_query(g, question);
    if (*serve) return run_serve(g, host, port);
    if (*evalc) return run_eval(g, seed, docs, ablate, json_out, false);
    if (*ablatec) return run_eval(g, seed, docs, {}, json_out, true);
  } catch (const Error& e) {
    std::cerr << "error (" << error_code_name(e.code()) << "): " << e.what() << "\n";
    return kExitError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitError;
  }
  return kExitError;
}
