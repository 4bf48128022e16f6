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
#include "finkpi/store.hpp"

#include <sqlite3.h>

#include <cmath>
#include <mutex>

#include "finkpi/error.hpp"
#include "finkpi/rules.hpp"
#include "finkpi/sql.hpp"
#include "finkpi/validation.hpp"
#include "text_util.hpp"

namespace finkpi {
namespace {

// REAL cells from stored columns are read back at kStoredDigits, which
// the storable() gate makes lossless. Computed REAL cells lose low digits
// to cancellation (14.6 - 14.4 is 0.19999999999999929 in binary), so they
// are read back at kComputedDigits.
constexpr int kStoredDigits = 15;
constexpr int kComputedDigits = 12;

constexpr std::string_view kCreateKpi = R"(
CREATE TABLE IF NOT EXISTS kpi (
  metric TEXT NOT NULL,
  value DECIMAL NOT NULL,
  value_low DECIMAL NOT NULL,
  value_high DECIMAL NOT NULL,
  unit TEXT NOT NULL,
  scale_applied DECIMAL NOT NULL,
  period_granularity TEXT NOT NULL,
  period_year INT NOT NULL,
  basis TEXT NOT NULL,
  status TEXT NOT NULL,
  confidence DECIMAL NOT NULL,
  company TEXT NOT NULL,
  doc_id TEXT NOT NULL,
  section_id TEXT NOT NULL,
  published_on DATE NOT NULL,
  period_source TEXT NOT NULL,
  period_ordinal INT NOT NULL,
  span_start INT NOT NULL,
  span_end INT NOT NULL,
  rules_applied TEXT NOT NULL,
  qualifier_cues TEXT NOT NULL,
  UNIQUE (doc_id, section_id, metric, period_granularity, period_year, status)
);
CREATE TABLE IF NOT EXISTS meta (key TEXT PRIMARY KEY, value TEXT NOT NULL);
)";

constexpr std::string_view kColumnList =
    "metric, value, value_low, value_high, unit, scale_applied, period_granularity, "
    "period_year, basis, status, confidence, company, doc_id, section_id, published_on, "
    "period_source, period_ordinal, span_start, span_end, rules_applied, qualifier_cues";

constexpr std::string_view kKeyOrder =
    " ORDER BY doc_id, section_id, span_start, metric, period_ordinal, status";

constexpr std::string_view kUpsert = R"(
INSERT INTO kpi (metric, value, value_low, value_high, unit, scale_applied,
  period_granularity, period_year, basis, status, confidence, company, doc_id,
  section_id, published_on, period_source, period_ordinal, span_start, span_end,
  rules_applied, qualifier_cues)
VALUES (?1, ?2, ?3, ?4, ?5, ?6, ?7, ?8, ?9, ?10, ?11, ?12, ?13, ?14, ?15, ?16, ?17,
  ?18, ?19, ?20, ?21)
ON CONFLICT (doc_id, section_id, metric, period_granularity, period_year, status)
DO UPDATE SET value = excluded.value, value_low = excluded.value_low,
  value_high = excluded.value_high, unit = excluded.unit,
  scale_applied = excluded.scale_applied, basis = excluded.basis,
  confidence = excluded.confidence, company = excluded.company,
  published_on = excluded.published_on, period_source = excluded.period_source,
  period_ordinal = excluded.period_ordinal, span_start = excluded.span_start,
  span_end = excluded.span_end, rules_applied = excluded.rules_applied,
  qualifier_cues = excluded.qualifier_cues
)";

class Statement {
 public:
  Statement(sqlite3* db, std::string_view sql, ErrorCode on_error) : db_(db) {
    const char* tail = nullptr;
    if (sqlite3_prepare_v2(db, sql.data(), static_cast<int>(sql.size()), &stmt_, &tail) !=
        SQLITE_OK) {
      throw Error(on_error, sqlite3_errmsg(db));
    }
    if (tail && std::string_view(tail).find_first_not_of(" \t\r\n;") != std::string_view::npos) {
      sqlite3_finalize(stmt_);
      throw Error(ErrorCode::kNonSelectRejected, "multiple statements");
    }
  }
  ~Statement() { sqlite3_finalize(stmt_); }
  Statement(const Statement&) = delete;
  Statement& operator=(const Statement&) = delete;

  sqlite3_stmt* get() const { return stmt_; }

  void bind(int i, const std::string& text) {
    sqlite3_bind_text(stmt_, i, text.data(), static_cast<int>(text.size()), SQLITE_TRANSIENT);
  }
  void bind(int i, std::int64_t v) { sqlite3_bind_int64(stmt_, i, v); }
  void bind(int i, const Decimal& d) {
    if (d.is_integer()) {
      bind(i, static_cast<std::int64_t>(std::llround(d.to_double())));
    } else {
      sqlite3_bind_double(stmt_, i, d.to_double());
    }
  }

  // SQLITE_ROW or SQLITE_DONE.
  int step(ErrorCode on_error = ErrorCode::kExecutionError) {
    int rc = sqlite3_step(stmt_);
    if (rc != SQLITE_ROW && rc != SQLITE_DONE) throw Error(on_error, sqlite3_errmsg(db_));
    return rc;
  }

 private:
  sqlite3* db_;
  sqlite3_stmt* stmt_ = nullptr;
};

void exec(sqlite3* db, std::string_view sql, ErrorCode on_error) {
  char* err = nullptr;
  if (sqlite3_exec(db, std::string(sql).c_str(), nullptr, nullptr, &err) != SQLITE_OK) {
    std::string msg = err ? err : sqlite3_errmsg(db);
    sqlite3_free(err);
    throw Error(on_error, msg);
  }
}

CellType declared_type(const char* decl) {
  if (!decl) return CellType::kNull;
  std::string d = text::to_lower(decl);
  if (d.find("int") != std::string::npos) return CellType::kInteger;
  if (d.find("dec") != std::string::npos || d.find("num") != std::string::npos ||
      d.find("real") != std::string::npos || d.find("floa") != std::string::npos ||
      d.find("doub") != std::string::npos) {
    return CellType::kDecimal;
  }
  return CellType::kText;
}

using RawCell = std::variant<std::monostate, std::int64_t, double, std::string>;

std::string raw_text(const RawCell& c, int digits) {
  if (auto* i = std::get_if<std::int64_t>(&c)) return std::to_string(*i);
  if (auto* d = std::get_if<double>(&c)) return Decimal::from_double(*d, digits).to_string();
  if (auto* s = std::get_if<std::string>(&c)) return *s;
  return "";
}

Cell convert(const RawCell& c, CellType type, int digits) {
  if (std::holds_alternative<std::monostate>(c)) return std::monostate{};
  switch (type) {
    case CellType::kInteger: return std::get<std::int64_t>(c);
    case CellType::kDecimal:
      if (auto* i = std::get_if<std::int64_t>(&c)) return Decimal(*i);
      return Decimal::from_double(std::get<double>(c), digits);
    default: return raw_text(c, digits);
  }
}

ResultTable run(sqlite3* db, Statement& st) {
  sqlite3_stmt* s = st.get();
  int n = sqlite3_column_count(s);
  ResultTable table;
  std::vector<CellType> declared(n);
  for (int i = 0; i < n; ++i) {
    table.columns.emplace_back(sqlite3_column_name(s, i));
    declared[i] = declared_type(sqlite3_column_decltype(s, i));
  }
  std::vector<std::vector<RawCell>> raw;
  while (st.step() == SQLITE_ROW) {
    std::vector<RawCell> row(n);
    for (int i = 0; i < n; ++i) {
      switch (sqlite3_column_type(s, i)) {
        case SQLITE_INTEGER: row[i] = static_cast<std::int64_t>(sqlite3_column_int64(s, i)); break;
        case SQLITE_FLOAT: {
          double d = sqlite3_column_double(s, i);
          if (std::isfinite(d)) {
            row[i] = d;
          } else {
            row[i] = std::string(d > 0 ? "inf" : d < 0 ? "-inf" : "nan");
          }
          break;
        }
        case SQLITE_NULL: break;
        default: {
          auto* p = reinterpret_cast<const char*>(sqlite3_column_text(s, i));
          row[i] = std::string(p ? p : "", static_cast<size_t>(sqlite3_column_bytes(s, i)));
        }
      }
    }
    raw.push_back(std::move(row));
  }
  (void)db;
  // A column takes the widest kind any of its values needs:
  // integer < decimal < text. Declared DECIMAL columns start at decimal.
  for (int i = 0; i < n; ++i) {
    CellType t = declared[i] == CellType::kDecimal ? CellType::kDecimal : CellType::kNull;
    bool any_value = false;
    for (const auto& row : raw) {
      const RawCell& c = row[i];
      if (std::holds_alternative<std::monostate>(c)) continue;
      any_value = true;
      CellType need = std::holds_alternative<std::int64_t>(c) ? CellType::kInteger
                      : std::holds_alternative<double>(c)     ? CellType::kDecimal
                                                              : CellType::kText;
      if (static_cast<int>(need) > static_cast<int>(t)) t = need;
    }
    if (!any_value && declared[i] != CellType::kNull) t = declared[i];
    table.column_types.push_back(t);
  }
  for (const auto& row : raw) {
    std::vector<Cell> out(n);
    for (int i = 0; i < n; ++i) {
      int digits = declared[i] == CellType::kNull ? kComputedDigits : kStoredDigits;
      out[i] = convert(row[i], table.column_types[i], digits);
    }
    table.rows.push_back(std::move(out));
  }
  return table;
}

std::string text_of(const ResultTable& t, const std::vector<Cell>& row, std::string_view col) {
  const Cell& c = row[*t.column_index(col)];
  if (auto* s = std::get_if<std::string>(&c)) return *s;
  return "";
}

Decimal decimal_of(const ResultTable& t, const std::vector<Cell>& row, std::string_view col) {
  return cell_decimal(row[*t.column_index(col)]).value_or(Decimal());
}

std::int64_t int_of(const ResultTable& t, const std::vector<Cell>& row, std::string_view col) {
  const Cell& c = row[*t.column_index(col)];
  if (auto* i = std::get_if<std::int64_t>(&c)) return *i;
  return 0;
}

std::vector<std::string> string_list(const std::string& json) {
  Json j = Json::parse(json, nullptr, false);
  std::vector<std::string> out;
  if (j.is_array()) {
    for (const auto& v : j) {
      if (v.is_string()) out.push_back(v.get<std::string>());
    }
  }
  return out;
}

std::vector<KpiRecord> decode_records(const ResultTable& t) {
  std::vector<KpiRecord> out;
  for (const auto& row : t.rows) {
    KpiRecord r;
    r.metric = text_of(t, row, "metric");
    r.value = decimal_of(t, row, "value");
    r.value_low = decimal_of(t, row, "value_low");
    r.value_high = decimal_of(t, row, "value_high");
    r.unit = parse_unit(text_of(t, row, "unit")).value_or(Unit::kUSD);
    r.scale_applied = decimal_of(t, row, "scale_applied");
    r.period.granularity =
        parse_granularity(text_of(t, row, "period_granularity")).value_or(Granularity::kFY);
    r.period.year = static_cast<int>(int_of(t, row, "period_year"));
    r.period.resolved_from =
        parse_period_source(text_of(t, row, "period_source")).value_or(PeriodSource::kExplicit);
    r.qualifier.basis = parse_basis(text_of(t, row, "basis")).value_or(Basis::kUnstated);
    r.qualifier.status = parse_status(text_of(t, row, "status")).value_or(Status::kActual);
    r.confidence = decimal_of(t, row, "confidence");
    r.company = text_of(t, row, "company");
    r.published_on = Date::parse(text_of(t, row, "published_on")).value_or(Date{});
    r.provenance.doc_id = text_of(t, row, "doc_id");
    r.provenance.section_id = text_of(t, row, "section_id");
    r.provenance.range.start = static_cast<size_t>(int_of(t, row, "span_start"));
    r.provenance.range.end = static_cast<size_t>(int_of(t, row, "span_end"));
    r.rules_applied = string_list(text_of(t, row, "rules_applied"));
    r.qualifier_cues = string_list(text_of(t, row, "qualifier_cues"));
    out.push_back(std::move(r));
  }
  return out;
}

Json record_key(const KpiRecord& r) {
  return {{"doc_id", r.provenance.doc_id},
          {"section_id", r.provenance.section_id},
          {"metric", r.metric},
          {"period", r.period.label()},
          {"status", to_string(r.qualifier.status)}};
}

std::vector<ColumnInfo> column_catalog() {
  return {
      {"metric", "TEXT", "canonical metric name, see the metric list", {"kpi", "measure"}},
      {"value", "DECIMAL",
       "point value in the row's unit, already multiplied by scale_applied; midpoint for ranges",
       {"amount", "figure", "level"}},
      {"value_low", "DECIMAL", "lower bound in the row's unit; equals value for point figures",
       {"low end", "bottom of range"}},
      {"value_high", "DECIMAL", "upper bound in the row's unit; equals value for point figures",
       {"high end", "top of range"}},
      {"unit", "TEXT", "one of USD, Percent, Count; Percent values are percentage points",
       {"currency", "units"}},
      {"scale_applied", "DECIMAL", "multiplier applied to the reported figure (1, 1e3, 1e6, 1e9)",
       {"scale", "magnitude"}},
      {"period_granularity", "TEXT", "FY, Q1-Q4, H1 or H2", {"quarter", "half", "full year"}},
      {"period_year", "INT", "fiscal year", {"fiscal year", "year"}},
      {"basis", "TEXT", "GAAP, NonGAAP or Unstated", {"accounting basis", "adjusted"}},
      {"status", "TEXT", "Actual for reported figures, Guidance for forward-looking ones",
       {"reported", "outlook", "forecast"}},
      {"confidence", "DECIMAL", "validation score in [0, 1]", {"score"}},
      {"company", "TEXT", "issuer ticker", {"ticker", "issuer"}},
      {"doc_id", "TEXT", "source document id", {"document", "filing"}},
      {"section_id", "TEXT", "source section id", {"section"}},
      {"published_on", "DATE", "document publication date, YYYY-MM-DD",
       {"release date", "filing date"}},
      {"period_source", "TEXT", "Explicit, RelativePrior or HeaderFallback",
       {"period provenance"}},
      {"period_ordinal", "INT", "period_year * 100 + fiscal end month; sorts periods",
       {"period order"}},
      {"span_start", "INT", "byte offset of the source figure in its section", {}},
      {"span_end", "INT", "end byte offset of the source figure in its section", {}},
      {"rules_applied", "TEXT", "JSON array of normalization rules applied", {}},
      {"qualifier_cues", "TEXT", "JSON array of qualifier cue words seen in the source", {}},
  };
}

void append_where(std::string& sql, std::vector<std::string>& params, const RecordFilter& f) {
  std::vector<std::string> clauses;
  if (f.metric) {
    clauses.push_back("metric = ?");
    params.push_back(*f.metric);
  }
  if (f.year) {
    clauses.push_back("period_year = ?");
    params.push_back(std::to_string(*f.year));
  }
  if (f.status) {
    clauses.push_back("status = ?");
    params.push_back(std::string(to_string(*f.status)));
  }
  if (f.company) {
    clauses.push_back("company = ?");
    params.push_back(*f.company);
  }
  for (size_t i = 0; i < clauses.size(); ++i) sql += (i ? " AND " : " WHERE ") + clauses[i];
}

}  // namespace

std::string_view to_string(CellType t) {
  switch (t) {
    case CellType::kNull: return "null";
    case CellType::kInteger: return "integer";
    case CellType::kDecimal: return "decimal";
    case CellType::kText: return "text";
  }
  return "?";
}

std::optional<size_t> ResultTable::column_index(std::string_view name) const {
  for (size_t i = 0; i < columns.size(); ++i) {
    if (columns[i] == name) return i;
  }
  return std::nullopt;
}

std::optional<Decimal> cell_decimal(const Cell& cell) {
  if (auto* d = std::get_if<Decimal>(&cell)) return *d;
  if (auto* i = std::get_if<std::int64_t>(&cell)) return Decimal(*i);
  return std::nullopt;
}

Json to_json(const Cell& cell) {
  if (auto* i = std::get_if<std::int64_t>(&cell)) return *i;
  if (auto* d = std::get_if<Decimal>(&cell)) return d->to_string();
  if (auto* s = std::get_if<std::string>(&cell)) return *s;
  return nullptr;
}

Json to_json(const ResultTable& table) {
  Json cols = Json::array();
  for (size_t i = 0; i < table.columns.size(); ++i) {
    cols.push_back({{"name", table.columns[i]}, {"type", to_string(table.column_types[i])}});
  }
  Json rows = Json::array();
  for (const auto& row : table.rows) {
    Json r = Json::array();
    for (const auto& c : row) r.push_back(to_json(c));
    rows.push_back(std::move(r));
  }
  return {{"columns", cols}, {"rows", rows}, {"row_count", table.row_count()}};
}

const ColumnInfo* SchemaCard::column(std::string_view name) const {
  for (const auto& c : columns) {
    if (c.name == name) return &c;
  }
  return nullptr;
}

std::string SchemaCard::render() const {
  std::string out = "Table " + table + " (schema version " + std::to_string(schema_version) +
                    ")\nColumns:\n";
  for (const auto& c : columns) {
    out += "- " + c.name + " " + c.logical_type + ": " + c.unit_semantics;
    if (!c.aliases.empty()) {
      out += " (also called";
      for (size_t i = 0; i < c.aliases.size(); ++i) out += (i ? ", " : " ") + c.aliases[i];
      out += ")";
    }
    out += "\n";
  }
  out += "Metrics:\n";
  for (const auto& m : metrics) {
    out += "- '" + m.canonical_name + "' (" + m.display_name + ", " +
           std::string(to_string(m.unit)) + ")";
    if (!m.aliases.empty()) {
      out += ": ";
      for (size_t i = 0; i < m.aliases.size(); ++i) out += (i ? ", " : "") + m.aliases[i];
    }
    out += "\n";
  }
  if (sample_rows.row_count() > 0) {
    out += "Sample rows:\n";
    for (size_t i = 0; i < sample_rows.columns.size(); ++i) {
      out += (i ? " | " : "") + sample_rows.columns[i];
    }
    out += "\n";
    for (const auto& row : sample_rows.rows) {
      for (size_t i = 0; i < row.size(); ++i) {
        Json v = to_json(row[i]);
        out += (i ? " | " : "") + (v.is_string() ? v.get<std::string>() : v.dump());
      }
      out += "\n";
    }
  }
  return out;
}

Json to_json(const SchemaCard& card) {
  Json cols = Json::array();
  for (const auto& c : card.columns) {
    cols.push_back({{"name", c.name},
                    {"logical_type", c.logical_type},
                    {"unit_semantics", c.unit_semantics},
                    {"aliases", c.aliases}});
  }
  Json metrics = Json::array();
  for (const auto& m : card.metrics) {
    metrics.push_back({{"canonical_name", m.canonical_name},
                       {"display_name", m.display_name},
                       {"unit", to_string(m.unit)},
                       {"aliases", m.aliases}});
  }
  return {{"table", card.table},
          {"schema_version", card.schema_version},
          {"columns", cols},
          {"metrics", metrics},
          {"sample_rows", to_json(card.sample_rows)}};
}

bool storable(const Decimal& value) {
  double d = value.to_double();
  if (!std::isfinite(d)) return false;
  if (value.is_integer()) return std::fabs(d) < 9.0e15 && Decimal::from_double(d) == value;
  return Decimal::from_double(d, kStoredDigits) == value;
}

KpiStore::KpiStore(const std::filesystem::path& path, int schema_version,
                   std::shared_ptr<AuditLog> audit, const MetricTaxonomy& taxonomy)
    : schema_version_(schema_version), audit_(std::move(audit)), taxonomy_(taxonomy) {
  int flags = SQLITE_OPEN_READWRITE | SQLITE_OPEN_CREATE | SQLITE_OPEN_FULLMUTEX;
  if (sqlite3_open_v2(path.c_str(), &db_, flags, nullptr) != SQLITE_OK) {
    std::string msg = db_ ? sqlite3_errmsg(db_) : "out of memory";
    sqlite3_close(db_);
    throw Error(ErrorCode::kIoError, "cannot open store " + path.string() + ": " + msg);
  }
  try {
    exec(db_, kCreateKpi, ErrorCode::kIoError);
    Statement get(db_, "SELECT value FROM meta WHERE key = 'schema_version'",
                  ErrorCode::kIoError);
    if (get.step(ErrorCode::kIoError) == SQLITE_ROW) {
      int stored = sqlite3_column_int(get.get(), 0);
      if (stored != schema_version) {
        throw Error(ErrorCode::kSchemaVersionMismatch,
                    "store " + path.string() + " has schema version " + std::to_string(stored) +
                        ", expected " + std::to_string(schema_version));
      }
    } else {
      Statement put(db_, "INSERT INTO meta (key, value) VALUES ('schema_version', ?1)",
                    ErrorCode::kIoError);
      put.bind(1, std::to_string(schema_version));
      put.step(ErrorCode::kIoError);
    }
  } catch (...) {
    sqlite3_close(db_);
    throw;
  }
}

KpiStore::~KpiStore() { sqlite3_close(db_); }

size_t KpiStore::upsert_records(const std::vector<KpiRecord>& records) {
  for (size_t i = 0; i < records.size(); ++i) {
    const KpiRecord& r = records[i];
    auto violations = validate_schema(r, &taxonomy_);
    std::string detail;
    if (!violations.empty()) {
      detail = std::string(to_string(violations[0].kind)) + ": " + violations[0].detail;
    } else {
      for (const Decimal* d : {&r.value, &r.value_low, &r.value_high, &r.scale_applied,
                               &r.confidence}) {
        if (!storable(*d)) detail = "value " + d->to_string() + " cannot be stored exactly";
      }
    }
    if (!detail.empty()) {
      if (audit_) {
        audit_->append("gate_violation",
                       {{"batch_index", i}, {"key", record_key(r)}, {"detail", detail}});
      }
      throw Error(ErrorCode::kGateViolation,
                  "record " + std::to_string(i) + " rejected, batch discarded: " + detail);
    }
  }

  std::lock_guard turn(turnstile_);
  std::unique_lock lock(mu_);
  size_t before = 0;
  exec(db_, "BEGIN IMMEDIATE", ErrorCode::kIoError);
  try {
    {
      Statement count(db_, "SELECT COUNT(*) FROM kpi", ErrorCode::kIoError);
      count.step();
      before = static_cast<size_t>(sqlite3_column_int64(count.get(), 0));
    }
    Statement st(db_, kUpsert, ErrorCode::kIoError);
    for (const auto& r : records) {
      sqlite3_reset(st.get());
      st.bind(1, r.metric);
      st.bind(2, r.value);
      st.bind(3, r.value_low);
      st.bind(4, r.value_high);
      st.bind(5, std::string(to_string(r.unit)));
      st.bind(6, r.scale_applied);
      st.bind(7, std::string(to_string(r.period.granularity)));
      st.bind(8, static_cast<std::int64_t>(r.period.year));
      st.bind(9, std::string(to_string(r.qualifier.basis)));
      st.bind(10, std::string(to_string(r.qualifier.status)));
      st.bind(11, r.confidence);
      st.bind(12, r.company);
      st.bind(13, r.provenance.doc_id);
      st.bind(14, r.provenance.section_id);
      st.bind(15, r.published_on.to_string());
      st.bind(16, std::string(to_string(r.period.resolved_from)));
      st.bind(17, static_cast<std::int64_t>(r.period.ordinal()));
      st.bind(18, static_cast<std::int64_t>(r.provenance.range.start));
      st.bind(19, static_cast<std::int64_t>(r.provenance.range.end));
      st.bind(20, Json(r.rules_applied).dump());
      st.bind(21, Json(r.qualifier_cues).dump());
      st.step(ErrorCode::kIoError);
    }
    exec(db_, "COMMIT", ErrorCode::kIoError);
  } catch (...) {
    sqlite3_exec(db_, "ROLLBACK", nullptr, nullptr, nullptr);
    throw;
  }
  if (audit_) {
    for (const auto& r : records) {
      audit_->append("upsert", {{"key", record_key(r)},
                                {"value", r.value.to_string()},
                                {"unit", to_string(r.unit)},
                                {"confidence", r.confidence.to_string()}});
    }
  }
  Statement count(db_, "SELECT COUNT(*) FROM kpi", ErrorCode::kIoError);
  count.step();
  return static_cast<size_t>(sqlite3_column_int64(count.get(), 0)) - before;
}

std::shared_lock<std::shared_mutex> KpiStore::read_lock() const {
  { std::lock_guard turn(turnstile_); }
  return std::shared_lock(mu_);
}

ResultTable KpiStore::query(std::string_view sql, const std::vector<std::string>& params) const {
  auto lock = read_lock();
  Statement st(db_, sql, ErrorCode::kExecutionError);
  for (size_t i = 0; i < params.size(); ++i) st.bind(static_cast<int>(i + 1), params[i]);
  return run(db_, st);
}

ResultTable KpiStore::execute_sql(std::string_view sql) const {
  sql::parse_select(sql);
  auto lock = read_lock();
  Statement st(db_, sql, ErrorCode::kExecutionError);
  if (!sqlite3_stmt_readonly(st.get())) {
    throw Error(ErrorCode::kNonSelectRejected, "statement would modify the store");
  }
  return run(db_, st);
}

size_t KpiStore::row_count() const {
  auto t = query("SELECT COUNT(*) FROM kpi", {});
  return static_cast<size_t>(std::get<std::int64_t>(t.rows.at(0).at(0)));
}

SchemaCard KpiStore::export_schema_card() const {
  SchemaCard card;
  card.table = std::string(kKpiTable);
  card.schema_version = schema_version_;
  card.columns = column_catalog();
  for (const auto& e : taxonomy_.entries()) {
    card.metrics.push_back({e.canonical_name, e.display_name, default_unit(e.value_class),
                            e.aliases});
  }
  card.sample_rows = query(
      "SELECT metric, value, value_low, value_high, unit, scale_applied, period_granularity, "
      "period_year, basis, status, company FROM kpi" + std::string(kKeyOrder) + " LIMIT 3",
      {});
  return card;
}

RecordPage KpiStore::list_records(const RecordFilter& filter, size_t page,
                                  size_t page_size) const {
  if (page == 0 || page_size == 0) {
    throw Error(ErrorCode::kInvalidArgument, "page and page_size must be positive");
  }
  RecordPage out;
  out.page = page;
  out.page_size = page_size;
  std::string where;
  std::vector<std::string> params;
  append_where(where, params, filter);
  auto total = query("SELECT COUNT(*) FROM kpi" + where, params);
  out.total = static_cast<size_t>(std::get<std::int64_t>(total.rows.at(0).at(0)));
  std::string sql = "SELECT " + std::string(kColumnList) + " FROM kpi" + where +
                    std::string(kKeyOrder) + " LIMIT " + std::to_string(page_size) +
                    " OFFSET " + std::to_string((page - 1) * page_size);
  out.records = decode_records(query(sql, params));
  return out;
}

std::vector<KpiRecord> KpiStore::all_records() const {
  return decode_records(
      query("SELECT " + std::string(kColumnList) + " FROM kpi" + std::string(kKeyOrder), {}));
}

std::unique_ptr<KpiStore> init_store(const std::filesystem::path& path, int schema_version,
                                     std::shared_ptr<AuditLog> audit) {
  return std::make_unique<KpiStore>(path, schema_version, std::move(audit));
}

}  // namespace finkpi
