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
// SQLite-backed KPI store: one wide table `kpi`, a `meta` table holding
// the schema version, and an optional audit log receiving one line per
// upserted record.

#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "finkpi/audit.hpp"
#include "finkpi/decimal.hpp"
#include "finkpi/records.hpp"
#include "finkpi/serialize.hpp"
#include "finkpi/taxonomy.hpp"

struct sqlite3;

namespace finkpi {

inline constexpr int kSchemaVersion = 1;
inline constexpr std::string_view kKpiTable = "kpi";

enum class CellType { kNull, kInteger, kDecimal, kText };
std::string_view to_string(CellType t);

using Cell = std::variant<std::monostate, std::int64_t, Decimal, std::string>;

// Result of a SELECT. Every row has columns.size() cells and each non-null
// cell holds the alternative named by its column's type.
struct ResultTable {
  std::vector<std::string> columns;
  std::vector<CellType> column_types;
  std::vector<std::vector<Cell>> rows;

  size_t row_count() const { return rows.size(); }
  std::optional<size_t> column_index(std::string_view name) const;
};

Json to_json(const Cell& cell);
Json to_json(const ResultTable& table);
// Numeric cells as Decimal; nullopt for NULL and text.
std::optional<Decimal> cell_decimal(const Cell& cell);

struct ColumnInfo {
  std::string name;
  std::string logical_type;    // TEXT, DECIMAL, INT, DATE
  std::string unit_semantics;  // how to read the stored value
  std::vector<std::string> aliases;
};

struct MetricInfo {
  std::string canonical_name;
  std::string display_name;
  Unit unit = Unit::kUSD;
  std::vector<std::string> aliases;
};

struct SchemaCard {
  std::string table;
  std::vector<ColumnInfo> columns;
  std::vector<MetricInfo> metrics;
  ResultTable sample_rows;  // at most three
  int schema_version = kSchemaVersion;

  const ColumnInfo* column(std::string_view name) const;
  // Compact text block for SQL-generation prompts.
  std::string render() const;
};

Json to_json(const SchemaCard& card);

struct RecordFilter {
  std::optional<std::string> metric;
  std::optional<int> year;
  std::optional<Status> status;
  std::optional<std::string> company;
};

struct RecordPage {
  std::vector<KpiRecord> records;
  size_t page = 1;
  size_t page_size = 0;
  size_t total = 0;
};

class KpiStore {
 public:
  // Opens or creates the store at `path` (":memory:" for a private
  // in-memory database). Throws Error(kIoError) when the file cannot be
  // opened and Error(kSchemaVersionMismatch) when an existing store was
  // created with another version.
  KpiStore(const std::filesystem::path& path, int schema_version,
           std::shared_ptr<AuditLog> audit = nullptr,
           const MetricTaxonomy& taxonomy = MetricTaxonomy::default_taxonomy());
  ~KpiStore();

  KpiStore(const KpiStore&) = delete;
  KpiStore& operator=(const KpiStore&) = delete;

  // Inserts or replaces by (doc_id, section_id, metric, period, status) in
  // one transaction and returns the number of net new rows. Throws
  // Error(kGateViolation) and writes nothing when any record fails
  // validate_schema or holds a value the store cannot keep exactly.
  size_t upsert_records(const std::vector<KpiRecord>& records);

  SchemaCard export_schema_card() const;

  // Runs one read-only SELECT. Throws Error(kNonSelectRejected),
  // Error(kSqlSyntaxError) or Error(kExecutionError).
  ResultTable execute_sql(std::string_view sql) const;

  size_t row_count() const;
  int schema_version() const { return schema_version_; }
  // Pages are 1-based; page_size must be positive.
  RecordPage list_records(const RecordFilter& filter, size_t page, size_t page_size) const;
  // Every stored record in key order.
  std::vector<KpiRecord> all_records() const;

  AuditLog* audit() const { return audit_.get(); }
  const MetricTaxonomy& taxonomy() const { return taxonomy_; }

 private:
  ResultTable query(std::string_view sql, const std::vector<std::string>& params) const;
  std::shared_lock<std::shared_mutex> read_lock() const;

  sqlite3* db_ = nullptr;
  int schema_version_;
  std::shared_ptr<AuditLog> audit_;
  const MetricTaxonomy& taxonomy_;
  // Writers take turnstile_ before mu_ so a steady stream of readers
  // cannot starve them.
  mutable std::mutex turnstile_;
  mutable std::shared_mutex mu_;
};

std::unique_ptr<KpiStore> init_store(const std::filesystem::path& path,
                                     int schema_version = kSchemaVersion,
                                     std::shared_ptr<AuditLog> audit = nullptr);

// Exact representation of `value` as the store keeps it.
bool storable(const Decimal& value);

}  // namespace finkpi
