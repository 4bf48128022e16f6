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

// Parser for the read-only SQL subset accepted by the KPI store:
//
//   SELECT [DISTINCT] item, ... FROM table [[AS] alias]
//     [[INNER | LEFT [OUTER]] JOIN table [[AS] alias] ON expr] ...
//     [WHERE expr] [GROUP BY expr, ...] [HAVING expr]
//     [ORDER BY expr [ASC | DESC], ...] [LIMIT n [OFFSET m]] [;]
//
// Expressions: literals, [table.]column, function calls (COUNT(*),
// COUNT(DISTINCT x), AVG, ...), arithmetic, comparisons, AND / OR / NOT,
// [NOT] BETWEEN, [NOT] IN (list), [NOT] LIKE, IS [NOT] NULL, parentheses.
// No subqueries.

#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace finkpi::sql {

struct Expr;
using ExprPtr = std::shared_ptr<const Expr>;

enum class ExprKind {
  kColumn,    // table (may be empty) + name
  kNumber,    // text holds the literal
  kString,    // text holds the unescaped value
  kNull,
  kStar,      // only as the argument of COUNT(*) or a select item
  kUnary,     // op in {"-", "+", "NOT"}; args[0]
  kBinary,    // op in {"+","-","*","/","%","||","=","<>","<","<=",">",">=","AND","OR","LIKE"}
  kFunction,  // name upper-cased; args; distinct
  kBetween,   // args = {value, low, high}; negated
  kIn,        // args = {value, items...}; negated
  kIsNull,    // args[0]; negated for IS NOT NULL
};

struct Expr {
  ExprKind kind = ExprKind::kNull;
  std::string table;
  std::string name;  // column name, function name or operator
  std::string text;  // literal text
  std::vector<ExprPtr> args;
  bool distinct = false;
  bool negated = false;
};

struct SelectItem {
  ExprPtr expr;
  std::string alias;
};

struct TableRef {
  std::string name;
  std::string alias;
  // Name by which columns refer to this table.
  const std::string& ref() const { return alias.empty() ? name : alias; }
};

struct Join {
  bool left = false;
  TableRef table;
  ExprPtr on;
};

struct OrderItem {
  ExprPtr expr;
  bool descending = false;
};

struct SelectStatement {
  bool distinct = false;
  std::vector<SelectItem> items;
  TableRef from;
  std::vector<Join> joins;
  ExprPtr where;
  std::vector<ExprPtr> group_by;
  ExprPtr having;
  std::vector<OrderItem> order_by;
  std::optional<std::int64_t> limit;
  std::optional<std::int64_t> offset;
};

// Throws Error(kNonSelectRejected) when the text is (or contains) a
// statement other than SELECT, Error(kSqlSyntaxError) otherwise.
SelectStatement parse_select(std::string_view sql);

// Canonical SQL text; parse_select(to_sql(s)) reproduces s.
std::string to_sql(const SelectStatement& stmt);
std::string to_sql(const Expr& expr);

// Flattens nested AND chains: a AND (b AND c) -> {a, b, c}.
std::vector<ExprPtr> conjuncts(const ExprPtr& expr);

// Every node of the tree in pre-order.
void visit(const ExprPtr& expr, const std::function<void(const Expr&)>& fn);

}  // namespace finkpi::sql
