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
#include <algorithm>
#include <map>
#include <set>

#include "finkpi/error.hpp"
#include "finkpi/query.hpp"
#include "finkpi/rules.hpp"
#include "text_util.hpp"

namespace finkpi {

std::string_view to_string(GenerationSource s) {
  return s == GenerationSource::kTemplate ? "Template" : "Backend";
}

namespace {

std::string sql_literal(std::string_view v) {
  std::string out = "'";
  for (char c : v) {
    if (c == '\'') out += '\'';
    out += c;
  }
  return out + "'";
}

Granularity previous_quarter(Granularity g) {
  switch (g) {
    case Granularity::kQ2: return Granularity::kQ1;
    case Granularity::kQ3: return Granularity::kQ2;
    case Granularity::kQ4: return Granularity::kQ3;
    default: return Granularity::kQ4;
  }
}

std::string order_key(const std::string& p) {
  return p + "period_ordinal DESC, " + p + "published_on DESC, " + p + "confidence DESC, " + p +
         "metric, " + p + "period_granularity, " + p + "status, " + p + "doc_id, " + p +
         "section_id";
}

std::vector<std::string> filters(const QueryIntent& intent, const std::string& p) {
  std::vector<std::string> out;
  if (intent.metrics.size() == 1) {
    out.push_back(p + "metric = " + sql_literal(intent.metrics[0]));
  } else {
    std::string in = p + "metric IN (";
    for (size_t i = 0; i < intent.metrics.size(); ++i) {
      in += (i ? ", " : "") + sql_literal(intent.metrics[i]);
    }
    out.push_back(in + ")");
  }
  if (intent.period_filter) {
    const auto& pf = *intent.period_filter;
    if (pf.granularity) {
      out.push_back(p + "period_granularity = " + sql_literal(to_string(*pf.granularity)));
    }
    if (pf.single_year()) {
      out.push_back(p + "period_year = " + std::to_string(*pf.year_from));
    } else if (pf.year_from) {
      out.push_back(p + "period_year BETWEEN " + std::to_string(*pf.year_from) + " AND " +
                    std::to_string(*pf.year_to));
    }
  }
  if (intent.status_filter == StatusFilter::kActualOnly) out.push_back(p + "status = 'Actual'");
  if (intent.status_filter == StatusFilter::kGuidanceOnly) {
    out.push_back(p + "status = 'Guidance'");
  }
  if (intent.basis_filter == Basis::kGAAP) out.push_back(p + "basis <> 'NonGAAP'");
  if (intent.basis_filter == Basis::kNonGAAP) out.push_back(p + "basis = 'NonGAAP'");
  if (intent.company_filter) out.push_back(p + "company = " + sql_literal(*intent.company_filter));
  return out;
}

std::string where(const std::vector<std::string>& clauses) {
  std::string out;
  for (size_t i = 0; i < clauses.size(); ++i) out += (i ? " AND " : " WHERE ") + clauses[i];
  return out;
}

}  // namespace

std::string compile_template(const QueryIntent& intent) {
  check_intent(intent);
  if (intent.comparison) {
    Granularity g = *intent.period_filter->granularity;
    std::string on = "prev.metric = cur.metric AND prev.status = cur.status AND "
                     "prev.company = cur.company";
    if (*intent.comparison == Comparison::kYoY) {
      on += " AND prev.period_granularity = cur.period_granularity AND "
            "prev.period_year = cur.period_year - 1";
    } else {
      on += " AND prev.period_granularity = " + sql_literal(to_string(previous_quarter(g))) +
            " AND prev.period_year = cur.period_year" + (g == Granularity::kQ1 ? " - 1" : "");
    }
    auto clauses = filters(intent, "cur.");
    if (intent.basis_filter == Basis::kGAAP) clauses.push_back("prev.basis <> 'NonGAAP'");
    if (intent.basis_filter == Basis::kNonGAAP) clauses.push_back("prev.basis = 'NonGAAP'");
    return "SELECT cur.value - prev.value AS change, cur.value AS value, prev.value AS "
           "prior_value, cur.metric AS metric, cur.unit AS unit, cur.scale_applied AS "
           "scale_applied, cur.period_granularity AS period_granularity, cur.period_year AS "
           "period_year, prev.period_granularity AS prior_granularity, prev.period_year AS "
           "prior_year, cur.status AS status FROM kpi cur JOIN kpi prev ON " +
           on + where(clauses) + " ORDER BY " + order_key("cur.") + ", prev.published_on DESC, "
           "prev.confidence DESC, prev.doc_id, prev.section_id LIMIT 1";
  }
  std::string w = where(filters(intent, ""));
  bool grouped = intent.metrics.size() > 1;
  std::string group = grouped ? " GROUP BY metric ORDER BY metric" : "";
  std::string metric_col = grouped ? ", metric" : "";
  auto aggregate = [&](std::string_view fn) {
    return "SELECT " + std::string(fn) + "(value) AS value" + metric_col +
           ", COUNT(*) AS records FROM kpi" + w + group;
  };
  switch (intent.aggregation) {
    case Aggregation::kAvg: return aggregate("AVG");
    case Aggregation::kSum: return aggregate("SUM");
    case Aggregation::kMin: return aggregate("MIN");
    case Aggregation::kMax: return aggregate("MAX");
    case Aggregation::kCount: return "SELECT COUNT(*) AS value" + metric_col + " FROM kpi" + w + group;
    case Aggregation::kNone:
    case Aggregation::kLatest: break;
  }
  return "SELECT value, metric, unit, scale_applied, period_granularity, period_year, status, "
         "basis, value_low, value_high, company FROM kpi" +
         w + " ORDER BY " + order_key("") +
         (intent.aggregation == Aggregation::kLatest ? " LIMIT 1" : " LIMIT 20");
}

std::string build_sql_prompt(std::string_view question, const QueryIntent& intent,
                             const SchemaCard& card, std::string_view feedback) {
  QueryIntent margin;
  margin.metrics = {"operating_margin"};
  margin.period_filter = PeriodFilter{Granularity::kQ4, 2024, 2024};
  QueryIntent guidance;
  guidance.metrics = {"revenue"};
  guidance.period_filter = PeriodFilter{Granularity::kFY, 2025, 2025};
  guidance.status_filter = StatusFilter::kGuidanceOnly;

  std::string out =
      "Translate the analyst question into one SQLite SELECT statement over the table "
      "described below. Use only the listed columns. Keep status = 'Actual' unless the "
      "question asks for guidance or outlook. Reply with the statement in a sql code block.\n\n";
  out += card.render();
  out += "\nExamples:\nQuestion: What was the Q4 2024 operating margin?\nSQL: " +
         compile_template(margin) + "\nQuestion: What is the FY 2025 revenue guidance?\nSQL: " +
         compile_template(guidance) + "\n\n";
  out += "Parsed intent: " + to_json(intent).dump() + "\n";
  if (!feedback.empty()) {
    out += "Earlier attempts were rejected:\n" + std::string(feedback) + "\n";
  }
  out += "Question: " + std::string(question) + "\nSQL:";
  return out;
}

std::vector<std::string> parse_sql_completion(std::string_view completion) {
  std::vector<std::string> out;
  auto clean = [](std::string_view s) {
    s = text::trim(s);
    while (!s.empty() && s.back() == ';') s = text::trim(s.substr(0, s.size() - 1));
    return std::string(s);
  };
  size_t pos = 0;
  while ((pos = completion.find("```", pos)) != std::string_view::npos) {
    size_t body = completion.find('\n', pos);
    if (body == std::string_view::npos) break;
    size_t end = completion.find("```", body);
    if (end == std::string_view::npos) end = completion.size();
    std::string sql = clean(completion.substr(body + 1, end - body - 1));
    if (!sql.empty()) out.push_back(sql);
    pos = end + 3;
    if (pos >= completion.size()) break;
  }
  if (!out.empty()) return out;
  auto hits = text::find_words_ci(completion, "select");
  if (hits.empty()) return out;
  std::string_view rest = completion.substr(hits[0]);
  size_t semi = rest.find(';');
  if (semi != std::string_view::npos) rest = rest.substr(0, semi);
  std::string sql = clean(rest);
  if (!sql.empty()) out.push_back(sql);
  return out;
}

namespace {

std::vector<SqlCandidate> backend_candidates(const QueryIntent& intent, const SchemaCard& card,
                                             const CompletionBackend& backend,
                                             std::string_view question, std::string_view feedback,
                                             GenerationLog* log) {
  std::vector<SqlCandidate> out;
  std::string completion;
  try {
    completion = backend.complete(build_sql_prompt(question, intent, card, feedback));
  } catch (const std::exception& e) {
    if (log) log->backend_failed = true;
    return out;
  }
  for (auto& sql : parse_sql_completion(completion)) {
    try {
      sql::parse_select(sql);
    } catch (const Error&) {
      if (log) log->unparseable.push_back(sql);
      continue;
    }
    out.push_back({sql, intent, GenerationSource::kBackend, static_cast<int>(out.size())});
  }
  return out;
}

}  // namespace

std::vector<SqlCandidate> generate_sql(const QueryIntent& intent, const SchemaCard& card,
                                       const CompletionBackend* backend,
                                       std::string_view question, GenerationLog* log) {
  std::vector<SqlCandidate> out;
  if (backend) out = backend_candidates(intent, card, *backend, question, "", log);
  out.push_back({compile_template(intent), intent, GenerationSource::kTemplate,
                 static_cast<int>(out.size())});
  return out;
}

std::vector<SqlCandidate> regenerate_sql(const QueryIntent& intent, const SchemaCard& card,
                                         const CompletionBackend& backend,
                                         std::string_view question, std::string_view feedback,
                                         GenerationLog* log) {
  return backend_candidates(intent, card, backend, question, feedback, log);
}

Json to_json(const ValidationReport& report) {
  Json violations = Json::array();
  for (const auto& v : report.violations) {
    violations.push_back({{"rule", v.rule}, {"detail", v.detail}});
  }
  return {{"syntax_ok", report.syntax_ok},
          {"unit_consistent", report.unit_consistent},
          {"temporal_aligned", report.temporal_aligned},
          {"qualifier_correct", report.qualifier_correct},
          {"violations", violations}};
}

// ---- semantic checks -------------------------------------------------------

namespace {

using sql::Expr;
using sql::ExprKind;
using sql::ExprPtr;
using StringSet = std::set<std::string>;

const StringSet kStatuses = {"Actual", "Guidance"};
const StringSet kBases = {"GAAP", "NonGAAP", "Unstated"};
const StringSet kKnownFunctions = {"COUNT", "AVG", "SUM", "MIN", "MAX", "TOTAL", "ABS",
                                   "ROUND", "COALESCE", "IFNULL", "LOWER", "UPPER", "LENGTH"};
const StringSet kAggregates = {"AVG", "SUM", "MIN", "MAX", "TOTAL"};
const std::string kMixed = "mixed:";

// What the WHERE and ON conjuncts pin down about one table reference.
struct RefFacts {
  std::optional<StringSet> metric;
  std::optional<StringSet> status;
  std::optional<StringSet> granularity;
  std::optional<StringSet> basis;
  std::optional<StringSet> company;
  std::optional<std::pair<int, int>> years;
  bool year_other = false;  // year predicate the checker cannot read
};

// period_year of `to` equals period_year of `from` plus offset.
struct YearLink {
  std::string from;
  std::string to;
  int offset;
};

struct ColumnLink {
  std::string a;
  std::string b;
  std::string column;
};

void intersect(std::optional<StringSet>& slot, const StringSet& values) {
  if (!slot) {
    slot = values;
    return;
  }
  StringSet keep;
  for (const auto& v : *slot) {
    if (values.count(v)) keep.insert(v);
  }
  slot = keep;
}

class Checker {
 public:
  Checker(const sql::SelectStatement& stmt, const SchemaCard& card, ValidationReport& report)
      : stmt_(stmt), card_(card), report_(report) {}

  void run(const QueryIntent& intent) {
    collect_refs();
    for (const auto& item : stmt_.items) {
      if (!item.alias.empty()) aliases_.insert(item.alias);
    }
    check_columns();
    if (!report_.syntax_ok) return;
    collect_facts();
    check_units();
    check_temporal(intent);
    check_qualifier(intent);
  }

 private:
  void fail(bool ValidationReport::*flag, const std::string& rule, const std::string& detail) {
    report_.*flag = false;
    report_.violations.push_back({rule, detail});
  }

  void collect_refs() {
    order_.push_back(stmt_.from.ref());
    refs_[stmt_.from.ref()] = RefFacts{};
    if (stmt_.from.name != card_.table) {
      fail(&ValidationReport::syntax_ok, "syntax", "unknown table " + stmt_.from.name);
    }
    for (const auto& j : stmt_.joins) {
      if (j.table.name != card_.table) {
        fail(&ValidationReport::syntax_ok, "syntax", "unknown table " + j.table.name);
      }
      if (refs_.count(j.table.ref())) {
        fail(&ValidationReport::syntax_ok, "syntax", "duplicate table reference " + j.table.ref());
      }
      order_.push_back(j.table.ref());
      refs_[j.table.ref()] = RefFacts{};
    }
  }

  // Table reference a column belongs to; empty when unknown.
  std::string owner(const Expr& col) const {
    if (!col.table.empty()) return refs_.count(col.table) ? col.table : "";
    return order_.size() == 1 ? order_[0] : "";
  }

  void check_columns() {
    auto check = [&](const ExprPtr& root, bool allow_alias) {
      sql::visit(root, [&](const Expr& e) {
        if (e.kind == ExprKind::kFunction && !kKnownFunctions.count(e.name)) {
          fail(&ValidationReport::syntax_ok, "syntax", "unknown function " + e.name);
        }
        if (e.kind != ExprKind::kColumn) return;
        if (allow_alias && e.table.empty() && aliases_.count(e.name)) return;
        if (!e.table.empty() && !refs_.count(e.table)) {
          fail(&ValidationReport::syntax_ok, "syntax", "unknown table reference " + e.table);
        } else if (!card_.column(e.name)) {
          fail(&ValidationReport::syntax_ok, "syntax", "unknown column " + e.name);
        } else if (e.table.empty() && order_.size() > 1) {
          fail(&ValidationReport::syntax_ok, "syntax", "ambiguous column " + e.name);
        }
      });
    };
    for (const auto& item : stmt_.items) {
      if (item.expr->kind != ExprKind::kStar) check(item.expr, false);
    }
    for (const auto& j : stmt_.joins) check(j.on, false);
    check(stmt_.where, false);
    for (const auto& g : stmt_.group_by) check(g, true);
    check(stmt_.having, true);
    for (const auto& o : stmt_.order_by) check(o.expr, true);
  }

  static std::optional<std::string> literal_text(const ExprPtr& e) {
    if (e->kind == ExprKind::kString || e->kind == ExprKind::kNumber) return e->text;
    return std::nullopt;
  }

  static std::optional<int> literal_int(const ExprPtr& e) {
    if (e->kind == ExprKind::kNumber) {
      try {
        size_t used = 0;
        int v = std::stoi(e->text, &used);
        if (used == e->text.size()) return v;
      } catch (const std::exception&) {
      }
    }
    if (e->kind == ExprKind::kUnary && e->name == "-") {
      if (auto v = literal_int(e->args[0])) return -*v;
    }
    return std::nullopt;
  }

  // column [+/- k] -> (owner, column name, k)
  std::optional<std::tuple<std::string, std::string, int>> column_offset(const ExprPtr& e) const {
    if (e->kind == ExprKind::kColumn) return std::make_tuple(owner(*e), e->name, 0);
    if (e->kind == ExprKind::kBinary && (e->name == "+" || e->name == "-") &&
        e->args[0]->kind == ExprKind::kColumn) {
      if (auto k = literal_int(e->args[1])) {
        return std::make_tuple(owner(*e->args[0]), e->args[0]->name, e->name == "+" ? *k : -*k);
      }
    }
    return std::nullopt;
  }

  std::optional<StringSet>* slot(RefFacts& f, const std::string& column) {
    if (column == "metric") return &f.metric;
    if (column == "status") return &f.status;
    if (column == "period_granularity") return &f.granularity;
    if (column == "basis") return &f.basis;
    if (column == "company") return &f.company;
    return nullptr;
  }

  void set_years(RefFacts& f, int lo, int hi) {
    if (f.years) {
      f.years = std::make_pair(std::max(lo, f.years->first), std::min(hi, f.years->second));
    } else {
      f.years = std::make_pair(lo, hi);
    }
  }

  void absorb(const ExprPtr& c) {
    if (c->kind == ExprKind::kBinary) {
      const std::string& op = c->name;
      auto lhs = column_offset(c->args[0]);
      auto rhs = column_offset(c->args[1]);
      // Column against column.
      if (lhs && rhs && op == "=") {
        auto& [ra, ca, ka] = *lhs;
        auto& [rb, cb, kb] = *rhs;
        if (ca == cb && !ra.empty() && !rb.empty() && ra != rb) {
          if (ca == "period_year") {
            // ra.year + ka = rb.year + kb  =>  ra.year = rb.year + (kb - ka)
            year_links_.push_back({rb, ra, kb - ka});
          } else if (ka == 0 && kb == 0) {
            column_links_.push_back({ra, rb, ca});
          }
        } else if (ca == "period_year" || cb == "period_year") {
          mark_year_other(ra);
          mark_year_other(rb);
        }
        return;
      }
      // Column against literal, either side.
      const ExprPtr* col = nullptr;
      const ExprPtr* lit = nullptr;
      std::string oper = op;
      if (c->args[0]->kind == ExprKind::kColumn && literal_text(c->args[1])) {
        col = &c->args[0];
        lit = &c->args[1];
      } else if (c->args[1]->kind == ExprKind::kColumn && literal_text(c->args[0])) {
        col = &c->args[1];
        lit = &c->args[0];
        static const std::map<std::string, std::string> kFlip = {
            {"<", ">"}, {">", "<"}, {"<=", ">="}, {">=", "<="}};
        if (kFlip.count(op)) oper = kFlip.at(op);
      }
      if (!col) {
        if (lhs && std::get<1>(*lhs) == "period_year") mark_year_other(std::get<0>(*lhs));
        if (rhs && std::get<1>(*rhs) == "period_year") mark_year_other(std::get<0>(*rhs));
        return;
      }
      std::string ref = owner(**col);
      if (ref.empty()) return;
      RefFacts& f = refs_[ref];
      const std::string& name = (*col)->name;
      if (name == "period_year") {
        auto y = literal_int(*lit);
        if (!y) {
          f.year_other = true;
        } else if (oper == "=") {
          set_years(f, *y, *y);
        } else if (oper == ">=") {
          set_years(f, *y, kMaxYear);
        } else if (oper == ">") {
          set_years(f, *y + 1, kMaxYear);
        } else if (oper == "<=") {
          set_years(f, kMinYear, *y);
        } else if (oper == "<") {
          set_years(f, kMinYear, *y - 1);
        } else {
          f.year_other = true;
        }
        return;
      }
      auto* s = slot(f, name);
      if (!s) return;
      std::string v = *literal_text(*lit);
      if (oper == "=") {
        intersect(*s, {v});
      } else if (oper == "<>") {
        StringSet domain = name == "status" ? kStatuses : name == "basis" ? kBases : StringSet{};
        if (!domain.empty()) {
          domain.erase(v);
          intersect(*s, domain);
        }
      }
      return;
    }
    if (c->kind == ExprKind::kIn && c->args[0]->kind == ExprKind::kColumn && !c->negated) {
      std::string ref = owner(*c->args[0]);
      if (ref.empty()) return;
      RefFacts& f = refs_[ref];
      StringSet values;
      for (size_t i = 1; i < c->args.size(); ++i) {
        auto v = literal_text(c->args[i]);
        if (!v) return;
        values.insert(*v);
      }
      if (c->args[0]->name == "period_year") {
        std::set<int> years;
        for (const auto& v : values) years.insert(std::atoi(v.c_str()));
        if (years.size() == 1) {
          set_years(f, *years.begin(), *years.begin());
        } else {
          f.year_other = true;
        }
      } else if (auto* s = slot(f, c->args[0]->name)) {
        intersect(*s, values);
      }
      return;
    }
    if (c->kind == ExprKind::kBetween && !c->negated && c->args[0]->kind == ExprKind::kColumn &&
        c->args[0]->name == "period_year") {
      std::string ref = owner(*c->args[0]);
      auto lo = literal_int(c->args[1]);
      auto hi = literal_int(c->args[2]);
      if (ref.empty()) return;
      if (lo && hi) {
        set_years(refs_[ref], *lo, *hi);
      } else {
        refs_[ref].year_other = true;
      }
      return;
    }
    // Anything else that mentions a period or qualifier column, such as an
    // OR, leaves that column effectively unconstrained; note year use.
    sql::visit(c, [&](const Expr& e) {
      if (e.kind == ExprKind::kColumn && e.name == "period_year") mark_year_other(owner(e));
    });
  }

  void mark_year_other(const std::string& ref) {
    if (!ref.empty()) refs_[ref].year_other = true;
  }

  void collect_facts() {
    for (const auto& c : sql::conjuncts(stmt_.where)) absorb(c);
    for (const auto& j : stmt_.joins) {
      for (const auto& c : sql::conjuncts(j.on)) absorb(c);
    }
    // Equality links share what is known on either side.
    for (int round = 0; round < 3; ++round) {
      for (const auto& l : column_links_) {
        auto* a = slot(refs_[l.a], l.column);
        auto* b = slot(refs_[l.b], l.column);
        if (!a || !b) continue;
        if (*a && *b) {
          intersect(*a, **b);
          *b = *a;
        } else if (*a) {
          *b = *a;
        } else if (*b) {
          *a = *b;
        }
      }
    }
  }

  bool linked(const std::string& a, const std::string& b, const std::string& column) const {
    return std::any_of(column_links_.begin(), column_links_.end(), [&](const ColumnLink& l) {
      return l.column == column && ((l.a == a && l.b == b) || (l.a == b && l.b == a));
    });
  }

  // ---- units ----

  StringSet units_of(const std::string& ref) {
    StringSet units;
    const auto& facts = refs_[ref];
    for (const auto& m : card_.metrics) {
      if (!facts.metric || facts.metric->count(m.canonical_name)) {
        units.insert(std::string(to_string(m.unit)));
      }
    }
    return units;
  }

  // Value columns of refs joined on metric carry the same unit row by row.
  // The group is named by its smallest ref.
  std::string metric_group(const std::string& ref) const {
    std::set<std::string> seen{ref};
    std::vector<std::string> todo{ref};
    while (!todo.empty()) {
      std::string r = todo.back();
      todo.pop_back();
      for (const auto& l : column_links_) {
        if (l.column != "metric") continue;
        const std::string* other = l.a == r ? &l.b : l.b == r ? &l.a : nullptr;
        if (other && seen.insert(*other).second) todo.push_back(*other);
      }
    }
    return *seen.begin();
  }

  static bool is_mixed(const std::optional<std::string>& u) {
    return u && u->rfind(kMixed, 0) == 0;
  }

  bool grouped_by_metric() const {
    return std::any_of(stmt_.group_by.begin(), stmt_.group_by.end(), [](const ExprPtr& g) {
      return g->kind == ExprKind::kColumn && g->name == "metric";
    });
  }

  // Unit label of an expression; nullopt for unitless values.
  std::optional<std::string> unit(const ExprPtr& e) {
    switch (e->kind) {
      case ExprKind::kColumn: {
        const std::string& n = e->name;
        if (n == "value" || n == "value_low" || n == "value_high") {
          std::string ref = owner(*e);
          if (ref.empty()) return std::nullopt;
          StringSet u = units_of(ref);
          if (u.size() == 1) return *u.begin();
          return kMixed + metric_group(ref);
        }
        if (n == "scale_applied") return "multiplier";
        if (n == "confidence") return "score";
        if (n == "period_year") return "year";
        if (n == "period_ordinal") return "ordinal";
        if (n == "span_start" || n == "span_end") return "offset";
        return std::nullopt;
      }
      case ExprKind::kFunction: {
        if (e->name == "COUNT" || e->args.empty()) {
          for (const auto& a : e->args) unit(a);
          return std::nullopt;
        }
        std::optional<std::string> u;
        for (const auto& a : e->args) {
          auto ua = unit(a);
          combine(u, ua, e->name);
        }
        if (kAggregates.count(e->name) && is_mixed(u) && !grouped_by_metric()) {
          fail(&ValidationReport::unit_consistent, "unit",
               e->name + " over value rows whose metrics have different units");
          return std::nullopt;
        }
        return u;
      }
      case ExprKind::kUnary:
        if (e->name == "NOT") {
          unit(e->args[0]);
          return std::nullopt;
        }
        return unit(e->args[0]);
      case ExprKind::kBinary: {
        const std::string& op = e->name;
        auto a = unit(e->args[0]);
        auto b = unit(e->args[1]);
        if (op == "AND" || op == "OR" || op == "LIKE" || op == "||") return std::nullopt;
        std::optional<std::string> u = a;
        combine(u, b, op);
        bool comparison = op == "=" || op == "<>" || op == "<" || op == "<=" || op == ">" ||
                          op == ">=";
        return comparison ? std::nullopt : u;
      }
      case ExprKind::kBetween:
      case ExprKind::kIn: {
        std::optional<std::string> u = unit(e->args[0]);
        for (size_t i = 1; i < e->args.size(); ++i) combine(u, unit(e->args[i]), "comparison");
        return std::nullopt;
      }
      case ExprKind::kIsNull:
        unit(e->args[0]);
        return std::nullopt;
      default: return std::nullopt;
    }
  }

  // Two united operands must share one unit. Operands with several possible
  // units combine only within one metric group.
  void combine(std::optional<std::string>& acc, const std::optional<std::string>& next,
               const std::string& where) {
    if (!next) return;
    if (!acc) {
      acc = next;
      return;
    }
    if (*acc == *next) return;
    if (is_mixed(acc) || is_mixed(next)) {
      fail(&ValidationReport::unit_consistent, "unit",
           "'" + where + "' combines value rows whose metrics have different units");
    } else {
      fail(&ValidationReport::unit_consistent, "unit",
           "'" + where + "' mixes " + *acc + " and " + *next);
    }
    acc = std::string(kMixed) + "!";
  }

  void check_units() {
    for (const auto& item : stmt_.items) unit(item.expr);
    for (const auto& j : stmt_.joins) unit(j.on);
    if (stmt_.where) unit(stmt_.where);
    if (stmt_.having) unit(stmt_.having);
  }

  // ---- periods ----

  void check_temporal(const QueryIntent& intent) {
    const std::string& main = order_[0];
    RefFacts& f = refs_[main];
    auto flag = [&](const std::string& detail) {
      fail(&ValidationReport::temporal_aligned, "temporal", detail);
    };
    const auto& pf = intent.period_filter;
    if (pf && pf->granularity) {
      std::string want(to_string(*pf->granularity));
      if (!f.granularity || *f.granularity != StringSet{want}) {
        flag("period_granularity is not restricted to " + want);
      }
    } else if (f.granularity) {
      flag("period_granularity restricted but the question names no granularity");
    }
    if (f.year_other) flag("period_year predicate cannot be aligned with the question");
    if (pf && pf->year_from) {
      if (!f.years || f.years->first != *pf->year_from || f.years->second != *pf->year_to) {
        flag("period_year does not match " + pf->label());
      }
    } else if (f.years) {
      flag("period_year restricted but the question names no year");
    }

    if (order_.size() == 1) {
      if (intent.comparison) flag(std::string(to_string(*intent.comparison)) + " comparison not computed");
      return;
    }
    for (size_t i = 1; i < order_.size(); ++i) {
      const std::string& other = order_[i];
      std::optional<int> offset;
      for (const auto& l : year_links_) {
        if (l.from == main && l.to == other) offset = l.offset;
        if (l.from == other && l.to == main) offset = -l.offset;
      }
      if (!offset) {
        flag("join of " + main + " and " + other + " has no period_year alignment");
        continue;
      }
      if (std::abs(*offset) >= 2) {
        flag("join of " + main + " and " + other + " spans non-adjacent years (offset " +
             std::to_string(*offset) + ")");
        continue;
      }
      bool same_gran = linked(main, other, "period_granularity") ||
                       (f.granularity && refs_[other].granularity &&
                        *f.granularity == *refs_[other].granularity);
      std::optional<std::string> other_gran;
      if (refs_[other].granularity && refs_[other].granularity->size() == 1) {
        other_gran = *refs_[other].granularity->begin();
      }
      bool yoy_shape = same_gran && *offset == -1;
      bool qoq_shape = false;
      if (pf && pf->granularity && is_quarter(*pf->granularity) && other_gran) {
        Granularity g = *pf->granularity;
        Granularity want = previous_quarter(g);
        int want_offset = g == Granularity::kQ1 ? -1 : 0;
        qoq_shape = *other_gran == to_string(want) && *offset == want_offset;
      }
      if (!intent.comparison) {
        flag("join compares periods but the question asks for no comparison");
      } else if (*intent.comparison == Comparison::kYoY && !yoy_shape) {
        flag(qoq_shape ? "YoY question answered with a QoQ join (mixes YoY and QoQ)"
                       : "YoY join is not aligned to the same period one year earlier");
      } else if (*intent.comparison == Comparison::kQoQ && !qoq_shape) {
        flag(yoy_shape ? "QoQ question answered with a YoY join (mixes YoY and QoQ)"
                       : "QoQ join is not aligned to the preceding quarter");
      }
    }
  }

  // ---- qualifiers and filters ----

  void check_qualifier(const QueryIntent& intent) {
    auto flag = [&](const std::string& detail) {
      fail(&ValidationReport::qualifier_correct, "qualifier", detail);
    };
    StringSet want_status = intent.status_filter == StatusFilter::kActualOnly ? StringSet{"Actual"}
                            : intent.status_filter == StatusFilter::kGuidanceOnly
                                ? StringSet{"Guidance"}
                                : kStatuses;
    StringSet want_basis = !intent.basis_filter ? kBases
                           : *intent.basis_filter == Basis::kGAAP ? StringSet{"GAAP", "Unstated"}
                                                                  : StringSet{"NonGAAP"};
    StringSet want_metrics(intent.metrics.begin(), intent.metrics.end());
    for (const auto& ref : order_) {
      const RefFacts& f = refs_[ref];
      StringSet status = f.status.value_or(kStatuses);
      if (status != want_status) {
        flag(ref + ".status allows {" + join(status) + "}, question wants {" + join(want_status) +
             "}");
      }
      StringSet basis = f.basis.value_or(kBases);
      if (basis != want_basis) {
        flag(ref + ".basis allows {" + join(basis) + "}, question wants {" + join(want_basis) + "}");
      }
      if (!f.metric || *f.metric != want_metrics) {
        flag(ref + ".metric is not restricted to {" + join(want_metrics) + "}");
      }
      if (intent.company_filter &&
          (!f.company || *f.company != StringSet{*intent.company_filter})) {
        flag(ref + ".company is not restricted to " + *intent.company_filter);
      }
    }
  }

  static std::string join(const StringSet& s) {
    std::string out;
    for (const auto& v : s) out += (out.empty() ? "" : ", ") + v;
    return out;
  }

  static constexpr int kMinYear = -1000000;
  static constexpr int kMaxYear = 1000000;

  const sql::SelectStatement& stmt_;
  const SchemaCard& card_;
  ValidationReport& report_;
  std::vector<std::string> order_;
  std::map<std::string, RefFacts> refs_;
  StringSet aliases_;
  std::vector<YearLink> year_links_;
  std::vector<ColumnLink> column_links_;
};

}  // namespace

ValidationReport validate_constraints(const SqlCandidate& candidate, const SchemaCard& card) {
  ValidationReport report;
  sql::SelectStatement stmt;
  try {
    stmt = sql::parse_select(candidate.sql);
  } catch (const Error& e) {
    report.syntax_ok = false;
    report.violations.push_back({"syntax", e.what()});
    return report;
  }
  Checker(stmt, card, report).run(candidate.intent);
  return report;
}

}  // namespace finkpi
