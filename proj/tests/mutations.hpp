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
// Thirty known-bad SQL candidates: ten mix units, ten misalign periods and
// ten get the status or basis qualifier wrong. Each is derived from the
// template for a fixed intent by a single textual edit.

#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "finkpi/query.hpp"

namespace finkpi::testing {

enum class MutationKind { kUnit, kPeriod, kQualifier };

struct Mutation {
  MutationKind kind;
  std::string name;
  SqlCandidate candidate;
};

inline std::string replace_once(std::string text, const std::string& from, const std::string& to) {
  size_t pos = text.find(from);
  if (pos == std::string::npos) throw std::logic_error("mutation anchor missing: " + from);
  return text.replace(pos, from.size(), to);
}

inline QueryIntent margin_q4_2024() {
  QueryIntent in;
  in.metrics = {"operating_margin"};
  in.period_filter = PeriodFilter{Granularity::kQ4, 2024, 2024};
  return in;
}

inline QueryIntent revenue_q4_2024_yoy() {
  QueryIntent in;
  in.metrics = {"revenue"};
  in.period_filter = PeriodFilter{Granularity::kQ4, 2024, 2024};
  in.comparison = Comparison::kYoY;
  return in;
}

inline QueryIntent revenue_q2_2024_qoq() {
  QueryIntent in = revenue_q4_2024_yoy();
  in.period_filter = PeriodFilter{Granularity::kQ2, 2024, 2024};
  in.comparison = Comparison::kQoQ;
  return in;
}

inline QueryIntent margin_fy2025_guidance() {
  QueryIntent in;
  in.metrics = {"operating_margin"};
  in.period_filter = PeriodFilter{Granularity::kFY, 2025, 2025};
  in.status_filter = StatusFilter::kGuidanceOnly;
  return in;
}

inline QueryIntent with_basis(QueryIntent in, Basis b) {
  in.basis_filter = b;
  return in;
}

inline std::vector<Mutation> seeded_mutations() {
  std::vector<Mutation> out;
  auto add = [&](MutationKind k, std::string name, const QueryIntent& in, std::string sql) {
    out.push_back({k, std::move(name), {std::move(sql), in, GenerationSource::kBackend, 0}});
  };
  const QueryIntent a = margin_q4_2024();
  const QueryIntent b = revenue_q4_2024_yoy();
  const QueryIntent c = margin_fy2025_guidance();
  const QueryIntent d = revenue_q2_2024_qoq();
  const std::string ta = compile_template(a);
  const std::string tb = compile_template(b);
  const std::string tc = compile_template(c);
  const std::string td = compile_template(d);
  const std::string a_where =
      " WHERE metric = 'operating_margin' AND period_granularity = 'Q4' AND period_year = 2024 "
      "AND status = 'Actual'";

  using K = MutationKind;
  add(K::kUnit, "yoy join against a percent metric", b,
      replace_once(tb, "prev.metric = cur.metric", "prev.metric = 'operating_margin'"));
  add(K::kUnit, "average across revenue and margin", a,
      "SELECT AVG(value) FROM kpi WHERE metric IN ('revenue', 'operating_margin') AND "
      "period_granularity = 'Q4' AND period_year = 2024 AND status = 'Actual'");
  add(K::kUnit, "sum with no metric filter", a,
      "SELECT SUM(value) FROM kpi WHERE period_granularity = 'Q4' AND period_year = 2024 AND "
      "status = 'Actual'");
  add(K::kUnit, "percent plus confidence", a, "SELECT value + confidence FROM kpi" + a_where);
  add(K::kUnit, "percent compared with scale", a,
      "SELECT value FROM kpi" + a_where + " AND value > scale_applied");
  add(K::kUnit, "margin compared with revenue", a,
      "SELECT m.value FROM kpi m JOIN kpi r ON r.period_year = m.period_year AND "
      "r.period_granularity = m.period_granularity AND r.status = m.status WHERE "
      "m.metric = 'operating_margin' AND r.metric = 'revenue' AND m.period_granularity = 'Q4' "
      "AND m.period_year = 2024 AND m.status = 'Actual' AND m.value > r.value");
  add(K::kUnit, "dollars times scale", b,
      "SELECT value * scale_applied FROM kpi WHERE metric = 'revenue' AND "
      "period_granularity = 'Q4' AND period_year = 2024 AND status = 'Actual'");
  add(K::kUnit, "max over an OR of metrics", a,
      "SELECT MAX(value) FROM kpi WHERE (metric = 'revenue' OR metric = 'operating_margin') "
      "AND period_granularity = 'Q4' AND period_year = 2024 AND status = 'Actual'");
  add(K::kUnit, "percent minus year", a, "SELECT value - period_year FROM kpi" + a_where);
  add(K::kUnit, "range width plus confidence", a,
      "SELECT value_high - value_low + confidence FROM kpi" + a_where);

  add(K::kPeriod, "yoy join two years apart", b,
      replace_once(tb, "prev.period_year = cur.period_year - 1",
                   "prev.period_year = cur.period_year - 2"));
  add(K::kPeriod, "yoy question with a qoq join", b,
      replace_once(tb, "prev.period_granularity = cur.period_granularity AND "
                       "prev.period_year = cur.period_year - 1",
                   "prev.period_granularity = 'Q3' AND prev.period_year = cur.period_year"));
  add(K::kPeriod, "qoq question with a yoy join", d,
      replace_once(td, "prev.period_granularity = 'Q1' AND prev.period_year = cur.period_year",
                   "prev.period_granularity = cur.period_granularity AND "
                   "prev.period_year = cur.period_year - 1"));
  add(K::kPeriod, "wrong quarter", a, replace_once(ta, "'Q4'", "'Q3'"));
  add(K::kPeriod, "wrong year", a, replace_once(ta, "period_year = 2024", "period_year = 2023"));
  add(K::kPeriod, "granularity dropped", a,
      replace_once(ta, "period_granularity = 'Q4' AND ", ""));
  add(K::kPeriod, "quarter and full year mixed", a,
      replace_once(ta, "period_granularity = 'Q4'", "period_granularity IN ('Q4', 'FY')"));
  add(K::kPeriod, "join without year alignment", b,
      replace_once(tb, " AND prev.period_year = cur.period_year - 1", ""));
  add(K::kPeriod, "open-ended year range", a,
      replace_once(ta, "period_year = 2024", "period_year >= 2023"));
  add(K::kPeriod, "qoq join one year too far back", d,
      replace_once(td, "prev.period_year = cur.period_year",
                   "prev.period_year = cur.period_year - 1"));

  add(K::kQualifier, "guidance question filtered to actuals", c,
      replace_once(tc, "status = 'Guidance'", "status = 'Actual'"));
  add(K::kQualifier, "actual question filtered to guidance", a,
      replace_once(ta, "status = 'Actual'", "status = 'Guidance'"));
  add(K::kQualifier, "status predicate dropped", a,
      replace_once(ta, " AND status = 'Actual'", ""));
  add(K::kQualifier, "both statuses for an actual question", a,
      replace_once(ta, "status = 'Actual'", "status IN ('Actual', 'Guidance')"));
  add(K::kQualifier, "status inside an OR", a,
      replace_once(ta, "status = 'Actual'", "(status = 'Actual' OR status = 'Guidance')"));
  add(K::kQualifier, "guidance status dropped", c,
      replace_once(tc, " AND status = 'Guidance'", ""));
  const QueryIntent gaap = with_basis(a, Basis::kGAAP);
  const std::string tg = compile_template(gaap);
  add(K::kQualifier, "GAAP question filtered to non-GAAP", gaap,
      replace_once(tg, "basis <> 'NonGAAP'", "basis = 'NonGAAP'"));
  add(K::kQualifier, "GAAP basis dropped", gaap,
      replace_once(tg, " AND basis <> 'NonGAAP'", ""));
  const QueryIntent adjusted = with_basis(a, Basis::kNonGAAP);
  add(K::kQualifier, "non-GAAP question filtered to GAAP", adjusted,
      replace_once(compile_template(adjusted), "basis = 'NonGAAP'", "basis <> 'NonGAAP'"));
  add(K::kQualifier, "prior period with guidance rows", b,
      replace_once(tb, "prev.status = cur.status", "prev.status = 'Guidance'"));
  return out;
}

inline bool flagged(const Mutation& m, const ValidationReport& r) {
  switch (m.kind) {
    case MutationKind::kUnit: return !r.unit_consistent;
    case MutationKind::kPeriod: return !r.temporal_aligned;
    case MutationKind::kQualifier: return !r.qualifier_correct;
  }
  return false;
}

}  // namespace finkpi::testing
