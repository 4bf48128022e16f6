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
#include "finkpi/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <tuple>

namespace finkpi {
namespace {

bool basis_ok(const KpiRecord& r, const QueryIntent& in) {
  if (in.basis_filter == Basis::kGAAP) return r.qualifier.basis != Basis::kNonGAAP;
  if (in.basis_filter == Basis::kNonGAAP) return r.qualifier.basis == Basis::kNonGAAP;
  return true;
}

bool matches(const KpiRecord& r, const QueryIntent& in) {
  if (std::find(in.metrics.begin(), in.metrics.end(), r.metric) == in.metrics.end()) return false;
  if (in.period_filter) {
    const auto& pf = *in.period_filter;
    if (pf.granularity && r.period.granularity != *pf.granularity) return false;
    if (pf.year_from && (r.period.year < *pf.year_from || r.period.year > *pf.year_to)) {
      return false;
    }
  }
  if (in.status_filter == StatusFilter::kActualOnly && r.qualifier.status != Status::kActual) {
    return false;
  }
  if (in.status_filter == StatusFilter::kGuidanceOnly && r.qualifier.status != Status::kGuidance) {
    return false;
  }
  if (in.company_filter && r.company != *in.company_filter) return false;
  return basis_ok(r, in);
}

// True when a sorts before b: latest period, latest publication, highest
// confidence, then text keys ascending.
bool before(const KpiRecord& a, const KpiRecord& b) {
  if (a.period.ordinal() != b.period.ordinal()) return a.period.ordinal() > b.period.ordinal();
  if (a.published_on != b.published_on) return a.published_on > b.published_on;
  if (a.confidence != b.confidence) return a.confidence > b.confidence;
  auto text_key = [](const KpiRecord& r) {
    return std::make_tuple(r.metric, std::string(to_string(r.period.granularity)),
                           std::string(to_string(r.qualifier.status)), r.provenance.doc_id,
                           r.provenance.section_id);
  };
  return text_key(a) < text_key(b);
}

bool prior_before(const KpiRecord& a, const KpiRecord& b) {
  if (a.published_on != b.published_on) return a.published_on > b.published_on;
  if (a.confidence != b.confidence) return a.confidence > b.confidence;
  return std::tie(a.provenance.doc_id, a.provenance.section_id) <
         std::tie(b.provenance.doc_id, b.provenance.section_id);
}

bool is_prior(const KpiRecord& prev, const KpiRecord& cur, Comparison cmp) {
  if (prev.metric != cur.metric || prev.qualifier.status != cur.qualifier.status ||
      prev.company != cur.company) {
    return false;
  }
  if (cmp == Comparison::kYoY) {
    return prev.period.granularity == cur.period.granularity &&
           prev.period.year == cur.period.year - 1;
  }
  switch (cur.period.granularity) {
    case Granularity::kQ1:
      return prev.period.granularity == Granularity::kQ4 && prev.period.year == cur.period.year - 1;
    case Granularity::kQ2:
      return prev.period.granularity == Granularity::kQ1 && prev.period.year == cur.period.year;
    case Granularity::kQ3:
      return prev.period.granularity == Granularity::kQ2 && prev.period.year == cur.period.year;
    case Granularity::kQ4:
      return prev.period.granularity == Granularity::kQ3 && prev.period.year == cur.period.year;
    default: return false;
  }
}

std::optional<double> aggregate(Aggregation agg, const std::vector<const KpiRecord*>& rows) {
  if (agg == Aggregation::kCount) return static_cast<double>(rows.size());
  if (rows.empty()) return std::nullopt;
  Decimal sum;
  Decimal lo = rows[0]->value;
  Decimal hi = rows[0]->value;
  for (const auto* r : rows) {
    sum += r->value;
    lo = std::min(lo, r->value);
    hi = std::max(hi, r->value);
  }
  switch (agg) {
    case Aggregation::kAvg: return sum.to_double() / static_cast<double>(rows.size());
    case Aggregation::kSum: return sum.to_double();
    case Aggregation::kMin: return lo.to_double();
    case Aggregation::kMax: return hi.to_double();
    default: return std::nullopt;
  }
}

}  // namespace

std::optional<double> oracle_answer(const QueryIntent& intent,
                                    const std::vector<KpiRecord>& records) {
  std::vector<const KpiRecord*> hits;
  for (const auto& r : records) {
    if (matches(r, intent)) hits.push_back(&r);
  }
  auto by_order = [](const KpiRecord* a, const KpiRecord* b) { return before(*a, *b); };

  if (intent.comparison) {
    std::sort(hits.begin(), hits.end(), by_order);
    for (const auto* cur : hits) {
      const KpiRecord* best = nullptr;
      for (const auto& prev : records) {
        if (!is_prior(prev, *cur, *intent.comparison) || !basis_ok(prev, intent)) continue;
        if (!best || prior_before(prev, *best)) best = &prev;
      }
      if (best) return (cur->value - best->value).to_double();
    }
    return std::nullopt;
  }

  switch (intent.aggregation) {
    case Aggregation::kNone:
    case Aggregation::kLatest: {
      if (hits.empty()) return std::nullopt;
      return (*std::min_element(hits.begin(), hits.end(), by_order))->value.to_double();
    }
    default: break;
  }
  if (intent.metrics.size() == 1) return aggregate(intent.aggregation, hits);
  std::map<std::string, std::vector<const KpiRecord*>> groups;
  for (const auto* r : hits) groups[r->metric].push_back(r);
  if (groups.empty()) return std::nullopt;
  return aggregate(intent.aggregation, groups.begin()->second);
}

bool answers_match(const std::optional<double>& expected, const std::optional<Decimal>& actual) {
  if (!expected || !actual) return expected.has_value() == actual.has_value();
  double a = *expected;
  double b = actual->to_double();
  double diff = std::fabs(a - b);
  return diff <= 1e-9 || diff <= 1e-9 * std::max(std::fabs(a), std::fabs(b));
}

}  // namespace finkpi
