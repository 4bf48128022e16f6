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

#include "finkpi/validation.hpp"

#include <algorithm>

#include "finkpi/period_phrase.hpp"
#include "finkpi/rules.hpp"

namespace finkpi {
namespace {

bool is_margin(std::string_view metric) {
  return metric.find("margin") != std::string_view::npos;
}

QACheck make(CheckKind kind, std::string question) {
  QACheck c;
  c.check_id = std::string(to_string(kind));
  c.kind = kind;
  c.question = std::move(question);
  return c;
}

void decide(QACheck& c, bool pass, std::string fail_detail) {
  c.outcome = pass ? CheckOutcome::kPass : CheckOutcome::kFail;
  if (!pass) c.detail = std::move(fail_detail);
}

QACheck check_value_in_source(const KpiRecord& r, const Document* doc) {
  QACheck c = make(CheckKind::kValueInSource,
                   "Does the source span " + r.provenance.section_id + "[" +
                       std::to_string(r.provenance.range.start) + "," +
                       std::to_string(r.provenance.range.end) + ") state " +
                       r.value_low.to_string() + " to " + r.value_high.to_string() +
                       " after scaling by " + r.scale_applied.to_string() + "?");
  if (!doc) {
    c.detail = "source document not available";
    return c;
  }
  const Section* s = doc->find_section(r.provenance.section_id);
  if (!s) {
    decide(c, false, "section not found");
    return c;
  }
  const NumericSpan* span = nullptr;
  for (const auto& n : s->numeric_spans) {
    if (n.range == r.provenance.range) span = &n;
  }
  if (!span) {
    decide(c, false, "no numeric span at the recorded offsets");
    return c;
  }
  bool ok = false;
  try {
    ok = span->low * r.scale_applied == r.value_low &&
         span->high * r.scale_applied == r.value_high;
  } catch (const std::exception&) {
    ok = false;
  }
  decide(c, ok, "source reads '" + span->surface + "'");
  return c;
}

QACheck check_period(const KpiRecord& r) {
  QACheck c = make(CheckKind::kPeriodConsistent,
                   "Is " + r.period.label() + " a plausible " +
                       std::string(r.qualifier.status == Status::kGuidance ? "guidance"
                                                                           : "reported") +
                       " period for a document published " + r.published_on.to_string() +
                       "?");
  if (r.published_on.year == 0) {
    c.detail = "publication date unknown";
    return c;
  }
  if (!r.period.resolved()) {
    decide(c, false, "period unresolved");
    return c;
  }
  int pub = r.published_on.year;
  bool ok = r.qualifier.status == Status::kGuidance ? r.period.year >= pub - 1
                                                    : std::abs(r.period.year - pub) <= 2;
  decide(c, ok, "period year " + std::to_string(r.period.year) + " vs published " +
                    std::to_string(pub));
  return c;
}

QACheck check_unit(const KpiRecord& r, const MetricTaxonomy& taxonomy) {
  QACheck c = make(CheckKind::kUnitPlausible,
                   "Is " + r.value.to_string() + " " + std::string(to_string(r.unit)) +
                       " plausible for " + r.metric + "?");
  const MetricEntry* e = taxonomy.find(r.metric);
  if (!e) {
    c.detail = "metric not in taxonomy";
    return c;
  }
  Unit expected = default_unit(e->value_class);
  if (r.unit != expected) {
    decide(c, false, "expected unit " + std::string(to_string(expected)));
    return c;
  }
  bool ok = true;
  std::string why;
  if (r.unit == Unit::kPercent) {
    Decimal hi = is_margin(r.metric) ? Decimal(100) : Decimal(1000);
    for (const Decimal* v : {&r.value, &r.value_low, &r.value_high}) {
      if (*v < Decimal(-100) || *v > hi) ok = false;
    }
    why = "outside [-100, " + hi.to_string() + "]";
  } else if (r.metric == "revenue") {
    ok = !r.value_low.is_negative();
    why = "negative revenue";
  }
  decide(c, ok, why);
  return c;
}

QACheck check_midpoint(const KpiRecord& r) {
  QACheck c = make(CheckKind::kRangeMidpoint,
                   "Is " + r.value.to_string() + " the midpoint of " +
                       r.value_low.to_string() + " and " + r.value_high.to_string() + "?");
  if (r.value_high < r.value_low) {
    decide(c, false, "bounds inverted");
    return c;
  }
  Decimal mid = midpoint(r.value_low, r.value_high);
  decide(c, mid == r.value, "midpoint is " + mid.to_string());
  return c;
}

QACheck check_qualifier(const KpiRecord& r) {
  QACheck c = make(CheckKind::kQualifierConsistent,
                   "Do the cues support " + std::string(to_string(r.qualifier.basis)) + "/" +
                       std::string(to_string(r.qualifier.status)) + "?");
  Qualifier derived = classify_qualifier(r.qualifier_cues);
  decide(c, derived == r.qualifier,
         "cues imply " + std::string(to_string(derived.basis)) + "/" +
             std::string(to_string(derived.status)));
  return c;
}

bool valid_scale(const Decimal& s) {
  return s == Decimal(1) || s == Decimal::pow10(3) || s == Decimal::pow10(6) ||
         s == Decimal::pow10(9);
}

}  // namespace

std::string_view to_string(CheckKind k) {
  switch (k) {
    case CheckKind::kValueInSource: return "ValueInSource";
    case CheckKind::kPeriodConsistent: return "PeriodConsistent";
    case CheckKind::kUnitPlausible: return "UnitPlausible";
    case CheckKind::kRangeMidpoint: return "RangeMidpoint";
    case CheckKind::kQualifierConsistent: return "QualifierConsistent";
  }
  return "?";
}

std::string_view to_string(CheckOutcome o) {
  switch (o) {
    case CheckOutcome::kPass: return "Pass";
    case CheckOutcome::kFail: return "Fail";
    case CheckOutcome::kSkipped: return "Skipped";
  }
  return "?";
}

std::string_view to_string(Disposition d) {
  switch (d) {
    case Disposition::kAccepted: return "Accepted";
    case Disposition::kCorrected: return "Corrected";
    case Disposition::kFlagged: return "Flagged";
  }
  return "?";
}

std::string_view to_string(ViolationKind v) {
  switch (v) {
    case ViolationKind::kEmptyMetric: return "EmptyMetric";
    case ViolationKind::kUnknownMetric: return "UnknownMetric";
    case ViolationKind::kUnresolvedPeriod: return "UnresolvedPeriod";
    case ViolationKind::kYearOutOfRange: return "YearOutOfRange";
    case ViolationKind::kInvertedBounds: return "InvertedBounds";
    case ViolationKind::kValueNotMidpoint: return "ValueNotMidpoint";
    case ViolationKind::kPercentOutOfBand: return "PercentOutOfBand";
    case ViolationKind::kInvalidScale: return "InvalidScale";
    case ViolationKind::kConfidenceOutOfRange: return "ConfidenceOutOfRange";
    case ViolationKind::kInvalidEnum: return "InvalidEnum";
    case ViolationKind::kMissingProvenance: return "MissingProvenance";
  }
  return "?";
}

std::size_t ValidationOutcome::count(CheckOutcome o) const {
  return static_cast<std::size_t>(std::count_if(
      checks.begin(), checks.end(), [o](const QACheck& c) { return c.outcome == o; }));
}

const QACheck* ValidationOutcome::find(CheckKind k) const {
  for (const auto& c : checks) {
    if (c.kind == k) return &c;
  }
  return nullptr;
}

ValidationOutcome run_checks(const KpiRecord& record, const Document* doc,
                             const MetricTaxonomy& taxonomy) {
  ValidationOutcome out;
  out.checks.push_back(check_value_in_source(record, doc));
  out.checks.push_back(check_period(record));
  out.checks.push_back(check_unit(record, taxonomy));
  out.checks.push_back(check_midpoint(record));
  out.checks.push_back(check_qualifier(record));

  bool only_midpoint = true;
  for (const auto& c : out.checks) {
    if (c.outcome == CheckOutcome::kFail && c.kind != CheckKind::kRangeMidpoint) {
      only_midpoint = false;
    }
  }
  const QACheck* mid = out.find(CheckKind::kRangeMidpoint);
  bool midpoint_fixable = !(record.value_high < record.value_low);
  if (out.count(CheckOutcome::kFail) == 0) {
    out.disposition = Disposition::kAccepted;
  } else if (only_midpoint && midpoint_fixable) {
    out.disposition = Disposition::kCorrected;
  } else {
    out.disposition = Disposition::kFlagged;
  }
  if (mid->outcome == CheckOutcome::kFail && midpoint_fixable) {
    out.corrections.push_back({"value", record.value.to_string(),
                               midpoint(record.value_low, record.value_high).to_string()});
  }
  return out;
}

Decimal score_confidence(const KpiRecord& /*record*/, const ValidationOutcome& outcome) {
  Decimal score = Decimal(1);
  score = score - Decimal::parse("0.15") * Decimal(static_cast<std::int64_t>(
                                               outcome.count(CheckOutcome::kFail)));
  score = score - Decimal::parse("0.05") * Decimal(static_cast<std::int64_t>(
                                               outcome.count(CheckOutcome::kSkipped)));
  if (score.is_negative()) score = Decimal(0);
  Decimal cap = Decimal::parse("0.85");
  if (outcome.disposition == Disposition::kCorrected && cap < score) score = cap;
  return score;
}

ValidatedRecord validate_record(KpiRecord record, const Document* doc,
                                const MetricTaxonomy& taxonomy) {
  ValidatedRecord out;
  out.outcome = run_checks(record, doc, taxonomy);
  if (out.outcome.disposition == Disposition::kCorrected) {
    record.value = midpoint(record.value_low, record.value_high);
  }
  record.confidence = score_confidence(record, out.outcome);
  out.record = std::move(record);
  return out;
}

std::vector<Violation> validate_schema(const KpiRecord& r, const MetricTaxonomy* taxonomy) {
  std::vector<Violation> v;
  auto add = [&](ViolationKind k, std::string detail) { v.push_back({k, std::move(detail)}); };
  if (r.metric.empty()) {
    add(ViolationKind::kEmptyMetric, "metric is empty");
  } else if (taxonomy && !taxonomy->contains(r.metric)) {
    add(ViolationKind::kUnknownMetric, r.metric);
  }
  if (to_string(r.unit) == "?" || to_string(r.period.granularity) == "?" ||
      to_string(r.period.resolved_from) == "?" || to_string(r.qualifier.basis) == "?" ||
      to_string(r.qualifier.status) == "?") {
    add(ViolationKind::kInvalidEnum, "enum field out of range");
  }
  if (!r.period.resolved()) {
    add(ViolationKind::kUnresolvedPeriod, "period is unresolved");
  } else if (r.period.year < kMinFiscalYear || r.period.year > kMaxFiscalYear) {
    add(ViolationKind::kYearOutOfRange, std::to_string(r.period.year));
  }
  if (r.value_high < r.value_low) {
    add(ViolationKind::kInvertedBounds,
        r.value_low.to_string() + " > " + r.value_high.to_string());
  } else {
    bool is_mid = false;
    try {
      is_mid = midpoint(r.value_low, r.value_high) == r.value;
    } catch (const std::exception&) {
      is_mid = false;
    }
    if (!is_mid) add(ViolationKind::kValueNotMidpoint, r.value.to_string());
  }
  if (r.unit == Unit::kPercent) {
    for (const Decimal* x : {&r.value, &r.value_low, &r.value_high}) {
      if (*x < Decimal(-100) || *x > Decimal(1000)) {
        add(ViolationKind::kPercentOutOfBand, x->to_string());
        break;
      }
    }
  }
  if (!valid_scale(r.scale_applied) ||
      (r.unit == Unit::kPercent && r.scale_applied != Decimal(1))) {
    add(ViolationKind::kInvalidScale, r.scale_applied.to_string());
  }
  if (r.confidence.is_negative() || Decimal(1) < r.confidence) {
    add(ViolationKind::kConfidenceOutOfRange, r.confidence.to_string());
  }
  if (r.provenance.doc_id.empty() || r.provenance.section_id.empty() ||
      r.provenance.range.empty()) {
    add(ViolationKind::kMissingProvenance, "provenance incomplete");
  }
  return v;
}

}  // namespace finkpi
