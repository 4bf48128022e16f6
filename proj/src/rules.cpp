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

#include "finkpi/rules.hpp"

#include "finkpi/error.hpp"
#include "finkpi/period_phrase.hpp"
#include "text_util.hpp"

namespace finkpi {
namespace {

bool* flag(RuleSet& rs, std::string_view rule) {
  if (rule == "range_midpoint") return &rs.range_midpoint;
  if (rule == "unit_resolution") return &rs.unit_resolution;
  if (rule == "period_resolution") return &rs.period_resolution;
  if (rule == "qualifier_classification") return &rs.qualifier_classification;
  return nullptr;
}

bool is_percent_token(std::string_view t) {
  std::string l = text::to_lower(text::trim(t));
  return l == "%" || l == "percent" || l == "pct";
}

}  // namespace

void RuleSet::set(std::string_view rule, bool enabled) {
  bool* f = flag(*this, rule);
  if (!f) throw Error(ErrorCode::kConfigError, "unknown rule '" + std::string(rule) + "'");
  *f = enabled;
}

bool RuleSet::enabled(std::string_view rule) const {
  RuleSet copy = *this;
  bool* f = flag(copy, rule);
  if (!f) throw Error(ErrorCode::kConfigError, "unknown rule '" + std::string(rule) + "'");
  return *f;
}

std::vector<std::string> RuleSet::enabled_names() const {
  std::vector<std::string> out;
  for (auto name : kRuleNames) {
    if (enabled(name)) out.emplace_back(name);
  }
  return out;
}

NormalizedRange normalize_range(const Decimal& low, const Decimal& high) {
  if (high < low) {
    throw Error(ErrorCode::kInvalidRange,
                "range low " + low.to_string() + " exceeds high " + high.to_string());
  }
  return {midpoint(low, high), low, high};
}

std::optional<Decimal> scale_for_token(std::string_view unit_token) {
  std::string t = text::to_lower(text::trim(unit_token));
  if (t.empty() || t == "$" || t == "usd" || t == "us$") return Decimal(1);
  if (t == "k" || t == "thousand" || t == "thousands") return Decimal::pow10(3);
  if (t == "m" || t == "mm" || t == "mn" || t == "million" || t == "millions") {
    return Decimal::pow10(6);
  }
  if (t == "b" || t == "bn" || t == "billion" || t == "billions") return Decimal::pow10(9);
  return std::nullopt;
}

Unit default_unit(ValueClass value_class) {
  switch (value_class) {
    case ValueClass::kCurrency: return Unit::kUSD;
    case ValueClass::kPercent: return Unit::kPercent;
    case ValueClass::kCount: return Unit::kCount;
  }
  return Unit::kUSD;
}

ResolvedUnit resolve_unit(const Decimal& face_value, std::string_view unit_token,
                          ValueClass value_class) {
  if (is_percent_token(unit_token)) {
    if (value_class != ValueClass::kPercent) {
      throw Error(ErrorCode::kUnitClassConflict,
                  "percent value on a " + std::string(to_string(value_class)) + " metric");
    }
    return {face_value, Unit::kPercent, Decimal(1)};
  }
  auto scale = scale_for_token(unit_token);
  if (!scale) {
    throw Error(ErrorCode::kUnknownUnitToken,
                "unknown unit token '" + std::string(unit_token) + "'");
  }
  if (value_class == ValueClass::kPercent && *scale != Decimal(1)) {
    throw Error(ErrorCode::kUnitClassConflict,
                "scale word '" + std::string(unit_token) + "' on a Percent metric");
  }
  return {face_value * *scale, default_unit(value_class), *scale};
}

FiscalPeriod resolve_period(std::string_view phrase, const Date& /*published_on*/,
                            int /*fiscal_year_end_month*/, std::string_view anchor_phrase) {
  FiscalPeriod unresolved;
  if (text::trim(phrase).empty()) return unresolved;
  if (auto p = parse_explicit_period(phrase)) {
    return {p->granularity, p->year, PeriodSource::kExplicit};
  }
  if (is_relative_prior_phrase(phrase)) {
    auto anchor = parse_explicit_period(anchor_phrase);
    if (!anchor || anchor->year - 1 < kMinFiscalYear) return unresolved;
    return {anchor->granularity, anchor->year - 1, PeriodSource::kRelativePrior};
  }
  return unresolved;
}

bool is_forward_looking_cue(std::string_view cue) {
  std::string c = text::to_lower(text::trim(cue));
  return c == "expects" || c == "expected" || c == "guidance" || c == "outlook" ||
         c == "will be";
}

Qualifier classify_qualifier(const std::vector<std::string>& cues) {
  Qualifier q;
  bool non_gaap = false;
  bool gaap = false;
  for (const auto& cue : cues) {
    std::string c = text::to_lower(text::trim(cue));
    if (is_forward_looking_cue(c)) q.status = Status::kGuidance;
    if (c == "non-gaap" || c == "adjusted") non_gaap = true;
    if (c == "gaap") gaap = true;
  }
  if (non_gaap) {
    q.basis = Basis::kNonGAAP;
  } else if (gaap) {
    q.basis = Basis::kGAAP;
  }
  return q;
}

std::string_view to_string(RejectionReason r) {
  switch (r) {
    case RejectionReason::kUnresolvedPeriod: return "UnresolvedPeriod";
    case RejectionReason::kUnitClassConflict: return "UnitClassConflict";
    case RejectionReason::kUnknownUnitToken: return "UnknownUnitToken";
    case RejectionReason::kInvalidRange: return "InvalidRange";
    case RejectionReason::kUnknownMetric: return "UnknownMetric";
  }
  return "?";
}

RuleResult apply_rules(const RawKpiRecord& raw, const RuleSet& rules,
                       const DocumentMeta& meta, const MetricTaxonomy& taxonomy) {
  const MetricEntry* entry = taxonomy.find(raw.metric);
  if (!entry) return Rejection{RejectionReason::kUnknownMetric, raw.metric};

  KpiRecord rec;
  rec.metric = raw.metric;
  rec.company = meta.company;
  rec.published_on = meta.published_on;
  rec.provenance = raw.provenance;
  rec.qualifier_cues = raw.qualifier_cues;
  rec.rules_applied = rules.enabled_names();
  rec.confidence = Decimal::from_double(raw.backend_confidence);

  Decimal low = raw.value_low;
  Decimal high = raw.value_high;
  if (rules.unit_resolution) {
    try {
      ResolvedUnit lo = resolve_unit(low, raw.unit_token, entry->value_class);
      ResolvedUnit hi = resolve_unit(high, raw.unit_token, entry->value_class);
      low = lo.value;
      high = hi.value;
      rec.unit = lo.unit;
      rec.scale_applied = lo.scale_applied;
    } catch (const Error& e) {
      auto reason = e.code() == ErrorCode::kUnitClassConflict
                        ? RejectionReason::kUnitClassConflict
                        : RejectionReason::kUnknownUnitToken;
      return Rejection{reason, e.what()};
    }
  } else {
    rec.unit = default_unit(entry->value_class);
    rec.scale_applied = Decimal(1);
  }

  if (rules.range_midpoint) {
    try {
      NormalizedRange r = normalize_range(low, high);
      rec.value = r.value;
      rec.value_low = r.low;
      rec.value_high = r.high;
    } catch (const Error& e) {
      return Rejection{RejectionReason::kInvalidRange, e.what()};
    }
  } else {
    rec.value = rec.value_low = rec.value_high = low;
  }

  if (rules.period_resolution) {
    rec.period = resolve_period(raw.period_phrase, meta.published_on,
                                meta.fiscal_year_end_month, raw.anchor_period_phrase);
    if (rec.period.resolved_from == PeriodSource::kExplicit && raw.period_from_header) {
      rec.period.resolved_from = PeriodSource::kHeaderFallback;
    }
  } else {
    std::string_view face = is_relative_prior_phrase(raw.period_phrase)
                                ? std::string_view(raw.anchor_period_phrase)
                                : std::string_view(raw.period_phrase);
    if (auto p = parse_explicit_period(face)) {
      rec.period = {p->granularity, p->year, PeriodSource::kExplicit};
    }
  }
  if (!rec.period.resolved()) {
    return Rejection{RejectionReason::kUnresolvedPeriod,
                     "no fiscal period for '" + raw.period_phrase + "'"};
  }

  rec.qualifier = rules.qualifier_classification ? classify_qualifier(raw.qualifier_cues)
                                                 : Qualifier{};
  return rec;
}

}  // namespace finkpi
