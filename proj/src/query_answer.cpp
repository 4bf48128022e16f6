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
#include <cmath>

#include "finkpi/error.hpp"
#include "finkpi/query.hpp"
#include "finkpi/rules.hpp"

namespace finkpi {

std::string_view to_string(AttemptOutcome o) {
  switch (o) {
    case AttemptOutcome::kAccepted: return "Accepted";
    case AttemptOutcome::kUnparseable: return "Unparseable";
    case AttemptOutcome::kConstraintFailure: return "ConstraintFailure";
    case AttemptOutcome::kExecutionError: return "ExecutionError";
    case AttemptOutcome::kImplausible: return "Implausible";
  }
  return "?";
}

std::optional<Decimal> headline_value(const ResultTable& result) {
  if (result.rows.empty() || result.rows[0].empty()) return std::nullopt;
  return cell_decimal(result.rows[0][0]);
}

namespace {

std::string with_commas(const std::string& plain) {
  size_t start = plain[0] == '-' ? 1 : 0;
  size_t dot = plain.find('.');
  size_t int_end = dot == std::string::npos ? plain.size() : dot;
  std::string out = plain.substr(0, start);
  for (size_t i = start; i < int_end; ++i) {
    if (i > start && (int_end - i) % 3 == 0) out += ',';
    out += plain[i];
  }
  return out + plain.substr(int_end);
}

int scale_exponent(const Decimal& scale) {
  for (int e : {9, 6, 3}) {
    if (scale == Decimal::pow10(e)) return e;
  }
  return 0;
}

Decimal magnitude_scale(const Decimal& value) {
  for (int e : {9, 6, 3}) {
    if (value.abs() >= Decimal::pow10(e)) return Decimal::pow10(e);
  }
  return Decimal(1);
}

// Display rounding for averages, which come back from floating point.
Decimal round_for_display(const Decimal& v, int digits) {
  if (v.scale() <= digits) return v;
  double f = std::pow(10.0, digits);
  return Decimal::from_double(std::round(v.to_double() * f) / f);
}

std::string metric_phrase(const std::string& metric, const MetricTaxonomy& taxonomy) {
  std::string name = taxonomy.contains(metric) ? taxonomy.display_name(metric) : metric;
  if (name.size() > 1 && name[0] >= 'A' && name[0] <= 'Z' && !(name[1] >= 'A' && name[1] <= 'Z')) {
    name[0] = static_cast<char>(name[0] - 'A' + 'a');
  }
  return name;
}

Unit metric_unit(const std::string& metric, const MetricTaxonomy& taxonomy) {
  const MetricEntry* e = taxonomy.find(metric);
  return e ? default_unit(e->value_class) : Unit::kUSD;
}

std::string status_word(StatusFilter s) {
  switch (s) {
    case StatusFilter::kActualOnly: return "actual";
    case StatusFilter::kGuidanceOnly: return "guidance";
    case StatusFilter::kBoth: return "actual or guidance";
  }
  return "";
}

std::string lower(std::string_view s) {
  std::string out(s);
  for (char& c : out) {
    if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
  }
  return out;
}

class Row {
 public:
  Row(const ResultTable& t, size_t i) : t_(t), i_(i) {}
  std::optional<std::string> text(std::string_view col) const {
    auto idx = t_.column_index(col);
    if (!idx) return std::nullopt;
    if (auto* s = std::get_if<std::string>(&t_.rows[i_][*idx])) return *s;
    return std::nullopt;
  }
  std::optional<Decimal> number(std::string_view col) const {
    auto idx = t_.column_index(col);
    if (!idx) return std::nullopt;
    return cell_decimal(t_.rows[i_][*idx]);
  }
  std::optional<Decimal> first() const { return cell_decimal(t_.rows[i_][0]); }

 private:
  const ResultTable& t_;
  size_t i_;
};

std::string period_of(const Row& row, std::string_view gran_col, std::string_view year_col,
                      const std::optional<PeriodFilter>& fallback) {
  auto g = row.text(gran_col);
  auto y = row.number(year_col);
  if (g && y) return *g + " " + y->to_string();
  return fallback ? fallback->label() : "";
}

struct Subject {
  std::string metric;
  Unit unit;
  Decimal scale;
  std::string text;  // "[company ][basis ]metric phrase"
};

Subject subject_of(const Row& row, const QueryIntent& in, const MetricTaxonomy& taxonomy,
                   const Decimal& value) {
  Subject s;
  s.metric = row.text("metric").value_or(in.metrics[0]);
  s.unit = metric_unit(s.metric, taxonomy);
  if (auto u = row.text("unit")) s.unit = parse_unit(*u).value_or(s.unit);
  s.scale = row.number("scale_applied").value_or(magnitude_scale(value));
  if (in.company_filter) s.text += *in.company_filter + " ";
  if (in.basis_filter == Basis::kGAAP) s.text += "GAAP ";
  if (in.basis_filter == Basis::kNonGAAP) s.text += "non-GAAP ";
  s.text += metric_phrase(s.metric, taxonomy);
  return s;
}

std::string join_prefix(const std::string& period, const std::string& rest) {
  return period.empty() ? rest : period + " " + rest;
}

bool implausible(const SqlCandidate& c, const ResultTable& result,
                 const MetricTaxonomy& taxonomy) {
  if (!headline_value(result)) return true;
  if (c.intent.aggregation == Aggregation::kCount) return false;
  for (const auto& m : c.intent.metrics) {
    if (metric_unit(m, taxonomy) != Unit::kPercent) return false;
  }
  for (const auto& row : result.rows) {
    auto v = cell_decimal(row[0]);
    if (v && (*v < Decimal(-100) || *v > Decimal(1000))) return true;
  }
  return false;
}

}  // namespace

std::string format_usd(const Decimal& value, const Decimal& scale) {
  int e = scale_exponent(scale);
  std::string sign = value.is_negative() ? "-" : "";
  Decimal v = value.abs();
  if (e == 0) return sign + "$" + with_commas(v.to_string());
  static const char* kWords[] = {"", "", "", "thousand", "", "", "million", "", "", "billion"};
  return sign + "$" + with_commas(v.shifted(-e).to_string()) + " " + kWords[e];
}

std::string format_value(const Decimal& value, Unit unit, const Decimal& scale) {
  switch (unit) {
    case Unit::kPercent: return value.to_string(1) + "%";
    case Unit::kUSD: return format_usd(value, scale);
    case Unit::kCount: return with_commas(value.to_string());
  }
  return value.to_string();
}

std::string explain(const SqlCandidate& candidate, const ResultTable& result,
                    const MetricTaxonomy& taxonomy) {
  const QueryIntent& in = candidate.intent;
  std::string status = status_word(in.status_filter);
  if (!headline_value(result)) {
    std::string subject;
    for (size_t i = 0; i < in.metrics.size(); ++i) {
      subject += (i ? " or " : "") + metric_phrase(in.metrics[i], taxonomy);
    }
    if (in.basis_filter == Basis::kGAAP) subject = "GAAP " + subject;
    if (in.basis_filter == Basis::kNonGAAP) subject = "non-GAAP " + subject;
    if (in.company_filter) subject = *in.company_filter + " " + subject;
    std::string period = in.period_filter ? in.period_filter->label() : "any period";
    return "No records match " + subject + " for " + period + " (" + status + ").";
  }

  std::string out;
  auto sentence = [&](const std::string& s) { out += (out.empty() ? "" : " ") + s; };

  if (in.comparison) {
    Row row(result, 0);
    Decimal change = *row.first();
    Decimal value = row.number("value").value_or(change);
    Subject s = subject_of(row, in, taxonomy, value);
    std::string period = period_of(row, "period_granularity", "period_year", in.period_filter);
    std::string prior = period_of(row, "prior_granularity", "prior_year", std::nullopt);
    std::string text = join_prefix(period, s.text) + " (" + lower(row.text("status").value_or(status)) +
                       ") was " + format_value(value, s.unit, s.scale);
    std::string delta = s.unit == Unit::kPercent
                            ? change.abs().to_string(1) + " points"
                            : format_value(change.abs(), s.unit, magnitude_scale(change));
    std::string direction = change.is_zero() ? "unchanged" : change.is_negative() ? "down " + delta
                                                                                 : "up " + delta;
    text += ", " + direction + " from " + (prior.empty() ? "the prior period" : prior);
    if (auto pv = row.number("prior_value")) text += " (" + format_value(*pv, s.unit, s.scale) + ")";
    sentence(text + ".");
    return out;
  }

  std::string period = in.period_filter ? in.period_filter->label() : "";
  switch (in.aggregation) {
    case Aggregation::kCount:
      for (size_t i = 0; i < result.row_count(); ++i) {
        Row row(result, i);
        Subject s = subject_of(row, in, taxonomy, Decimal(0));
        std::string n = row.first()->to_string();
        sentence("Found " + n + " " + join_prefix(period, s.text) + " " +
                 (n == "1" ? "record" : "records") + " (" + status + ").");
      }
      return out;
    case Aggregation::kAvg:
    case Aggregation::kSum:
    case Aggregation::kMin:
    case Aggregation::kMax: {
      static const char* kWord[] = {"", "Average", "Total", "Minimum", "Maximum"};
      std::string word = kWord[static_cast<int>(in.aggregation)];
      for (size_t i = 0; i < result.row_count(); ++i) {
        Row row(result, i);
        auto v = row.first();
        if (!v) continue;
        Decimal shown = in.aggregation == Aggregation::kAvg ? round_for_display(*v, 2) : *v;
        Subject s = subject_of(row, in, taxonomy, shown);
        std::string text = word + " " + join_prefix(period, s.text) + " (" + status + ")";
        if (auto n = row.number("records")) {
          text += " across " + n->to_string() + (n == Decimal(1) ? " record" : " records");
        }
        sentence(text + " was " + format_value(shown, s.unit, magnitude_scale(shown)) + ".");
      }
      return out;
    }
    case Aggregation::kNone:
    case Aggregation::kLatest: break;
  }

  Row row(result, 0);
  Decimal value = *row.first();
  Subject s = subject_of(row, in, taxonomy, value);
  std::string row_status = lower(row.text("status").value_or(status));
  std::string text = join_prefix(period_of(row, "period_granularity", "period_year", in.period_filter),
                                 s.text) +
                     " (" + row_status + ") " + (row_status == "guidance" ? "is " : "was ") +
                     format_value(value, s.unit, s.scale);
  auto low = row.number("value_low");
  auto high = row.number("value_high");
  if (low && high && *low != *high) {
    text += " (range " + format_value(*low, s.unit, s.scale) + " to " +
            format_value(*high, s.unit, s.scale) + ")";
  }
  sentence(text + ".");
  if (result.row_count() > 1) {
    size_t more = result.row_count() - 1;
    sentence(std::to_string(more) + " more matching " + (more == 1 ? "record is" : "records are") +
             " listed.");
  }
  return out;
}

AnswerBundle execute_with_feedback(const std::vector<SqlCandidate>& candidates,
                                   const KpiStore& store, int max_retries,
                                   const Regenerate& regenerate) {
  if (candidates.empty()) throw Error(ErrorCode::kInvalidArgument, "no SQL candidates");
  const MetricTaxonomy& taxonomy = store.taxonomy();
  SchemaCard card = store.export_schema_card();
  AnswerBundle bundle;
  int budget = std::max(0, max_retries) + 1;

  std::optional<SqlCandidate> tmpl;
  std::vector<SqlCandidate> queue;
  for (const auto& c : candidates) {
    if (c.source == GenerationSource::kTemplate && !tmpl) {
      tmpl = c;
    } else {
      queue.push_back(c);
    }
  }
  struct Tried {
    SqlCandidate candidate;
    ValidationReport report;
    ResultTable result;
  };
  std::optional<Tried> template_run;
  std::optional<Tried> last_run;

  auto attempt = [&](const SqlCandidate& c) -> bool {
    ++bundle.attempts;
    Tried t{c, validate_constraints(c, card), {}};
    AttemptRecord rec{c.sql, c.source, AttemptOutcome::kAccepted, "", t.report.syntax_ok,
                      t.report.passed()};
    bool ok = false;
    if (!t.report.passed()) {
      rec.outcome = t.report.syntax_ok ? AttemptOutcome::kConstraintFailure
                                       : AttemptOutcome::kUnparseable;
      rec.detail = t.report.violations.empty() ? "" : t.report.violations[0].detail;
    } else {
      try {
        t.result = store.execute_sql(c.sql);
        if (implausible(c, t.result, taxonomy)) {
          rec.outcome = AttemptOutcome::kImplausible;
          rec.detail = t.result.row_count() == 0 ? "empty result" : "value outside plausible band";
        } else {
          ok = true;
        }
      } catch (const Error& e) {
        rec.outcome = AttemptOutcome::kExecutionError;
        rec.detail = e.what();
      }
    }
    bundle.log.push_back(rec);
    if (c.source == GenerationSource::kTemplate) template_run = t;
    last_run = t;
    if (ok) {
      bundle.chosen = t.candidate;
      bundle.validation = t.report;
      bundle.result = t.result;
      bundle.explanation = explain(t.candidate, t.result, taxonomy);
    }
    return ok;
  };

  int reserved = tmpl ? 1 : 0;
  bool regenerated = false;
  size_t next = 0;
  while (bundle.attempts < budget - reserved) {
    if (next == queue.size()) {
      if (!regenerate || regenerated) break;
      regenerated = true;
      std::string feedback;
      for (const auto& r : bundle.log) {
        feedback += "- " + r.sql + " -> " + std::string(to_string(r.outcome)) +
                    (r.detail.empty() ? "" : ": " + r.detail) + "\n";
      }
      auto fresh = regenerate(feedback);
      for (auto& c : fresh) {
        if (c.source != GenerationSource::kTemplate) queue.push_back(std::move(c));
      }
      if (next == queue.size()) break;
      continue;
    }
    if (attempt(queue[next++])) return bundle;
  }
  if (tmpl && attempt(*tmpl)) return bundle;

  const Tried& fallback = template_run ? *template_run : *last_run;
  bundle.chosen = fallback.candidate;
  bundle.validation = fallback.report;
  bundle.result = fallback.result;
  bundle.explanation = explain(fallback.candidate, ResultTable{}, taxonomy);
  return bundle;
}

Json to_json(const AnswerBundle& bundle) {
  Json table = to_json(bundle.result);
  Json log = Json::array();
  for (const auto& a : bundle.log) {
    log.push_back({{"sql", a.sql},
                   {"source", to_string(a.source)},
                   {"outcome", to_string(a.outcome)},
                   {"detail", a.detail}});
  }
  return {{"question", bundle.question},
          {"sql", bundle.chosen.sql},
          {"source", to_string(bundle.chosen.source)},
          {"intent", to_json(bundle.chosen.intent)},
          {"explanation", bundle.explanation},
          {"columns", table["columns"]},
          {"rows", table["rows"]},
          {"row_count", table["row_count"]},
          {"validation", to_json(bundle.validation)},
          {"attempts", bundle.attempts},
          {"attempt_log", log},
          {"audit_id", bundle.audit_id}};
}

AnswerBundle answer(std::string_view question, const KpiStore& store, const QueryConfig& config) {
  AuditLog* audit = store.audit();
  QueryIntent intent;
  try {
    intent = parse_intent(question, store.taxonomy());
  } catch (const ClarificationNeeded& e) {
    if (audit) {
      audit->append("clarification",
                    {{"question", question}, {"unmatched", e.unmatched()}, {"message", e.what()}});
    }
    throw;
  }
  SchemaCard card = store.export_schema_card();
  GenerationLog glog;
  auto candidates = generate_sql(intent, card, config.backend, question, &glog);
  Regenerate regen;
  if (config.backend) {
    regen = [&](std::string_view feedback) {
      return regenerate_sql(intent, card, *config.backend, question, feedback, &glog);
    };
  }
  AnswerBundle bundle = execute_with_feedback(candidates, store, config.max_retries, regen);
  bundle.question = std::string(question);
  std::vector<AttemptRecord> dropped;
  for (const auto& sql : glog.unparseable) {
    dropped.push_back({sql, GenerationSource::kBackend, AttemptOutcome::kUnparseable,
                       "rejected by the SQL parser", false, false});
  }
  bundle.log.insert(bundle.log.begin(), dropped.begin(), dropped.end());
  if (audit) {
    Json transcript = to_json(bundle);
    transcript.erase("audit_id");
    transcript["backend_failed"] = glog.backend_failed;
    bundle.audit_id = audit->append("query", transcript);
  }
  return bundle;
}

}  // namespace finkpi
