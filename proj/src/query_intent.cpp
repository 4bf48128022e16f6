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
#include <regex>
#include <set>

#include "finkpi/error.hpp"
#include "finkpi/period_phrase.hpp"
#include "finkpi/query.hpp"
#include "text_util.hpp"

namespace finkpi {

std::string_view to_string(Aggregation a) {
  switch (a) {
    case Aggregation::kNone: return "None";
    case Aggregation::kAvg: return "Avg";
    case Aggregation::kSum: return "Sum";
    case Aggregation::kMin: return "Min";
    case Aggregation::kMax: return "Max";
    case Aggregation::kCount: return "Count";
    case Aggregation::kLatest: return "Latest";
  }
  return "?";
}

std::string_view to_string(StatusFilter s) {
  switch (s) {
    case StatusFilter::kActualOnly: return "ActualOnly";
    case StatusFilter::kGuidanceOnly: return "GuidanceOnly";
    case StatusFilter::kBoth: return "Both";
  }
  return "?";
}

std::string_view to_string(Comparison c) { return c == Comparison::kYoY ? "YoY" : "QoQ"; }

std::string PeriodFilter::label() const {
  std::string out = granularity ? std::string(to_string(*granularity)) : "";
  if (year_from && year_to) {
    if (!out.empty()) out += " ";
    out += single_year() ? std::to_string(*year_from)
                         : std::to_string(*year_from) + "-" + std::to_string(*year_to);
  }
  return out;
}

Json to_json(const QueryIntent& intent) {
  Json j;
  j["metrics"] = intent.metrics;
  if (intent.period_filter) {
    const auto& p = *intent.period_filter;
    Json pf = Json::object();
    pf["granularity"] = p.granularity ? Json(to_string(*p.granularity)) : Json(nullptr);
    pf["year_from"] = p.year_from ? Json(*p.year_from) : Json(nullptr);
    pf["year_to"] = p.year_to ? Json(*p.year_to) : Json(nullptr);
    j["period_filter"] = pf;
  } else {
    j["period_filter"] = nullptr;
  }
  j["aggregation"] = to_string(intent.aggregation);
  j["basis_filter"] = intent.basis_filter ? Json(to_string(*intent.basis_filter)) : Json(nullptr);
  j["status_filter"] = to_string(intent.status_filter);
  j["company_filter"] = intent.company_filter ? Json(*intent.company_filter) : Json(nullptr);
  j["comparison"] = intent.comparison ? Json(to_string(*intent.comparison)) : Json(nullptr);
  return j;
}

void check_intent(const QueryIntent& intent) {
  auto bad = [](const std::string& why) { throw Error(ErrorCode::kInvalidArgument, why); };
  if (intent.metrics.empty()) bad("intent names no metric");
  for (const auto& m : intent.metrics) {
    if (m.empty()) bad("empty metric name");
  }
  if (intent.period_filter) {
    const auto& p = *intent.period_filter;
    if (p.year_from.has_value() != p.year_to.has_value()) bad("half-open year range");
    if (p.year_from && *p.year_from > *p.year_to) bad("inverted year range");
    if (!p.granularity && !p.year_from) bad("empty period filter");
  }
  if (intent.basis_filter && *intent.basis_filter == Basis::kUnstated) {
    bad("basis filter must be GAAP or NonGAAP");
  }
  if (intent.comparison) {
    if (!intent.period_filter || !intent.period_filter->granularity) {
      bad("comparison needs a period granularity");
    }
    if (*intent.comparison == Comparison::kQoQ && !is_quarter(*intent.period_filter->granularity)) {
      bad("QoQ comparison needs a quarter");
    }
    if (intent.aggregation != Aggregation::kNone) bad("comparison cannot be aggregated");
  }
}

namespace {

struct Span {
  size_t start;
  size_t end;
};

bool inside(const std::vector<Span>& spans, size_t pos) {
  return std::any_of(spans.begin(), spans.end(),
                     [&](const Span& s) { return pos >= s.start && pos < s.end; });
}

// First whole-word occurrence of any phrase outside `blocked`.
std::optional<Span> find_any(std::string_view q, std::initializer_list<std::string_view> phrases,
                             const std::vector<Span>& blocked) {
  std::optional<Span> best;
  for (auto p : phrases) {
    for (size_t pos : text::find_words_ci(q, p)) {
      if (inside(blocked, pos)) continue;
      if (!best || pos < best->start) best = Span{pos, pos + p.size()};
    }
  }
  return best;
}

std::optional<Granularity> bare_granularity(std::string_view q, const std::vector<Span>& blocked) {
  static const std::pair<std::string_view, Granularity> kWords[] = {
      {"q1", Granularity::kQ1},
      {"q2", Granularity::kQ2},
      {"q3", Granularity::kQ3},
      {"q4", Granularity::kQ4},
      {"first quarter", Granularity::kQ1},
      {"second quarter", Granularity::kQ2},
      {"third quarter", Granularity::kQ3},
      {"fourth quarter", Granularity::kQ4},
      {"h1", Granularity::kH1},
      {"h2", Granularity::kH2},
      {"first half", Granularity::kH1},
      {"second half", Granularity::kH2},
      {"fy", Granularity::kFY},
      {"fiscal year", Granularity::kFY},
      {"full year", Granularity::kFY},
      {"full-year", Granularity::kFY},
  };
  std::optional<std::pair<size_t, Granularity>> best;
  for (const auto& [word, g] : kWords) {
    for (size_t pos : text::find_words_ci(q, word)) {
      if (inside(blocked, pos)) continue;
      if (!best || pos < best->first) best = std::make_pair(pos, g);
    }
  }
  if (best) return best->second;
  return std::nullopt;
}

bool valid_year(int y) { return y >= kMinFiscalYear && y <= kMaxFiscalYear; }

std::string unmatched_phrase(std::string_view q, const std::vector<Span>& consumed) {
  static const std::set<std::string> kStop = {
      "what", "was",  "is",   "were", "are",  "the",  "a",     "an",   "of",     "for",
      "in",   "on",   "at",   "to",   "did",  "does", "do",    "how",  "much",   "many",
      "our",  "their", "its", "me",   "show", "tell", "give",  "please", "by",   "with",
      "and",  "or",   "from", "which", "when", "company", "s", "it",  "has",    "have",
      "be",   "will", "there", "that", "this", "about", "current", "latest", "average",
      "total", "number", "between", "through"};
  std::string out;
  size_t i = 0;
  while (i < q.size()) {
    if (!text::is_alnum(q[i])) {
      ++i;
      continue;
    }
    size_t j = i;
    while (j < q.size() && (text::is_alnum(q[j]) || q[j] == '-')) ++j;
    std::string word(q.substr(i, j - i));
    if (!inside(consumed, i) && !kStop.count(text::to_lower(word))) {
      if (!out.empty()) out += ' ';
      out += word;
    }
    i = j;
  }
  return out;
}

}  // namespace

QueryIntent parse_intent(std::string_view question, const MetricTaxonomy& taxonomy) {
  std::string_view q = text::trim(question);
  if (q.empty()) throw Error(ErrorCode::kInvalidArgument, "empty question");

  QueryIntent intent;
  std::vector<Span> metric_spans;
  for (const auto& hit : taxonomy.find_aliases(q)) {
    metric_spans.push_back({hit.start, hit.end});
    if (std::find(intent.metrics.begin(), intent.metrics.end(), hit.canonical_name) ==
        intent.metrics.end()) {
      intent.metrics.push_back(hit.canonical_name);
    }
  }

  // Period: year range, then explicit phrase, then a bare granularity.
  std::vector<Span> period_spans;
  std::string qs(q);
  static const std::regex kRange(
      R"((?:between|from)\s+(?:fy\s*)?(\d{4})\s+(?:and|to|through)\s+(?:fy\s*)?(\d{4})|\b(\d{4})\s*(?:-|to|through)\s*(\d{4})\b)",
      std::regex::icase);
  std::smatch m;
  PeriodFilter pf;
  if (std::regex_search(qs, m, kRange)) {
    int a = std::stoi(m[1].matched ? m[1].str() : m[3].str());
    int b = std::stoi(m[2].matched ? m[2].str() : m[4].str());
    if (valid_year(a) && valid_year(b)) {
      pf.year_from = std::min(a, b);
      pf.year_to = std::max(a, b);
      size_t start = static_cast<size_t>(m.position(0));
      period_spans.push_back({start, start + static_cast<size_t>(m.length(0))});
    }
  }
  if (!pf.year_from) {
    for (const auto& mention : find_period_mentions(q)) {
      if (mention.relative) continue;
      if (auto p = parse_explicit_period(mention.text)) {
        pf.granularity = p->granularity;
        pf.year_from = pf.year_to = p->year;
        period_spans.push_back({mention.range.start, mention.range.end});
        break;
      }
    }
  }
  if (!pf.granularity) {
    std::vector<Span> blocked = metric_spans;
    blocked.insert(blocked.end(), period_spans.begin(), period_spans.end());
    pf.granularity = bare_granularity(q, blocked);
  }
  if (pf.granularity || pf.year_from) intent.period_filter = pf;

  std::vector<Span> consumed = metric_spans;
  consumed.insert(consumed.end(), period_spans.begin(), period_spans.end());
  auto note = [&](const std::optional<Span>& s) {
    if (s) consumed.push_back(*s);
    return s.has_value();
  };

  bool guidance = note(find_any(
      q, {"guidance", "outlook", "forecast", "forecasts", "guide", "guided", "expected",
          "projected", "projection"},
      metric_spans));
  bool actual = note(find_any(q, {"actual", "actuals", "reported"}, metric_spans));
  if (guidance) {
    intent.status_filter = actual ? StatusFilter::kBoth : StatusFilter::kGuidanceOnly;
  }

  if (note(find_any(q, {"how many", "number of", "count"}, metric_spans))) {
    intent.aggregation = Aggregation::kCount;
  } else if (note(find_any(q, {"average", "mean", "avg"}, metric_spans))) {
    intent.aggregation = Aggregation::kAvg;
  } else if (note(find_any(q, {"total", "sum", "combined"}, metric_spans))) {
    intent.aggregation = Aggregation::kSum;
  } else if (note(find_any(q, {"lowest", "minimum", "min", "smallest"}, metric_spans))) {
    intent.aggregation = Aggregation::kMin;
  } else if (note(find_any(q, {"highest", "maximum", "max", "peak", "largest"}, metric_spans))) {
    intent.aggregation = Aggregation::kMax;
  } else if (note(find_any(q, {"latest", "most recent", "last reported"}, metric_spans))) {
    intent.aggregation = Aggregation::kLatest;
  }

  if (note(find_any(q, {"non-gaap", "non gaap", "adjusted"}, metric_spans))) {
    intent.basis_filter = Basis::kNonGAAP;
  } else if (note(find_any(q, {"gaap"}, metric_spans))) {
    intent.basis_filter = Basis::kGAAP;
  }

  std::optional<Span> cmp_span;
  if ((cmp_span = find_any(q, {"yoy", "year-over-year", "year over year"}, metric_spans))) {
    intent.comparison = Comparison::kYoY;
  } else if ((cmp_span = find_any(q, {"qoq", "quarter-over-quarter", "quarter over quarter",
                                      "sequential", "sequentially"},
                                  metric_spans))) {
    intent.comparison = Comparison::kQoQ;
  }
  note(cmp_span);

  // Company: an upper-case ticker-like word that is not a known acronym.
  static const std::set<std::string> kAcronyms = {"GAAP", "FY", "YOY", "QOQ", "EPS", "FCF",
                                                  "USD", "Q1", "Q2", "Q3", "Q4", "H1", "H2",
                                                  "SQL", "KPI", "CEO", "CFO", "NON"};
  for (size_t i = 0; i < q.size();) {
    if (!text::is_alpha(q[i]) || !text::word_boundary_before(q, i)) {
      ++i;
      continue;
    }
    size_t j = i;
    while (j < q.size() && text::is_alnum(q[j])) ++j;
    std::string word(q.substr(i, j - i));
    bool upper = word.size() >= 2 && word.size() <= 5 &&
                 std::all_of(word.begin(), word.end(), [](char c) { return c >= 'A' && c <= 'Z'; });
    if (upper && !kAcronyms.count(word) && !inside(consumed, i)) {
      intent.company_filter = word;
      consumed.push_back({i, j});
      break;
    }
    i = j;
  }

  if (intent.metrics.empty()) {
    std::string phrase = unmatched_phrase(q, consumed);
    throw ClarificationNeeded("no known metric in question" +
                                  (phrase.empty() ? std::string() : ": \"" + phrase + "\""),
                              phrase);
  }
  // "revenue growth YoY" names a growth metric; the YoY is part of it.
  bool growth_only = !intent.metrics.empty() &&
                     std::all_of(intent.metrics.begin(), intent.metrics.end(), [&](const auto& m) {
                       return std::any_of(taxonomy.entries().begin(), taxonomy.entries().end(),
                                          [&](const MetricEntry& e) { return e.growth_metric == m; });
                     });
  if (growth_only) intent.comparison.reset();
  if (intent.comparison) {
    std::string word(q.substr(cmp_span->start, cmp_span->end - cmp_span->start));
    if (!intent.period_filter || !intent.period_filter->granularity) {
      throw ClarificationNeeded("a " + word + " comparison needs a period such as Q4 2024", word);
    }
    if (*intent.comparison == Comparison::kQoQ && !is_quarter(*intent.period_filter->granularity)) {
      throw ClarificationNeeded("a " + word + " comparison needs a quarter", word);
    }
    intent.aggregation = Aggregation::kNone;
  }
  return intent;
}

}  // namespace finkpi
