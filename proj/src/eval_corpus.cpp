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
#include <cstdio>
#include <random>

#include "finkpi/error.hpp"
#include "finkpi/eval.hpp"
#include "finkpi/ingest.hpp"
#include "finkpi/taxonomy.hpp"

namespace finkpi::eval {

namespace {

const char* const kCompanies[] = {"ACME", "GLOBX", "INITE", "UMBRA", "VANDL",
                                  "HOOLI", "STARK", "WAYNE", "TYREL", "CYBDN"};

struct Period {
  Granularity granularity;
  int year;
  std::string label() const { return FiscalPeriod{granularity, year, PeriodSource::kExplicit}.label(); }
};

// Draws from a seeded engine. Only uniform integer draws are used so the
// sequence is identical across standard libraries.
class Draw {
 public:
  explicit Draw(std::uint64_t seed) : rng_(seed) {}
  int below(int n) { return static_cast<int>(rng_() % static_cast<std::uint64_t>(n)); }
  bool chance(int percent) { return below(100) < percent; }
  template <typename T, size_t N>
  const T& one_of(const T (&items)[N]) { return items[below(static_cast<int>(N))]; }

 private:
  std::mt19937_64 rng_;
};

std::string fixed(const Decimal& d, int digits) { return d.to_string(digits); }

// A face value with 1..digits significant decimals, in [lo, hi].
Decimal face(Draw& d, int lo, int hi, int decimals) {
  int scale = 1;
  for (int i = 0; i < decimals; ++i) scale *= 10;
  return Decimal(lo * scale + d.below((hi - lo) * scale + 1)).shifted(-decimals);
}

struct Money {
  Decimal face;
  std::string word;  // "billion", "million", "B", "M" or ""
  Decimal scale;
  std::string text() const {
    std::string s = "$" + face.to_string();
    if (word.empty()) return s;
    if (word.size() == 1) return s + word;
    return s + " " + word;
  }
  Decimal value() const { return face * scale; }
};

Money money(Draw& d, bool large) {
  if (large) {
    static const char* kWords[] = {"billion", "billion", "B"};
    return {face(d, 1, 9, 2), d.one_of(kWords), Decimal::pow10(9)};
  }
  static const char* kWords[] = {"million", "million", "M"};
  return {face(d, 100, 900, 1), d.one_of(kWords), Decimal::pow10(6)};
}

class DocBuilder {
 public:
  DocBuilder(const DocumentMeta& meta, Period period) : meta_(meta), period_(period) {}

  void header(const std::string& line) { text_ = line + "\n\n"; }

  // Appends a sentence; "{N}" placeholders mark the value surfaces in order.
  void sentence(const std::string& templ, const std::vector<std::string>& values,
                std::vector<KpiRecord> records) {
    if (!body_started_) {
      body_started_ = true;
    } else {
      text_ += " ";
    }
    size_t vi = 0;
    for (size_t i = 0; i < templ.size(); ++i) {
      if (templ.compare(i, 3, "{N}") == 0) {
        offsets_.push_back(text_.size());
        text_ += values.at(vi++);
        i += 2;
      } else {
        text_ += templ[i];
      }
    }
    for (size_t k = 0; k < records.size(); ++k) {
      records[k].company = meta_.company;
      records[k].published_on = meta_.published_on;
      records[k].provenance.doc_id = meta_.doc_id;
      size_t at = offsets_[offsets_.size() - values.size() + std::min(k, values.size() - 1)];
      pending_.push_back({std::move(records[k]), at});
    }
  }

  const std::string& text() const { return text_; }

  // Gold records with section ids and body offsets filled in.
  std::vector<KpiRecord> gold() const {
    auto sections = ingest::segment_sections(text_);
    std::vector<KpiRecord> out;
    for (const auto& [rec, at] : pending_) {
      KpiRecord r = rec;
      for (const auto& s : sections) {
        if (at >= s.range.start && at < s.range.end) {
          r.provenance.section_id = s.section_id;
          r.provenance.range = {at - s.range.start, at - s.range.start + 1};
        }
      }
      out.push_back(std::move(r));
    }
    return out;
  }

 private:
  DocumentMeta meta_;
  Period period_;
  std::string text_;
  bool body_started_ = false;
  std::vector<size_t> offsets_;
  std::vector<std::pair<KpiRecord, size_t>> pending_;
};

KpiRecord gold_record(const std::string& metric, const Decimal& low, const Decimal& high,
                      Unit unit, const Decimal& scale, Period p, PeriodSource source,
                      Basis basis = Basis::kUnstated, Status status = Status::kActual) {
  KpiRecord r;
  r.metric = metric;
  r.value_low = low;
  r.value_high = high;
  r.value = midpoint(low, high);
  r.unit = unit;
  r.scale_applied = scale;
  r.period = {p.granularity, p.year, source};
  r.qualifier = {basis, status};
  r.rules_applied.assign(RuleSet::kRuleNames.begin(), RuleSet::kRuleNames.end());
  return r;
}

Date publication_date(Draw& d, Period p) {
  int end = period_end_month(p.granularity);
  int month = end % 12 + 1;
  int year = end == 12 ? p.year + 1 : p.year;
  return {year, month, 5 + d.below(20)};
}

Period guidance_period(Period p) {
  return {Granularity::kFY, p.granularity == Granularity::kFY || p.granularity == Granularity::kQ4
                                ? p.year + 1
                                : p.year};
}

std::string pct(const Decimal& v) { return fixed(v, 1) + "%"; }

std::string capitalized(std::string s) {
  if (!s.empty() && s[0] >= 'a' && s[0] <= 'z') s[0] = static_cast<char>(s[0] - 'a' + 'A');
  return s;
}

std::string basis_prefix(Basis b) {
  switch (b) {
    case Basis::kGAAP: return "GAAP ";
    case Basis::kNonGAAP: return "Non-GAAP ";
    case Basis::kUnstated: return "";
  }
  return "";
}

struct Slot {
  std::string metric;
  bool percent;
};

const Slot kSlots[] = {{"revenue", false},          {"operating_income", false},
                       {"free_cash_flow", false},   {"operating_margin", true},
                       {"gross_margin", true},      {"eps", false}};

std::string alias_of(const std::string& metric) {
  if (metric == "revenue") return "revenue";
  if (metric == "operating_income") return "operating income";
  if (metric == "free_cash_flow") return "free cash flow";
  if (metric == "operating_margin") return "operating margin";
  if (metric == "gross_margin") return "gross margin";
  return "diluted EPS";
}

// One sentence about an actual value for the report period, optionally
// with a prior-year comparison or without an explicit period.
void actual_sentence(Draw& d, DocBuilder& b, const Slot& slot, Period p, bool header_only,
                     bool prior) {
  const std::string& m = slot.metric;
  std::string alias = alias_of(m);
  Basis basis = Basis::kUnstated;
  if (m == "operating_margin" || m == "eps" || m == "operating_income") {
    int k = d.below(6);
    if (k == 0) basis = Basis::kGAAP;
    if (k == 1) basis = Basis::kNonGAAP;
  }
  std::string subject =
      basis == Basis::kUnstated ? capitalized(alias) : basis_prefix(basis) + alias;
  PeriodSource src = header_only ? PeriodSource::kHeaderFallback : PeriodSource::kExplicit;
  std::string when = header_only ? "" : (slot.percent ? " in " : " for ") + p.label();
  Period before{p.granularity, p.year - 1};

  if (slot.percent) {
    Decimal v = face(d, 5, 45, 1);
    std::vector<KpiRecord> recs{
        gold_record(m, v, v, Unit::kPercent, Decimal(1), p, src, basis)};
    if (prior) {
      Decimal w = face(d, 5, 45, 1);
      static const char* kLinks[] = {"up from", "compared with", "versus"};
      static const char* kPrior[] = {"last year", "in the prior year", "a year ago"};
      std::string link = d.one_of(kLinks);
      std::string ago = d.one_of(kPrior);
      recs.push_back(gold_record(m, w, w, Unit::kPercent, Decimal(1), before,
                                 PeriodSource::kRelativePrior, basis));
      b.sentence(subject + when + " was {N}, " + link + " {N} " + ago + ".", {pct(v), pct(w)},
                 recs);
    } else {
      b.sentence(subject + when + " was {N}.", {pct(v)}, recs);
    }
    return;
  }
  if (m == "eps") {
    Decimal v = face(d, 0, 6, 2) + Decimal::parse("0.05");
    std::vector<KpiRecord> recs{gold_record(m, v, v, Unit::kUSD, Decimal(1), p, src, basis)};
    if (prior) {
      Decimal w = face(d, 0, 6, 2) + Decimal::parse("0.05");
      recs.push_back(
          gold_record(m, w, w, Unit::kUSD, Decimal(1), before, PeriodSource::kRelativePrior, basis));
      b.sentence(subject + when + " was {N}, compared with {N} last year.",
                 {"$" + fixed(v, 2), "$" + fixed(w, 2)}, recs);
    } else {
      b.sentence(subject + when + " was {N}.", {"$" + fixed(v, 2)}, recs);
    }
    return;
  }
  bool large = m == "revenue" || d.chance(30);
  Money v = money(d, large);
  std::vector<KpiRecord> recs{
      gold_record(m, v.value(), v.value(), Unit::kUSD, v.scale, p, src, basis)};
  if (prior) {
    Money w = v;
    w.face = large ? face(d, 1, 9, 2) : face(d, 100, 900, 1);
    recs.push_back(gold_record(m, w.value(), w.value(), Unit::kUSD, w.scale, before,
                               PeriodSource::kRelativePrior, basis));
    b.sentence(subject + when + " was {N}, compared with {N} in the prior year.",
               {v.text(), w.text()}, recs);
  } else {
    b.sentence(subject + when + " was {N}.", {v.text()}, recs);
  }
}

void growth_sentence(Draw& d, DocBuilder& b, Period p) {
  Decimal g = face(d, 2, 30, 1);
  Money v = money(d, true);
  b.sentence("In " + p.label() + ", revenue grew {N} year over year to {N}.",
             {pct(g), v.text()},
             {gold_record("revenue_yoy_growth", g, g, Unit::kPercent, Decimal(1), p,
                          PeriodSource::kExplicit),
              gold_record("revenue", v.value(), v.value(), Unit::kUSD, v.scale, p,
                          PeriodSource::kExplicit)});
}

void guidance_range_sentence(Draw& d, DocBuilder& b, Period g) {
  if (d.chance(50)) {
    static const char* kMetrics[] = {"operating_margin", "gross_margin"};
    std::string m = d.one_of(kMetrics);
    Decimal lo = face(d, 5, 40, 0);
    Decimal hi = lo + Decimal(1 + d.below(4));
    b.sentence("The company expects " + alias_of(m) + " to be between {N} in " + g.label() + ".",
               {lo.to_string() + "\xE2\x80\x93" + hi.to_string() + "%"},
               {gold_record(m, lo, hi, Unit::kPercent, Decimal(1), g, PeriodSource::kExplicit,
                            Basis::kUnstated, Status::kGuidance)});
    return;
  }
  Money lo = money(d, true);
  Money hi = lo;
  hi.face = lo.face + Decimal(1 + d.below(8)).shifted(-1);
  hi.word = lo.word = "billion";
  b.sentence("For " + g.label() + ", the company expects revenue of {N}.",
             {lo.text() + " to " + hi.text()},
             {gold_record("revenue", lo.value(), hi.value(), Unit::kUSD, lo.scale, g,
                          PeriodSource::kExplicit, Basis::kUnstated, Status::kGuidance)});
}

void guidance_point_sentence(Draw& d, DocBuilder& b, Period g) {
  Money v = money(d, d.chance(50));
  b.sentence("The company expects free cash flow of {N} in " + g.label() + ".", {v.text()},
             {gold_record("free_cash_flow", v.value(), v.value(), Unit::kUSD, v.scale, g,
                          PeriodSource::kExplicit, Basis::kUnstated, Status::kGuidance)});
}

Period report_period(Draw& d) {
  static const Granularity kGran[] = {Granularity::kQ1, Granularity::kQ2, Granularity::kQ3,
                                      Granularity::kQ4, Granularity::kFY};
  return {d.one_of(kGran), 2021 + d.below(5)};
}

std::vector<GoldQuestion> questions_for(Draw& d, const KpiRecord& r, const std::string& company,
                                        const MetricTaxonomy& taxonomy) {
  std::vector<GoldQuestion> out;
  std::string name = taxonomy.display_name(r.metric);
  std::string label = r.period.label();
  QueryIntent base;
  base.metrics = {r.metric};
  base.period_filter = PeriodFilter{r.period.granularity, r.period.year, r.period.year};
  base.company_filter = company;
  if (r.qualifier.status == Status::kGuidance) {
    base.status_filter = StatusFilter::kGuidanceOnly;
    out.push_back({"What is the " + label + " " + name + " guidance for " + company + "?", base});
    return out;
  }
  out.push_back({"What was " + company + " " + name + " in " + label + "?", base});
  if (d.chance(40)) {
    QueryIntent latest = base;
    latest.period_filter.reset();
    latest.aggregation = Aggregation::kLatest;
    out.push_back({"What is the latest " + name + " for " + company + "?", latest});
  }
  if (r.metric != "revenue_yoy_growth" && d.chance(30)) {
    QueryIntent yoy = base;
    yoy.comparison = Comparison::kYoY;
    out.push_back({"How did " + company + " " + name + " change year over year in " + label + "?",
                   yoy});
  }
  return out;
}

}  // namespace

std::vector<KpiRecord> SyntheticCorpus::gold_records() const {
  std::vector<KpiRecord> out;
  for (const auto& g : gold) out.insert(out.end(), g.records.begin(), g.records.end());
  return out;
}

SyntheticCorpus generate_synthetic_corpus(std::uint64_t seed, int n_docs) {
  if (n_docs < 1) throw Error(ErrorCode::kInvalidArgument, "n_docs must be at least 1");
  const MetricTaxonomy& taxonomy = MetricTaxonomy::default_taxonomy();
  SyntheticCorpus corpus;
  corpus.seed = seed;
  Draw d(seed);
  for (int i = 0; i < n_docs; ++i) {
    Period p = report_period(d);
    DocumentMeta meta;
    char id[32];
    std::snprintf(id, sizeof id, "syn-%04d", i);
    meta.doc_id = id;
    meta.company = d.one_of(kCompanies);
    meta.published_on = publication_date(d, p);
    meta.source_kind = SourceKind::kEarningsRelease;

    DocBuilder b(meta, p);
    b.header(meta.company + " " + p.label() + " Results");
    std::vector<int> slots = {0, 1, 2, 3, 4, 5};
    std::shuffle(slots.begin(), slots.end(), std::mt19937_64(seed * 7919 + i));
    int n_slots = 2 + d.below(3);
    bool growth = d.chance(30);
    int header_only = d.chance(25) ? d.below(n_slots) : -1;
    for (int k = 0; k < n_slots; ++k) {
      const Slot& slot = kSlots[slots[k]];
      if (growth && slot.metric == "revenue") {
        growth_sentence(d, b, p);
        continue;
      }
      bool prior = k != header_only && d.chance(25);
      actual_sentence(d, b, slot, p, k == header_only, prior);
    }
    if (d.chance(30)) {
      static const char* kNoise[] = {
          "Headcount reached {N} employees at quarter end.",
          "The board declared a quarterly dividend of {N} per share.",
          "The company repurchased {N} shares during the period.",
      };
      std::string line = d.one_of(kNoise);
      std::string n = line.find("dividend") != std::string::npos
                          ? "\$0." + std::to_string(10 + d.below(80))
                          : std::to_string(1 + d.below(9)) + "," + std::to_string(100 + d.below(900));
      b.sentence(line, {n}, {});
    }
    bool range = i % 4 == 0;
    if (range) guidance_range_sentence(d, b, guidance_period(p));
    if (!range && d.chance(20)) guidance_point_sentence(d, b, guidance_period(p));

    GoldLabel label{meta.doc_id, b.gold()};
    for (const auto& r : label.records) {
      if (r.period.resolved_from == PeriodSource::kRelativePrior) continue;
      for (auto& q : questions_for(d, r, meta.company, taxonomy)) {
        corpus.questions.push_back(std::move(q));
      }
    }
    corpus.documents.push_back({meta, b.text(), range});
    corpus.gold.push_back(std::move(label));
  }
  return corpus;
}

Json to_json(const SyntheticCorpus& corpus) {
  Json docs = Json::array();
  for (size_t i = 0; i < corpus.documents.size(); ++i) {
    Json gold = Json::array();
    for (const auto& r : corpus.gold[i].records) gold.push_back(to_json(r));
    docs.push_back({{"meta", to_json(corpus.documents[i].meta)},
                    {"text", corpus.documents[i].text},
                    {"has_range", corpus.documents[i].has_range},
                    {"gold", gold}});
  }
  Json qs = Json::array();
  for (const auto& q : corpus.questions) {
    qs.push_back({{"question", q.question}, {"intent", to_json(q.intent)}});
  }
  return {{"seed", corpus.seed}, {"documents", docs}, {"questions", qs}};
}

}  // namespace finkpi::eval
