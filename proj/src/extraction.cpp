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

#include "finkpi/extraction.hpp"

#include <algorithm>
#include <atomic>
#include <thread>

#include "finkpi/error.hpp"
#include "finkpi/ingest.hpp"
#include "finkpi/log.hpp"
#include "finkpi/period_phrase.hpp"
#include "finkpi/serialize.hpp"
#include "text_util.hpp"

namespace finkpi {
namespace {

using text::interval_distance;

const CharRange* sentence_of(const std::vector<CharRange>& sentences, size_t pos) {
  for (const auto& s : sentences) {
    if (pos >= s.start && pos < s.end) return &s;
  }
  return nullptr;
}

// Index of the mention closest to [start, end); ties go to the leftmost.
template <typename Pred>
const PeriodMention* nearest_mention(const std::vector<PeriodMention>& mentions,
                                     size_t start, size_t end, Pred accept) {
  const PeriodMention* best = nullptr;
  size_t best_d = 0;
  for (const auto& m : mentions) {
    if (!accept(m)) continue;
    size_t d = interval_distance(start, end, m.range.start, m.range.end);
    if (!best || d < best_d) {
      best = &m;
      best_d = d;
    }
  }
  return best;
}

std::string field_name_for(std::string_view canonical) {
  std::string out;
  size_t i = 0;
  while (i <= canonical.size()) {
    size_t j = canonical.find('_', i);
    if (j == std::string_view::npos) j = canonical.size();
    std::string part(canonical.substr(i, j - i));
    if (part == "yoy") {
      part = "YoY";
    } else if (part == "eps" || part == "fcf") {
      for (char& c : part) c = text::upper(c);
    } else if (!part.empty()) {
      part[0] = text::upper(part[0]);
    }
    if (!out.empty()) out += '_';
    out += part;
    i = j + 1;
  }
  return out;
}

std::string normalize_key(std::string_view s) {
  std::string out;
  for (char c : text::trim(s)) {
    out += (c == ' ' || c == '-') ? '_' : text::lower(c);
  }
  return out;
}

// Schema field name, canonical name, display name or alias to canonical name.
std::optional<std::string> metric_for_key(std::string_view key,
                                          const MetricTaxonomy& taxonomy) {
  std::string k = normalize_key(key);
  for (const auto& e : taxonomy.entries()) {
    if (k == e.canonical_name || k == normalize_key(e.display_name) ||
        k == normalize_key(field_name_for(e.canonical_name))) {
      return e.canonical_name;
    }
    for (const auto& a : e.aliases) {
      if (k == normalize_key(a)) return e.canonical_name;
    }
  }
  return std::nullopt;
}

// Quotes bare object keys ({value: 4.3} -> {"value": 4.3}) outside strings.
std::string quote_bare_keys(std::string_view s) {
  std::string out;
  out.reserve(s.size() + 16);
  bool in_string = false;
  char prev_sig = 0;  // last non-space character emitted outside strings
  for (size_t i = 0; i < s.size(); ++i) {
    char c = s[i];
    if (in_string) {
      out += c;
      if (c == '\\' && i + 1 < s.size()) {
        out += s[++i];
      } else if (c == '"') {
        in_string = false;
        prev_sig = '"';
      }
      continue;
    }
    if (c == '"') {
      in_string = true;
      out += c;
      continue;
    }
    if ((text::is_alpha(c) || c == '_') && (prev_sig == '{' || prev_sig == ',')) {
      size_t j = i;
      while (j < s.size() && (text::is_alnum(s[j]) || s[j] == '_')) ++j;
      size_t k = j;
      while (k < s.size() && text::is_space(s[k])) ++k;
      if (k < s.size() && s[k] == ':') {
        out += '"';
        out.append(s.substr(i, j - i));
        out += '"';
        prev_sig = '"';
        i = j - 1;
        continue;
      }
    }
    out += c;
    if (!text::is_space(c)) prev_sig = c;
  }
  return out;
}

Json parse_completion_json(std::string_view completion) {
  std::string_view body = text::trim(completion);
  size_t open = body.find_first_of("{[");
  size_t close = body.find_last_of("}]");
  if (open == std::string_view::npos || close == std::string_view::npos ||
      close < open) {
    throw Error(ErrorCode::kMalformedCompletion, "no JSON object in completion");
  }
  body = body.substr(open, close - open + 1);
  Json j = Json::parse(body, nullptr, false);
  if (j.is_discarded()) j = Json::parse(quote_bare_keys(body), nullptr, false);
  if (j.is_discarded()) {
    throw Error(ErrorCode::kMalformedCompletion, "completion is not valid JSON");
  }
  return j;
}

[[noreturn]] void malformed(const std::string& what) {
  throw Error(ErrorCode::kMalformedCompletion, what);
}

Decimal json_decimal(const Json& v, const char* what) {
  if (v.is_string()) {
    if (auto d = Decimal::try_parse(text::trim(v.get<std::string>()))) return *d;
  } else if (v.is_number_integer()) {
    return Decimal(v.get<std::int64_t>());
  } else if (v.is_number()) {
    return Decimal::from_double(v.get<double>());
  }
  malformed(std::string("field '") + what + "' is not a number");
}

struct FaceValue {
  Decimal low;
  Decimal high;
  std::string unit_token;
};

// "12%", "4.3B", "$150 million", "15–17%" or a bare number.
std::optional<FaceValue> parse_face_value(std::string_view text_value) {
  Section probe;
  probe.body = std::string(text::trim(text_value));
  auto spans = ingest::detect_numeric_spans(probe);
  if (spans.size() != 1) return std::nullopt;
  const auto& s = spans.front();
  if (s.range.start != 0 || s.range.end != probe.body.size()) return std::nullopt;
  return FaceValue{s.low, s.high, s.unit_token};
}

FaceValue face_value_from_json(const Json& v, const std::string& key) {
  if (v.is_object()) {
    FaceValue fv;
    if (v.contains("value_low") || v.contains("value_high")) {
      if (!v.contains("value_low") || !v.contains("value_high")) {
        malformed("field '" + key + "' needs both value_low and value_high");
      }
      fv.low = json_decimal(v.at("value_low"), "value_low");
      fv.high = json_decimal(v.at("value_high"), "value_high");
    } else if (v.contains("value")) {
      const Json& inner = v.at("value");
      if (inner.is_string()) {
        auto parsed = parse_face_value(inner.get<std::string>());
        if (!parsed) malformed("field '" + key + "' has an unreadable value");
        fv = *parsed;
      } else {
        fv.low = fv.high = json_decimal(inner, "value");
      }
    } else {
      malformed("field '" + key + "' has no value");
    }
    if (v.contains("unit")) {
      if (!v.at("unit").is_string()) malformed("field '" + key + "' unit must be a string");
      fv.unit_token = v.at("unit").get<std::string>();
    }
    return fv;
  }
  if (v.is_string()) {
    auto parsed = parse_face_value(v.get<std::string>());
    if (!parsed) malformed("field '" + key + "' has an unreadable value");
    return *parsed;
  }
  if (v.is_number()) {
    Decimal d = json_decimal(v, key.c_str());
    return FaceValue{d, d, ""};
  }
  malformed("field '" + key + "' has an unsupported value");
}

std::vector<std::string> string_list(const Json& v, const char* what) {
  if (!v.is_array()) malformed(std::string("field '") + what + "' must be a list");
  std::vector<std::string> out;
  for (const auto& x : v) {
    if (!x.is_string()) malformed(std::string("field '") + what + "' must hold strings");
    out.push_back(x.get<std::string>());
  }
  return out;
}

std::string opt_string(const Json& obj, const char* key) {
  if (!obj.contains(key) || obj.at(key).is_null()) return "";
  if (!obj.at(key).is_string()) malformed(std::string("field '") + key + "' must be a string");
  return obj.at(key).get<std::string>();
}

// Metric under which a span paired with `canonical` is recorded.
std::string metric_for_span(const MetricTaxonomy& taxonomy, const std::string& canonical,
                            SpanKind kind) {
  const MetricEntry* e = taxonomy.find(canonical);
  bool percent = kind == SpanKind::kPercent || kind == SpanKind::kPercentRange;
  if (e && percent && e->value_class != ValueClass::kPercent &&
      !e->growth_metric.empty() && taxonomy.contains(e->growth_metric)) {
    return e->growth_metric;
  }
  return canonical;
}

class Grounder {
 public:
  Grounder(const Section& section, std::string_view doc_id, const MetricTaxonomy& taxonomy)
      : section_(section) {
    for (auto& c : detect_candidates(section, taxonomy, doc_id)) {
      c = extract_context(std::move(c));
      std::string metric = metric_for_span(taxonomy, c.alias.canonical_name, c.numeric.kind);
      candidates_.push_back({std::move(metric), std::move(c)});
    }
  }

  // Prefers the span at `hint`, then a span paired with the same metric,
  // then any span carrying the same face values.
  const NumericSpan* find(const std::string& metric, const Decimal& low,
                          const Decimal& high, const std::optional<CharRange>& hint,
                          const ContextualSpan** context) const {
    *context = nullptr;
    auto same = [&](const NumericSpan& s) { return s.low == low && s.high == high; };
    if (hint) {
      for (const auto& s : section_.numeric_spans) {
        if (s.range == *hint && same(s)) {
          *context = context_for(s.range, nullptr);
          return &s;
        }
      }
    }
    for (const auto& [m, c] : candidates_) {
      if (m == metric && same(c.numeric)) {
        *context = &c;
        return &c.numeric;
      }
    }
    for (const auto& s : section_.numeric_spans) {
      if (same(s)) {
        *context = context_for(s.range, nullptr);
        return &s;
      }
    }
    return nullptr;
  }

 private:
  const ContextualSpan* context_for(const CharRange& r, const ContextualSpan* fallback) const {
    for (const auto& [m, c] : candidates_) {
      if (c.numeric.range == r) return &c;
    }
    return fallback;
  }

  const Section& section_;
  std::vector<std::pair<std::string, ContextualSpan>> candidates_;
};

RawKpiRecord grounded_record(const std::string& metric, const NumericSpan& span,
                             const ContextualSpan* ctx, const Section& section,
                             std::string_view doc_id) {
  RawKpiRecord r;
  r.metric = metric;
  r.value_low = span.low;
  r.value_high = span.high;
  r.unit_token = span.unit_token;
  if (ctx) {
    r.period_phrase = ctx->period_phrase;
    r.anchor_period_phrase = ctx->anchor_period_phrase;
    r.period_from_header = ctx->period_from_header;
    r.qualifier_cues = ctx->qualifier_cues;
  }
  r.provenance = {std::string(doc_id), section.section_id, span.range};
  return r;
}

void parse_record_list(const Json& list, const Section& section, std::string_view doc_id,
                       const MetricTaxonomy& taxonomy, ParsedCompletion& out) {
  Grounder grounder(section, doc_id, taxonomy);
  for (const auto& item : list) {
    if (!item.is_object()) malformed("record entries must be objects");
    std::string metric_text = opt_string(item, "metric");
    if (metric_text.empty()) malformed("record without metric");
    auto metric = metric_for_key(metric_text, taxonomy);
    if (!metric) {
      out.dropped.push_back("unknown metric '" + metric_text + "'");
      continue;
    }
    FaceValue fv = face_value_from_json(item, metric_text);
    std::optional<CharRange> hint;
    if (item.contains("char_range")) {
      const Json& cr = item.at("char_range");
      if (!cr.is_array() || cr.size() != 2 || !cr[0].is_number_unsigned() ||
          !cr[1].is_number_unsigned()) {
        malformed("char_range must be [start, end]");
      }
      hint = CharRange{cr[0].get<size_t>(), cr[1].get<size_t>()};
    }
    const ContextualSpan* ctx = nullptr;
    const NumericSpan* span = grounder.find(*metric, fv.low, fv.high, hint, &ctx);
    if (!span) {
      out.dropped.push_back("ungrounded " + *metric + " value " + fv.low.to_string() +
                            (fv.low == fv.high ? "" : "-" + fv.high.to_string()));
      continue;
    }
    RawKpiRecord r;
    r.metric = *metric;
    r.value_low = fv.low;
    r.value_high = fv.high;
    r.unit_token = item.contains("unit_token") ? opt_string(item, "unit_token")
                                               : span->unit_token;
    if (r.unit_token.empty() && !fv.unit_token.empty()) r.unit_token = fv.unit_token;
    r.period_phrase = opt_string(item, "period_phrase");
    r.anchor_period_phrase = opt_string(item, "anchor_period_phrase");
    if (item.contains("period_from_header")) {
      if (!item.at("period_from_header").is_boolean()) {
        malformed("period_from_header must be a boolean");
      }
      r.period_from_header = item.at("period_from_header").get<bool>();
    }
    if (item.contains("qualifier_cues")) {
      r.qualifier_cues = string_list(item.at("qualifier_cues"), "qualifier_cues");
    }
    if (item.contains("confidence")) {
      const Json& c = item.at("confidence");
      if (!c.is_number()) malformed("confidence must be a number");
      r.backend_confidence = std::clamp(c.get<double>(), 0.0, 1.0);
    }
    r.provenance = {std::string(doc_id), section.section_id, span->range};
    out.records.push_back(std::move(r));
  }
}

void parse_flat_map(const Json& obj, const Section& section, std::string_view doc_id,
                    const MetricTaxonomy& taxonomy, ParsedCompletion& out) {
  Grounder grounder(section, doc_id, taxonomy);
  std::string period;
  for (const auto& [key, value] : obj.items()) {
    if (normalize_key(key) == "period") {
      if (!value.is_string()) malformed("Period must be a string");
      period = value.get<std::string>();
    }
  }
  for (const auto& [key, value] : obj.items()) {
    if (normalize_key(key) == "period") continue;
    auto metric = metric_for_key(key, taxonomy);
    if (!metric) {
      out.dropped.push_back("unknown metric '" + key + "'");
      continue;
    }
    FaceValue fv = face_value_from_json(value, key);
    const ContextualSpan* ctx = nullptr;
    const NumericSpan* span = grounder.find(*metric, fv.low, fv.high, std::nullopt, &ctx);
    if (!span) {
      out.dropped.push_back("ungrounded " + *metric + " value " + fv.low.to_string());
      continue;
    }
    RawKpiRecord r = grounded_record(*metric, *span, ctx, section, doc_id);
    if (!fv.unit_token.empty()) r.unit_token = fv.unit_token;
    if (!period.empty()) {
      r.period_phrase = period;
      r.period_from_header = false;
      if (!is_relative_prior_phrase(period)) r.anchor_period_phrase.clear();
    }
    out.records.push_back(std::move(r));
  }
  std::stable_sort(out.records.begin(), out.records.end(),
                   [](const RawKpiRecord& a, const RawKpiRecord& b) {
                     return a.provenance.range.start < b.provenance.range.start;
                   });
}

// Prompt layout markers the mock backend reads back.
constexpr std::string_view kSectionIdLine = "Section id: ";
constexpr std::string_view kSectionKindLine = "Section kind: ";
constexpr std::string_view kSectionTitleLine = "Section title: ";
constexpr std::string_view kTextMarker = "Text:\n";

std::string line_value(std::string_view prompt, std::string_view marker) {
  size_t pos = 0;
  while ((pos = prompt.find(marker, pos)) != std::string_view::npos) {
    if (pos == 0 || prompt[pos - 1] == '\n') break;
    pos += marker.size();
  }
  if (pos == std::string_view::npos) return "";
  size_t start = pos + marker.size();
  size_t end = prompt.find('\n', start);
  if (end == std::string_view::npos) end = prompt.size();
  return std::string(prompt.substr(start, end - start));
}

std::uint64_t fnv1a(std::string_view bytes, std::uint64_t h = 1469598103934665603ULL) {
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

}  // namespace

std::vector<ContextualSpan> detect_candidates(const Section& section,
                                              const MetricTaxonomy& taxonomy,
                                              std::string_view doc_id) {
  std::vector<ContextualSpan> out;
  if (section.numeric_spans.empty() || taxonomy.empty()) return out;
  auto sentences = ingest::split_sentences(section.body, section.kind);
  auto aliases = taxonomy.find_aliases(section.body);
  for (const auto& span : section.numeric_spans) {
    const CharRange* sent = sentence_of(sentences, span.range.start);
    if (!sent) continue;
    const AliasHit* before = nullptr;
    const AliasHit* after = nullptr;
    for (const auto& a : aliases) {
      if (a.start < sent->start || a.end > sent->end) continue;
      if (a.end <= span.range.start) {
        if (!before || a.end > before->end) before = &a;
      } else if (a.start >= span.range.end) {
        if (!after || a.start < after->start) after = &a;
      }
    }
    const AliasHit* chosen = before ? before : after;
    if (!chosen) continue;
    ContextualSpan c;
    c.numeric = span;
    c.alias = *chosen;
    c.sentence = section.body.substr(sent->start, sent->size());
    c.sentence_range = *sent;
    c.section_title = section.title;
    c.doc_id = std::string(doc_id);
    c.section_id = section.section_id;
    out.push_back(std::move(c));
  }
  return out;
}

const std::vector<std::string>& qualifier_cue_lexicon() {
  static const std::vector<std::string> kCues = {
      "expects", "expected", "guidance", "outlook", "will be",
      "adjusted", "non-GAAP", "GAAP", "approximately"};
  return kCues;
}

std::vector<std::string> find_qualifier_cues(std::string_view sentence) {
  struct Hit {
    size_t start;
    size_t end;
    const std::string* cue;
  };
  std::vector<Hit> hits;
  for (const auto& cue : qualifier_cue_lexicon()) {
    for (size_t pos : text::find_words_ci(sentence, cue)) {
      hits.push_back({pos, pos + cue.size(), &cue});
    }
  }
  std::sort(hits.begin(), hits.end(), [](const Hit& a, const Hit& b) {
    if (a.end - a.start != b.end - b.start) return a.end - a.start > b.end - b.start;
    return a.start < b.start;
  });
  std::vector<Hit> kept;
  for (const auto& h : hits) {
    bool overlaps = std::any_of(kept.begin(), kept.end(), [&](const Hit& k) {
      return h.start < k.end && k.start < h.end;
    });
    if (!overlaps) kept.push_back(h);
  }
  std::sort(kept.begin(), kept.end(),
            [](const Hit& a, const Hit& b) { return a.start < b.start; });
  std::vector<std::string> out;
  for (const auto& h : kept) {
    if (std::find(out.begin(), out.end(), *h.cue) == out.end()) out.push_back(*h.cue);
  }
  return out;
}

ContextualSpan extract_context(ContextualSpan span) {
  span.period_phrase.clear();
  span.anchor_period_phrase.clear();
  span.period_from_header = false;
  span.qualifier_cues = find_qualifier_cues(span.sentence);

  auto mentions = find_period_mentions(span.sentence);
  size_t base = span.sentence_range.start;
  size_t start = span.numeric.range.start >= base ? span.numeric.range.start - base : 0;
  size_t end = span.numeric.range.end >= base ? span.numeric.range.end - base : 0;
  const PeriodMention* nearest =
      nearest_mention(mentions, start, end, [](const PeriodMention&) { return true; });
  if (nearest) {
    span.period_phrase = nearest->text;
    if (nearest->relative) {
      const PeriodMention* anchor = nearest_mention(
          mentions, start, end, [](const PeriodMention& m) { return !m.relative; });
      if (anchor) span.anchor_period_phrase = anchor->text;
    }
    return span;
  }
  for (const auto& m : find_period_mentions(span.section_title)) {
    if (!m.relative) {
      span.period_phrase = m.text;
      span.period_from_header = true;
      break;
    }
  }
  return span;
}

TargetSchema TargetSchema::from_taxonomy(const MetricTaxonomy& taxonomy) {
  TargetSchema schema;
  schema.fields.push_back({"Period", ""});
  for (const auto& e : taxonomy.entries()) {
    std::string hint;
    switch (e.value_class) {
      case ValueClass::kCurrency: hint = "USD"; break;
      case ValueClass::kPercent: hint = "%"; break;
      case ValueClass::kCount: hint = ""; break;
    }
    schema.fields.push_back({field_name_for(e.canonical_name), hint});
  }
  return schema;
}

std::string build_extraction_prompt(const Section& section,
                                    const MetricTaxonomy& taxonomy,
                                    const TargetSchema& schema) {
  std::string p(kExtractionInstruction);
  p += "\n\nSchema:\n";
  for (const auto& f : schema.fields) {
    p += "- " + f.name;
    if (!f.unit_hint.empty()) p += " (" + f.unit_hint + ")";
    p += '\n';
  }
  if (!taxonomy.empty()) {
    p += "\nMetric aliases:\n";
    for (const auto& e : taxonomy.entries()) {
      p += "- " + e.canonical_name + ":";
      for (size_t i = 0; i < e.aliases.size(); ++i) {
        p += (i == 0 ? " " : ", ") + e.aliases[i];
      }
      p += '\n';
    }
  }
  p +=
      "\nReply with {\"records\": [...]}. Each record has metric, value_low, "
      "value_high, unit_token, period_phrase, anchor_period_phrase, "
      "period_from_header, qualifier_cues and char_range (offsets into the "
      "text). Values are copied from the text without scaling. A flat object "
      "keyed by schema field is also accepted.\n\n";
  p += std::string(kSectionIdLine) + section.section_id + '\n';
  p += std::string(kSectionKindLine) + std::string(to_string(section.kind)) + '\n';
  p += std::string(kSectionTitleLine) + section.title + '\n';
  p += kTextMarker;
  p += section.body;
  return p;
}

std::string build_repair_prompt(std::string_view original_prompt, std::string_view error) {
  std::string p(kRepairPreamble);
  p += " Parser error: ";
  p += error;
  p += "\nAnswer again with a single JSON object and nothing else.\n\n";
  p += original_prompt;
  return p;
}

ParsedCompletion parse_backend_output(std::string_view completion, const Section& section,
                                      std::string_view doc_id,
                                      const MetricTaxonomy& taxonomy) {
  Json j = parse_completion_json(completion);
  ParsedCompletion out;
  try {
    if (j.is_array()) {
      parse_record_list(j, section, doc_id, taxonomy, out);
    } else if (j.is_object() && j.contains("records")) {
      if (!j.at("records").is_array()) malformed("'records' must be a list");
      parse_record_list(j.at("records"), section, doc_id, taxonomy, out);
    } else if (j.is_object()) {
      parse_flat_map(j, section, doc_id, taxonomy, out);
    } else {
      malformed("completion is not a JSON object");
    }
  } catch (const Json::exception& e) {
    malformed(std::string("completion has unexpected structure: ") + e.what());
  }
  return out;
}

ExtractionReport extract_document(const Document& doc, const CompletionBackend& backend,
                                  const MetricTaxonomy& taxonomy,
                                  const ExtractionOptions& options) {
  TargetSchema schema = options.schema ? *options.schema : TargetSchema::from_taxonomy(taxonomy);

  struct Outcome {
    ParsedCompletion parsed;
    std::optional<SectionFailure> failure;
    size_t calls = 0;
  };
  std::vector<size_t> work;
  for (size_t i = 0; i < doc.sections.size(); ++i) {
    const Section& s = doc.sections[i];
    if (s.kind == SectionKind::kHeader || s.kind == SectionKind::kBoilerplate) continue;
    if (detect_candidates(s, taxonomy, doc.meta.doc_id).empty()) continue;
    work.push_back(i);
  }
  std::vector<Outcome> outcomes(work.size());

  auto run_one = [&](size_t w) {
    const Section& section = doc.sections[work[w]];
    Outcome& o = outcomes[w];
    std::string prompt = build_extraction_prompt(section, taxonomy, schema);
    std::string error;
    for (int attempt = 0; attempt < 2; ++attempt) {
      try {
        ++o.calls;
        std::string reply = backend.complete(
            attempt == 0 ? std::string_view(prompt) : build_repair_prompt(prompt, error));
        o.parsed = parse_backend_output(reply, section, doc.meta.doc_id, taxonomy);
        return;
      } catch (const Error& e) {
        error = e.what();
        if (e.code() != ErrorCode::kMalformedCompletion) break;
        log_debug("section " + section.section_id + ": " + error);
      } catch (const std::exception& e) {
        error = e.what();
        break;
      }
    }
    o.failure = SectionFailure{section.section_id, error};
  };

  size_t threads = std::min<size_t>(std::max(options.parallelism, 1), work.size());
  if (threads <= 1) {
    for (size_t w = 0; w < work.size(); ++w) run_one(w);
  } else {
    std::atomic<size_t> next{0};
    std::vector<std::thread> pool;
    for (size_t t = 0; t < threads; ++t) {
      pool.emplace_back([&] {
        for (size_t w = next++; w < work.size(); w = next++) run_one(w);
      });
    }
    for (auto& th : pool) th.join();
  }

  ExtractionReport report;
  for (auto& o : outcomes) {
    report.backend_calls += o.calls;
    report.dropped += o.parsed.dropped.size();
    if (o.failure) {
      log_warn("extraction failed for " + doc.meta.doc_id + "/" + o.failure->section_id +
               ": " + o.failure->message);
      report.failures.push_back(std::move(*o.failure));
      continue;
    }
    std::stable_sort(o.parsed.records.begin(), o.parsed.records.end(),
                     [](const RawKpiRecord& a, const RawKpiRecord& b) {
                       return a.provenance.range.start < b.provenance.range.start;
                     });
    for (auto& r : o.parsed.records) report.records.push_back(std::move(r));
  }
  return report;
}

MockBackend::MockBackend(MetricTaxonomy taxonomy) : MockBackend(std::move(taxonomy), {}) {}

MockBackend::MockBackend(MetricTaxonomy taxonomy, Options options)
    : taxonomy_(std::move(taxonomy)), options_(std::move(options)) {}

std::string MockBackend::complete(std::string_view prompt) const {
  bool repair = prompt.substr(0, kRepairPreamble.size()) == kRepairPreamble;
  if (options_.always_malformed || (options_.malformed_unless_repair && !repair)) {
    return "{\"records\": [{\"metric\": \"revenue\", \"value_low\": ";
  }
  size_t text_pos = prompt.find(std::string("\n") + std::string(kTextMarker));
  if (text_pos == std::string_view::npos) return "{\"records\": []}";

  Section section;
  section.section_id = line_value(prompt, kSectionIdLine);
  section.title = line_value(prompt, kSectionTitleLine);
  section.kind = parse_section_kind(line_value(prompt, kSectionKindLine))
                     .value_or(SectionKind::kNarrative);
  section.body = std::string(prompt.substr(text_pos + 1 + kTextMarker.size()));
  section.range = {0, section.body.size()};
  section.numeric_spans = ingest::detect_numeric_spans(section);

  std::uint64_t salt = fnv1a(section.body, fnv1a(std::to_string(options_.seed)));
  Json records = Json::array();
  size_t index = 0;
  for (auto& c : detect_candidates(section, taxonomy_)) {
    c = extract_context(std::move(c));
    std::string low = c.numeric.low.to_string();
    std::string high = c.numeric.high.to_string();
    if (options_.fabrication_rate > 0.0) {
      std::uint64_t h = fnv1a(std::to_string(index), salt);
      double u = static_cast<double>(h >> 11) / static_cast<double>(1ULL << 53);
      if (u < options_.fabrication_rate) low = high = options_.fabricated_value;
    }
    ++index;
    records.push_back(Json{
        {"metric", metric_for_span(taxonomy_, c.alias.canonical_name, c.numeric.kind)},
        {"value_low", low},
        {"value_high", high},
        {"unit_token", c.numeric.unit_token},
        {"period_phrase", c.period_phrase},
        {"anchor_period_phrase", c.anchor_period_phrase},
        {"period_from_header", c.period_from_header},
        {"qualifier_cues", c.qualifier_cues},
        {"char_range", Json::array({c.numeric.range.start, c.numeric.range.end})},
        {"confidence", 1.0},
    });
  }
  return Json{{"records", std::move(records)}}.dump();
}

}  // namespace finkpi
