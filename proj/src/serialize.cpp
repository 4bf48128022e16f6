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

#include "finkpi/serialize.hpp"

#include "finkpi/error.hpp"

namespace finkpi {
namespace {

[[noreturn]] void bad(const std::string& what) {
  throw Error(ErrorCode::kInvalidArgument, what);
}

const Json& field(const Json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) bad(std::string("missing key '") + key + "'");
  return j.at(key);
}

std::string str_field(const Json& j, const char* key) {
  const Json& v = field(j, key);
  if (!v.is_string()) bad(std::string("key '") + key + "' must be a string");
  return v.get<std::string>();
}

Decimal dec_field(const Json& j, const char* key) {
  const Json& v = field(j, key);
  if (v.is_string()) return Decimal::parse(v.get<std::string>());
  if (v.is_number_integer()) return Decimal(v.get<std::int64_t>());
  if (v.is_number()) return Decimal::from_double(v.get<double>());
  bad(std::string("key '") + key + "' must be a decimal");
}

template <typename E, typename Parser>
E enum_field(const Json& j, const char* key, Parser parse) {
  std::string text = str_field(j, key);
  auto v = parse(text);
  if (!v) bad(std::string("key '") + key + "' has unknown value '" + text + "'");
  return *v;
}

Json range_json(const CharRange& r) { return Json::array({r.start, r.end}); }

CharRange range_from(const Json& j) {
  if (!j.is_array() || j.size() != 2) bad("char_range must be [start, end]");
  return {j[0].get<std::size_t>(), j[1].get<std::size_t>()};
}

std::optional<SourceKind> parse_source_kind_lenient(std::string_view text) {
  if (auto k = parse_source_kind(text)) return k;
  if (text == "10-K") return SourceKind::kTenK;
  if (text == "10-Q") return SourceKind::kTenQ;
  if (text == "8-K") return SourceKind::kEightK;
  return std::nullopt;
}

}  // namespace

Json to_json(const DocumentMeta& m) {
  return Json{{"doc_id", m.doc_id},
              {"source_kind", to_string(m.source_kind)},
              {"company", m.company},
              {"published_on", m.published_on.to_string()},
              {"fiscal_year_end_month", m.fiscal_year_end_month}};
}

DocumentMeta meta_from_json(const Json& j) {
  DocumentMeta m;
  m.doc_id = str_field(j, "doc_id");
  if (m.doc_id.empty()) bad("doc_id must be non-empty");
  m.source_kind = enum_field<SourceKind>(j, "source_kind", parse_source_kind_lenient);
  m.company = str_field(j, "company");
  auto date = Date::parse(str_field(j, "published_on"));
  if (!date) bad("published_on must be YYYY-MM-DD");
  m.published_on = *date;
  if (j.contains("fiscal_year_end_month")) {
    const Json& v = j.at("fiscal_year_end_month");
    if (!v.is_number_integer()) bad("fiscal_year_end_month must be an integer");
    m.fiscal_year_end_month = v.get<int>();
  }
  if (m.fiscal_year_end_month < 1 || m.fiscal_year_end_month > 12) {
    bad("fiscal_year_end_month must be in [1, 12]");
  }
  return m;
}

Json to_json(const NumericSpan& s) {
  return Json{{"span_id", s.span_id},       {"section_id", s.section_id},
              {"char_range", range_json(s.range)}, {"surface", s.surface},
              {"kind", to_string(s.kind)},  {"parsed_low", s.low.to_string()},
              {"parsed_high", s.high.to_string()}, {"unit_token", s.unit_token}};
}

Json to_json(const Section& s) {
  Json spans = Json::array();
  for (const auto& span : s.numeric_spans) spans.push_back(to_json(span));
  return Json{{"section_id", s.section_id}, {"title", s.title},
              {"body", s.body},             {"char_range", range_json(s.range)},
              {"kind", to_string(s.kind)},  {"numeric_spans", std::move(spans)}};
}

Json to_json(const Document& doc) {
  Json j = to_json(doc.meta);
  j["raw_text"] = doc.raw_text;
  Json sections = Json::array();
  for (const auto& s : doc.sections) sections.push_back(to_json(s));
  j["sections"] = std::move(sections);
  return j;
}

Document document_from_json(const Json& j) {
  Document doc;
  doc.meta = meta_from_json(j);
  doc.raw_text = str_field(j, "raw_text");
  for (const auto& js : field(j, "sections")) {
    Section s;
    s.section_id = str_field(js, "section_id");
    s.title = str_field(js, "title");
    s.body = str_field(js, "body");
    s.range = range_from(field(js, "char_range"));
    s.kind = enum_field<SectionKind>(js, "kind", parse_section_kind);
    for (const auto& jn : field(js, "numeric_spans")) {
      NumericSpan n;
      n.span_id = str_field(jn, "span_id");
      n.section_id = str_field(jn, "section_id");
      n.range = range_from(field(jn, "char_range"));
      n.surface = str_field(jn, "surface");
      n.kind = enum_field<SpanKind>(jn, "kind", parse_span_kind);
      n.low = dec_field(jn, "parsed_low");
      n.high = dec_field(jn, "parsed_high");
      n.unit_token = str_field(jn, "unit_token");
      s.numeric_spans.push_back(std::move(n));
    }
    doc.sections.push_back(std::move(s));
  }
  return doc;
}

Json to_json(const FiscalPeriod& p) {
  return Json{{"granularity", to_string(p.granularity)},
              {"year", p.year},
              {"resolved_from", to_string(p.resolved_from)}};
}

Json to_json(const Qualifier& q) {
  return Json{{"basis", to_string(q.basis)}, {"status", to_string(q.status)}};
}

Json to_json(const Provenance& p) {
  return Json{{"doc_id", p.doc_id},
              {"section_id", p.section_id},
              {"char_range", range_json(p.range)}};
}

Json to_json(const RawKpiRecord& r) {
  return Json{{"metric", r.metric},
              {"value_low", r.value_low.to_string()},
              {"value_high", r.value_high.to_string()},
              {"unit_token", r.unit_token},
              {"period_phrase", r.period_phrase},
              {"anchor_period_phrase", r.anchor_period_phrase},
              {"period_from_header", r.period_from_header},
              {"qualifier_cues", r.qualifier_cues},
              {"provenance", to_json(r.provenance)},
              {"backend_confidence", r.backend_confidence}};
}

Json to_json(const KpiRecord& r) {
  return Json{{"metric", r.metric},
              {"value", r.value.to_string()},
              {"value_low", r.value_low.to_string()},
              {"value_high", r.value_high.to_string()},
              {"unit", to_string(r.unit)},
              {"scale_applied", r.scale_applied.to_string()},
              {"period", to_json(r.period)},
              {"qualifier", to_json(r.qualifier)},
              {"confidence", r.confidence.to_string()},
              {"company", r.company},
              {"published_on", r.published_on.to_string()},
              {"provenance", to_json(r.provenance)},
              {"rules_applied", r.rules_applied},
              {"qualifier_cues", r.qualifier_cues}};
}

KpiRecord kpi_record_from_json(const Json& j) {
  KpiRecord r;
  r.metric = str_field(j, "metric");
  r.value = dec_field(j, "value");
  r.value_low = dec_field(j, "value_low");
  r.value_high = dec_field(j, "value_high");
  r.unit = enum_field<Unit>(j, "unit", parse_unit);
  r.scale_applied = dec_field(j, "scale_applied");
  const Json& p = field(j, "period");
  r.period.granularity = enum_field<Granularity>(p, "granularity", parse_granularity);
  r.period.year = field(p, "year").get<int>();
  r.period.resolved_from =
      enum_field<PeriodSource>(p, "resolved_from", parse_period_source);
  const Json& q = field(j, "qualifier");
  r.qualifier.basis = enum_field<Basis>(q, "basis", parse_basis);
  r.qualifier.status = enum_field<Status>(q, "status", parse_status);
  r.confidence = dec_field(j, "confidence");
  r.company = str_field(j, "company");
  auto date = Date::parse(str_field(j, "published_on"));
  if (!date) bad("published_on must be YYYY-MM-DD");
  r.published_on = *date;
  const Json& prov = field(j, "provenance");
  r.provenance.doc_id = str_field(prov, "doc_id");
  r.provenance.section_id = str_field(prov, "section_id");
  r.provenance.range = range_from(field(prov, "char_range"));
  r.rules_applied = field(j, "rules_applied").get<std::vector<std::string>>();
  r.qualifier_cues = field(j, "qualifier_cues").get<std::vector<std::string>>();
  return r;
}

}  // namespace finkpi
