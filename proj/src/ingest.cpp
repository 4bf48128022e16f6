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

#include "finkpi/ingest.hpp"

#include <algorithm>
#include <array>
#include <cstdint>
#include <optional>

#include "finkpi/error.hpp"
#include "finkpi/log.hpp"
#include "text_util.hpp"

namespace finkpi::ingest {
namespace {

using text::is_alnum;
using text::is_alpha;
using text::is_digit;
using text::is_space;

// ---------------------------------------------------------------------------
// HTML stripping

void append_utf8(std::string& out, std::uint32_t cp) {
  if (cp < 0x80) {
    out.push_back(static_cast<char>(cp));
  } else if (cp < 0x800) {
    out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else if (cp < 0x10000) {
    out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else {
    out.push_back(static_cast<char>(0xF0 | (cp >> 18)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  }
}

std::string decode_entities(std::string_view s) {
  static constexpr std::array<std::pair<std::string_view, std::uint32_t>, 14>
      kNamed{{{"amp", '&'},
              {"lt", '<'},
              {"gt", '>'},
              {"quot", '"'},
              {"apos", '\''},
              {"nbsp", ' '},
              {"ndash", 0x2013},
              {"mdash", 0x2014},
              {"rsquo", 0x2019},
              {"lsquo", 0x2018},
              {"ldquo", 0x201C},
              {"rdquo", 0x201D},
              {"dollar", '$'},
              {"percnt", '%'}}};
  std::string out;
  out.reserve(s.size());
  for (size_t i = 0; i < s.size(); ++i) {
    if (s[i] != '&') {
      out.push_back(s[i]);
      continue;
    }
    size_t semi = s.find(';', i);
    if (semi == std::string_view::npos || semi - i > 10) {
      out.push_back('&');
      continue;
    }
    std::string_view name = s.substr(i + 1, semi - i - 1);
    std::optional<std::uint32_t> cp;
    if (!name.empty() && name[0] == '#') {
      std::uint32_t v = 0;
      bool hex = name.size() > 1 && (name[1] == 'x' || name[1] == 'X');
      bool ok = name.size() > (hex ? 2u : 1u);
      for (size_t k = hex ? 2 : 1; k < name.size() && ok; ++k) {
        char c = text::lower(name[k]);
        if (is_digit(c)) {
          v = v * (hex ? 16 : 10) + static_cast<std::uint32_t>(c - '0');
        } else if (hex && c >= 'a' && c <= 'f') {
          v = v * 16 + static_cast<std::uint32_t>(c - 'a' + 10);
        } else {
          ok = false;
        }
        if (v > 0x10FFFF) ok = false;
      }
      if (ok) cp = v == 0xA0 ? ' ' : v;
    } else {
      for (const auto& [n, v] : kNamed) {
        if (n == name) cp = v;
      }
    }
    if (!cp) {
      out.push_back('&');
      continue;
    }
    append_utf8(out, *cp);
    i = semi;
  }
  return out;
}

bool is_block_tag(std::string_view t) {
  static constexpr std::array<std::string_view, 18> kBlocks{
      "p",      "div",  "section", "article",    "header", "footer",
      "ul",     "ol",   "pre",     "blockquote", "title",  "body",
      "html",   "main", "nav",     "aside",      "dl",     "form"};
  return std::find(kBlocks.begin(), kBlocks.end(), t) != kBlocks.end();
}

bool is_heading_tag(std::string_view t) {
  return t.size() == 2 && t[0] == 'h' && t[1] >= '1' && t[1] <= '6';
}

class HtmlStripper {
 public:
  explicit HtmlStripper(std::string_view html) : html_(html) {}

  StrippedHtml run() {
    size_t i = 0;
    std::string pending_text;
    while (i < html_.size()) {
      char c = html_[i];
      if (c != '<') {
        pending_text.push_back(c);
        ++i;
        continue;
      }
      if (html_.compare(i, 4, "<!--") == 0) {
        flush(pending_text);
        size_t end = html_.find("-->", i + 4);
        i = end == std::string_view::npos ? html_.size() : end + 3;
        continue;
      }
      size_t close = find_tag_end(i);
      if (close == std::string_view::npos) {
        // Stray '<' in text.
        pending_text.push_back(c);
        ++i;
        continue;
      }
      flush(pending_text);
      std::string_view tag = html_.substr(i + 1, close - i - 1);
      i = close + 1;
      bool closing = !tag.empty() && tag[0] == '/';
      if (closing) tag.remove_prefix(1);
      size_t name_end = 0;
      while (name_end < tag.size() && is_alnum(tag[name_end])) ++name_end;
      std::string name = text::to_lower(tag.substr(0, name_end));
      if (name.empty()) continue;  // <!DOCTYPE>, <?xml ...>
      if (!closing && (name == "script" || name == "style" || name == "head")) {
        i = skip_raw_element(i, name);
        continue;
      }
      handle_tag(name, closing);
    }
    flush(pending_text);
    if (table_depth_ > 0) close_table();
    return {std::move(out_), std::move(hints_)};
  }

 private:
  size_t find_tag_end(size_t lt) const {
    if (lt + 1 >= html_.size()) return std::string_view::npos;
    char next = html_[lt + 1];
    if (!(is_alpha(next) || next == '/' || next == '!' || next == '?')) {
      return std::string_view::npos;
    }
    char quote = 0;
    for (size_t k = lt + 1; k < html_.size(); ++k) {
      char c = html_[k];
      if (quote) {
        if (c == quote) quote = 0;
      } else if (c == '"' || c == '\'') {
        quote = c;
      } else if (c == '>') {
        return k;
      }
    }
    return std::string_view::npos;
  }

  size_t skip_raw_element(size_t from, const std::string& name) {
    std::string closer = "</" + name;
    for (size_t k = from; k + closer.size() <= html_.size(); ++k) {
      if (text::matches_at_ci(html_, k, closer)) {
        size_t gt = html_.find('>', k);
        return gt == std::string_view::npos ? html_.size() : gt + 1;
      }
    }
    return html_.size();
  }

  void request_break(int level) { pending_break_ = std::max(pending_break_, level); }

  void handle_tag(const std::string& name, bool closing) {
    if (name == "br" || name == "li" || name == "dt" || name == "dd") {
      request_break(1);
    } else if (is_heading_tag(name)) {
      request_break(2);
      if (!closing) {
        heading_start_pending_ = true;
        heading_start_.reset();
      } else if (heading_start_ && *heading_start_ < out_.size()) {
        hints_.headings.push_back({*heading_start_, out_.size()});
        heading_start_.reset();
      } else {
        heading_start_pending_ = false;
      }
    } else if (name == "table") {
      request_break(2);
      if (!closing) {
        if (table_depth_++ == 0) {
          table_start_pending_ = true;
          table_start_.reset();
        }
      } else if (table_depth_ > 0 && --table_depth_ == 0) {
        close_table();
      }
    } else if (name == "tr") {
      request_break(1);
      cells_in_row_ = 0;
    } else if (name == "td" || name == "th") {
      if (!closing) {
        if (cells_in_row_ > 0) pending_tab_ = true;
        ++cells_in_row_;
      }
    } else if (is_block_tag(name)) {
      request_break(2);
    }
  }

  void close_table() {
    if (table_start_ && *table_start_ < out_.size()) {
      hints_.tables.push_back({*table_start_, out_.size()});
    }
    table_start_.reset();
    table_start_pending_ = false;
    table_depth_ = 0;
    request_break(2);
  }

  void flush(std::string& pending) {
    if (pending.empty()) return;
    std::string decoded = decode_entities(pending);
    pending.clear();
    for (char c : decoded) {
      if (is_space(c)) {
        pending_space_ = true;
        continue;
      }
      emit_separators();
      out_.push_back(c);
    }
  }

  void emit_separators() {
    if (!out_.empty()) {
      if (pending_break_ > 0) {
        out_.append(static_cast<size_t>(pending_break_), '\n');
      } else if (pending_tab_) {
        out_.push_back('\t');
      } else if (pending_space_) {
        out_.push_back(' ');
      }
    }
    pending_break_ = 0;
    pending_tab_ = false;
    pending_space_ = false;
    if (table_start_pending_) {
      table_start_ = out_.size();
      table_start_pending_ = false;
    }
    if (heading_start_pending_) {
      heading_start_ = out_.size();
      heading_start_pending_ = false;
    }
  }

  std::string_view html_;
  std::string out_;
  MarkupHints hints_;
  int pending_break_ = 0;
  bool pending_tab_ = false;
  bool pending_space_ = false;
  int table_depth_ = 0;
  int cells_in_row_ = 0;
  bool table_start_pending_ = false;
  bool heading_start_pending_ = false;
  std::optional<size_t> table_start_;
  std::optional<size_t> heading_start_;
};

// ---------------------------------------------------------------------------
// Segmentation

struct Line {
  size_t start;
  size_t end;  // excludes '\n'
};

bool is_blank(std::string_view s) { return text::trim(s).empty(); }

// At least two non-empty columns separated by tabs or runs of 2+ spaces.
bool is_columnar(std::string_view line) {
  std::string_view t = text::trim(line);
  if (t.empty()) return false;
  int columns = 1;
  for (size_t i = 0; i < t.size(); ++i) {
    if (t[i] == '\t' || (t[i] == ' ' && i + 1 < t.size() && t[i + 1] == ' ')) {
      ++columns;
      while (i + 1 < t.size() && (t[i + 1] == '\t' || t[i + 1] == ' ')) ++i;
    }
  }
  return columns >= 2;
}

bool looks_like_heading(std::string_view line) {
  static constexpr std::array<std::string_view, 17> kSmallWords{
      "a",  "an", "and", "as", "at", "but",  "by",   "for", "in",
      "of", "on", "or",  "the", "to", "vs", "with", "from"};
  std::string_view t = text::trim(line);
  if (t.empty() || t.size() > 80) return false;
  if (t.find('\t') != std::string_view::npos) return false;
  char last = t.back();
  if (last == '.' || last == ',' || last == ';' || last == '!' || last == '?') {
    return false;
  }
  bool any_alpha = false;
  bool any_lower = false;
  for (char c : t) {
    any_alpha |= is_alpha(c);
    any_lower |= (c >= 'a' && c <= 'z');
  }
  if (!any_alpha) return false;
  std::vector<std::string_view> words;
  size_t i = 0;
  while (i < t.size()) {
    while (i < t.size() && t[i] == ' ') ++i;
    size_t b = i;
    while (i < t.size() && t[i] != ' ') ++i;
    if (i > b) words.push_back(t.substr(b, i - b));
  }
  if (words.size() > 12) return false;
  if (!any_lower) return true;
  for (size_t w = 0; w < words.size(); ++w) {
    std::string_view word = words[w];
    if (!is_alpha(word[0])) continue;
    if (word[0] >= 'A' && word[0] <= 'Z') continue;
    std::string lw = text::to_lower(word);
    bool small = std::find(kSmallWords.begin(), kSmallWords.end(), lw) !=
                 kSmallWords.end();
    if (w == 0 || !small) return false;
  }
  return true;
}

bool looks_like_boilerplate(std::string_view body) {
  std::string lower = text::to_lower(body);
  return lower.find("forward-looking statements") != std::string::npos ||
         lower.find("safe harbor") != std::string::npos ||
         lower.find("all rights reserved") != std::string::npos;
}

enum class UnitKind { kText, kTable, kHeadingHint };

struct Unit {
  UnitKind kind;
  std::vector<Line> lines;
  CharRange hint_range;  // for hint-derived units
};

CharRange trimmed_range(std::string_view text, size_t start, size_t end) {
  while (start < end && is_space(text[start])) ++start;
  while (end > start && is_space(text[end - 1])) --end;
  return {start, end};
}

}  // namespace

// ---------------------------------------------------------------------------

bool is_valid_utf8(std::string_view bytes) {
  size_t i = 0;
  const size_t n = bytes.size();
  while (i < n) {
    auto c = static_cast<unsigned char>(bytes[i]);
    if (c < 0x80) {
      ++i;
      continue;
    }
    int extra;
    std::uint32_t cp;
    if ((c & 0xE0) == 0xC0) {
      extra = 1;
      cp = c & 0x1F;
    } else if ((c & 0xF0) == 0xE0) {
      extra = 2;
      cp = c & 0x0F;
    } else if ((c & 0xF8) == 0xF0) {
      extra = 3;
      cp = c & 0x07;
    } else {
      return false;
    }
    if (i + static_cast<size_t>(extra) >= n) return false;
    for (int k = 1; k <= extra; ++k) {
      auto cc = static_cast<unsigned char>(bytes[i + static_cast<size_t>(k)]);
      if ((cc & 0xC0) != 0x80) return false;
      cp = (cp << 6) | (cc & 0x3F);
    }
    // Overlong encodings, surrogates, out-of-range.
    if ((extra == 1 && cp < 0x80) || (extra == 2 && cp < 0x800) ||
        (extra == 3 && cp < 0x10000) || cp > 0x10FFFF ||
        (cp >= 0xD800 && cp <= 0xDFFF)) {
      return false;
    }
    i += static_cast<size_t>(extra) + 1;
  }
  return true;
}

StrippedHtml strip_html(std::string_view html) {
  return HtmlStripper(html).run();
}

std::string normalize_text(std::string_view in) {
  std::string s;
  s.reserve(in.size());
  for (size_t i = 0; i < in.size(); ++i) {
    char c = in[i];
    if (c == '\r') {
      s.push_back('\n');
      if (i + 1 < in.size() && in[i + 1] == '\n') ++i;
    } else if (c == '\xC2' && i + 1 < in.size() && in[i + 1] == '\xA0') {
      s.push_back(' ');
      ++i;
    } else {
      s.push_back(c);
    }
  }
  // Trailing blanks per line.
  std::string out;
  out.reserve(s.size());
  size_t line_start = 0;
  while (line_start <= s.size()) {
    size_t nl = s.find('\n', line_start);
    size_t line_end = nl == std::string::npos ? s.size() : nl;
    size_t e = line_end;
    while (e > line_start && (s[e - 1] == ' ' || s[e - 1] == '\t')) --e;
    out.append(s, line_start, e - line_start);
    if (nl == std::string::npos) break;
    out.push_back('\n');
    line_start = nl + 1;
  }
  size_t b = 0;
  while (b < out.size() && out[b] == '\n') ++b;
  size_t e = out.size();
  while (e > b && is_space(out[e - 1])) --e;
  return out.substr(b, e - b);
}

Document load_document(std::string_view bytes, InputFormat format,
                       DocumentMeta meta) {
  if (!is_valid_utf8(bytes)) {
    throw Error(ErrorCode::kDecodeError,
                "document '" + meta.doc_id + "' is not valid UTF-8");
  }
  Document doc;
  doc.meta = std::move(meta);
  MarkupHints hints;
  if (format == InputFormat::kHtml) {
    StrippedHtml stripped = strip_html(bytes);
    if (!is_valid_utf8(stripped.text)) {
      throw Error(ErrorCode::kDecodeError,
                  "document '" + doc.meta.doc_id + "' decodes to invalid UTF-8");
    }
    doc.raw_text = std::move(stripped.text);
    hints = std::move(stripped.hints);
  } else {
    doc.raw_text = normalize_text(bytes);
  }
  if (text::trim(doc.raw_text).empty()) {
    throw Error(ErrorCode::kEmptyDocument,
                "document '" + doc.meta.doc_id + "' has no content");
  }
  doc.sections = segment_sections(doc.raw_text, &hints);
  for (auto& section : doc.sections) {
    if (section.kind != SectionKind::kHeader) {
      section.numeric_spans = detect_numeric_spans(section);
    }
  }
  return doc;
}

std::vector<Section> segment_sections(std::string_view raw, const MarkupHints* hints) {
  std::vector<Line> lines;
  for (size_t start = 0; start <= raw.size();) {
    size_t nl = raw.find('\n', start);
    size_t end = nl == std::string_view::npos ? raw.size() : nl;
    lines.push_back({start, end});
    if (nl == std::string_view::npos) break;
    start = nl + 1;
  }

  struct HintRange {
    CharRange range;
    UnitKind kind;
  };
  std::vector<HintRange> hint_ranges;
  if (hints != nullptr) {
    for (const auto& r : hints->tables) hint_ranges.push_back({r, UnitKind::kTable});
    for (const auto& r : hints->headings) {
      hint_ranges.push_back({r, UnitKind::kHeadingHint});
    }
    std::sort(hint_ranges.begin(), hint_ranges.end(),
              [](const HintRange& a, const HintRange& b) {
                return a.range.start < b.range.start;
              });
  }
  auto hint_at = [&](size_t offset) -> const HintRange* {
    for (const auto& h : hint_ranges) {
      if (offset >= h.range.start && offset < h.range.end) return &h;
    }
    return nullptr;
  };

  // Blocks of consecutive non-blank lines; hint regions are their own units.
  std::vector<Unit> units;
  std::vector<Line> block;
  auto flush_block = [&]() {
    if (block.empty()) return;
    // Split columnar runs of >= 2 lines out as tables.
    size_t i = 0;
    std::vector<Line> text_lines;
    auto flush_text = [&]() {
      if (!text_lines.empty()) {
        units.push_back({UnitKind::kText, text_lines, {}});
        text_lines.clear();
      }
    };
    while (i < block.size()) {
      size_t j = i;
      while (j < block.size() &&
             is_columnar(raw.substr(block[j].start, block[j].end - block[j].start))) {
        ++j;
      }
      if (j - i >= 2) {
        flush_text();
        units.push_back({UnitKind::kTable,
                         std::vector<Line>(block.begin() + static_cast<long>(i),
                                           block.begin() + static_cast<long>(j)),
                         {}});
        i = j;
      } else {
        text_lines.push_back(block[i]);
        ++i;
      }
    }
    flush_text();
    block.clear();
  };

  for (size_t li = 0; li < lines.size(); ++li) {
    const Line& line = lines[li];
    if (const HintRange* h = hint_at(line.start); h != nullptr && !is_blank(raw.substr(line.start, line.end - line.start))) {
      flush_block();
      units.push_back({h->kind, {}, h->range});
      while (li + 1 < lines.size() && lines[li + 1].start < h->range.end) ++li;
      continue;
    }
    if (is_blank(raw.substr(line.start, line.end - line.start))) {
      flush_block();
    } else {
      block.push_back(line);
    }
  }
  flush_block();

  std::vector<Section> sections;
  std::string current_title;
  auto add = [&](SectionKind kind, CharRange r) {
    r = trimmed_range(raw, r.start, r.end);
    if (r.empty()) return;
    Section s;
    s.section_id = "s" + std::to_string(sections.size() + 1);
    s.range = r;
    s.body = std::string(raw.substr(r.start, r.size()));
    s.kind = kind;
    if (kind == SectionKind::kHeader) {
      current_title = s.body;
      s.title = s.body;
    } else {
      s.title = current_title;
      if (kind == SectionKind::kNarrative && looks_like_boilerplate(s.body)) {
        s.kind = SectionKind::kBoilerplate;
      }
    }
    sections.push_back(std::move(s));
  };

  for (size_t u = 0; u < units.size(); ++u) {
    const Unit& unit = units[u];
    switch (unit.kind) {
      case UnitKind::kHeadingHint:
        add(SectionKind::kHeader, unit.hint_range);
        break;
      case UnitKind::kTable:
        if (!unit.lines.empty()) {
          add(SectionKind::kTable, {unit.lines.front().start, unit.lines.back().end});
        } else {
          add(SectionKind::kTable, unit.hint_range);
        }
        break;
      case UnitKind::kText: {
        const Line& first = unit.lines.front();
        std::string_view first_text = raw.substr(first.start, first.end - first.start);
        bool body_follows = unit.lines.size() > 1 || u + 1 < units.size();
        if (looks_like_heading(first_text) && body_follows) {
          add(SectionKind::kHeader, {first.start, first.end});
          if (unit.lines.size() > 1) {
            add(SectionKind::kNarrative, {unit.lines[1].start, unit.lines.back().end});
          }
        } else {
          add(SectionKind::kNarrative, {first.start, unit.lines.back().end});
        }
        break;
      }
    }
  }

  if (sections.empty()) {
    Section s;
    s.section_id = "s1";
    s.range = {0, raw.size()};
    s.body = std::string(raw);
    sections.push_back(std::move(s));
  }
  return sections;
}

// ---------------------------------------------------------------------------
// Numeric spans

namespace {

struct Amount {
  size_t start = 0;
  size_t end = 0;
  bool currency = false;
  bool percent = false;
  bool grouped = false;
  bool fractional = false;
  Decimal value;
  std::string scale;

  bool plain_integer() const {
    return !currency && !percent && !grouped && !fractional && scale.empty();
  }
  bool year_like() const {
    return plain_integer() && end - start == 4 && value >= Decimal(1900) &&
           value <= Decimal(2100);
  }
};

bool is_scale_letter(char c) { return c == 'K' || c == 'M' || c == 'B'; }

std::optional<Amount> parse_amount(std::string_view s, size_t pos) {
  const size_t n = s.size();
  Amount a;
  a.start = pos;
  size_t i = pos;
  if (s.compare(i, 3, "US$") == 0) {
    i += 3;
    a.currency = true;
  } else if (i < n && s[i] == '$') {
    ++i;
    a.currency = true;
  }
  if (i >= n || !is_digit(s[i])) return std::nullopt;
  size_t num_start = i;
  while (i < n && is_digit(s[i])) ++i;
  while (i + 3 < n && s[i] == ',' && is_digit(s[i + 1]) && is_digit(s[i + 2]) &&
         is_digit(s[i + 3]) && (i + 4 >= n || !is_digit(s[i + 4]))) {
    i += 4;
    a.grouped = true;
  }
  if (i + 1 < n && s[i] == '.' && is_digit(s[i + 1])) {
    ++i;
    while (i < n && is_digit(s[i])) ++i;
    a.fractional = true;
  }
  auto value = Decimal::try_parse(s.substr(num_start, i - num_start));
  if (!value) return std::nullopt;
  a.value = *value;

  if (i < n && is_scale_letter(s[i]) && text::word_boundary_after(s, i + 1)) {
    a.scale = std::string(1, s[i]);
    ++i;
  } else if (i + 1 < n && s[i] == ' ') {
    static constexpr std::array<std::string_view, 3> kWords{"thousand", "million",
                                                            "billion"};
    for (auto w : kWords) {
      if (text::matches_at_ci(s, i + 1, w) &&
          text::word_boundary_after(s, i + 1 + w.size())) {
        a.scale = std::string(s.substr(i + 1, w.size()));
        i += 1 + w.size();
        break;
      }
    }
  }
  if (i < n && is_alpha(s[i])) return std::nullopt;  // "4th", "2x"
  if (i < n && s[i] == '%') {
    a.percent = true;
    ++i;
  } else if (text::matches_at_ci(s, i, " percent") &&
             text::word_boundary_after(s, i + 8)) {
    a.percent = true;
    i += 8;
  }
  if (a.percent && (!a.scale.empty() || a.currency)) return std::nullopt;
  a.end = i;
  return a;
}

std::string_view previous_word(std::string_view s, size_t pos) {
  size_t e = pos;
  while (e > 0 && s[e - 1] == ' ') --e;
  size_t b = e;
  while (b > 0 && is_alpha(s[b - 1])) --b;
  return s.substr(b, e - b);
}

bool is_month_name(std::string_view w) {
  static constexpr std::array<std::string_view, 12> kMonths{
      "january", "february", "march",     "april",   "may",      "june",
      "july",    "august",   "september", "october", "november", "december"};
  std::string lw = text::to_lower(w);
  return std::find(kMonths.begin(), kMonths.end(), lw) != kMonths.end();
}

bool range_compatible(const Amount& a, const Amount& b) {
  if (a.percent && !b.percent) return false;
  if (b.percent && !a.percent && (a.currency || !a.scale.empty())) return false;
  if (b.currency && !a.currency) return false;
  if (!a.scale.empty() && b.scale.empty()) return false;
  if (!a.scale.empty() && text::to_lower(a.scale) != text::to_lower(b.scale)) {
    return false;
  }
  if (a.year_like() || b.year_like()) return false;
  return a.value <= b.value;
}

SpanKind kind_for(bool percent, bool currency, bool range) {
  if (percent) return range ? SpanKind::kPercentRange : SpanKind::kPercent;
  if (currency) return range ? SpanKind::kCurrencyRange : SpanKind::kCurrency;
  return range ? SpanKind::kRange : SpanKind::kScalar;
}

}  // namespace

std::vector<NumericSpan> detect_numeric_spans(const Section& section) {
  std::vector<NumericSpan> spans;
  if (section.kind == SectionKind::kHeader) return spans;
  std::string_view s = section.body;
  const size_t n = s.size();
  size_t i = 0;
  while (i < n) {
    char c = s[i];
    bool candidate = c == '$' || is_digit(c) || s.compare(i, 3, "US$") == 0;
    if (!candidate) {
      ++i;
      continue;
    }
    if (i > 0 && (is_alnum(s[i - 1]) || s[i - 1] == '.' || s[i - 1] == ',' ||
                  s[i - 1] == '$' || s[i - 1] == '_')) {
      // Embedded in a word or a number we already passed ("Q4", "FY2025").
      while (i < n && (is_alnum(s[i]) || s[i] == '$')) ++i;
      continue;
    }
    auto a = parse_amount(s, i);
    if (!a) {
      size_t j = i;
      while (j < n && !is_space(s[j])) ++j;
      log_debug("skipping near-numeric token '" + std::string(s.substr(i, j - i)) +
                "' in section " + section.section_id);
      i = j;
      continue;
    }
    size_t after = a->end;
    if (a->year_like() || is_month_name(previous_word(s, a->start)) ||
        (after + 1 < n && s[after] == '-' && is_alpha(s[after + 1]))) {
      i = after;
      while (i < n && (is_alnum(s[i]) || s[i] == '-')) ++i;
      continue;
    }

    std::optional<Amount> b;
    size_t k = after;
    while (k < n && s[k] == ' ') ++k;
    bool spaced = k > after;
    size_t conn_end = std::string_view::npos;
    bool to_connector = false;
    if (s.compare(k, text::kEnDash.size(), text::kEnDash) == 0) {
      conn_end = k + text::kEnDash.size();
    } else if (k < n && s[k] == '-') {
      conn_end = k + 1;
    } else if (spaced && text::matches_at_ci(s, k, "to") && k + 2 < n && s[k + 2] == ' ') {
      conn_end = k + 2;
      to_connector = true;
    }
    if (conn_end != std::string_view::npos) {
      size_t m = conn_end;
      while (m < n && s[m] == ' ') ++m;
      bool from_phrase = to_connector &&
                         text::to_lower(previous_word(s, a->start)) == "from";
      if (!from_phrase) {
        b = parse_amount(s, m);
        if (b && !range_compatible(*a, *b)) b.reset();
      }
    }

    NumericSpan span;
    span.section_id = section.section_id;
    span.span_id = section.section_id + ".n" + std::to_string(spans.size() + 1);
    if (b) {
      bool percent = a->percent || b->percent;
      span.range = {a->start, b->end};
      span.low = a->value;
      span.high = b->value;
      span.kind = kind_for(percent, a->currency, a->value < b->value);
      span.unit_token = percent ? "%" : (b->scale.empty() ? a->scale : b->scale);
    } else {
      span.range = {a->start, a->end};
      span.low = a->value;
      span.high = a->value;
      span.kind = kind_for(a->percent, a->currency, false);
      span.unit_token = a->percent ? "%" : a->scale;
    }
    span.surface = std::string(s.substr(span.range.start, span.range.size()));
    i = span.range.end;
    spans.push_back(std::move(span));
  }
  return spans;
}

std::vector<CharRange> split_sentences(std::string_view body, SectionKind kind) {
  static constexpr std::array<std::string_view, 16> kAbbrev{
      "inc", "corp", "co", "ltd", "vs", "approx", "no", "mr", "ms", "dr",
      "st",  "jr",   "u.s", "e.g", "i.e", "etc"};
  std::vector<CharRange> out;
  auto push = [&](size_t b, size_t e) {
    CharRange r = trimmed_range(body, b, e);
    if (!r.empty()) out.push_back(r);
  };
  if (kind == SectionKind::kTable) {
    size_t start = 0;
    while (start <= body.size()) {
      size_t nl = body.find('\n', start);
      size_t end = nl == std::string_view::npos ? body.size() : nl;
      push(start, end);
      if (nl == std::string_view::npos) break;
      start = nl + 1;
    }
    return out;
  }
  size_t start = 0;
  for (size_t i = 0; i < body.size(); ++i) {
    char c = body[i];
    if (c != '.' && c != '!' && c != '?') continue;
    if (i + 1 < body.size() && !is_space(body[i + 1])) continue;
    if (c == '.') {
      size_t b = i;
      while (b > start && (is_alpha(body[b - 1]) || body[b - 1] == '.')) --b;
      std::string word = text::to_lower(body.substr(b, i - b));
      if (std::find(kAbbrev.begin(), kAbbrev.end(), word) != kAbbrev.end()) continue;
    }
    push(start, i + 1);
    start = i + 1;
  }
  push(start, body.size());
  return out;
}

}  // namespace finkpi::ingest
