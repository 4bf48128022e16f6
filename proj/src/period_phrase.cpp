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

#include "finkpi/period_phrase.hpp"

#include <array>

#include "text_util.hpp"

namespace finkpi {
namespace {

using text::is_digit;
using text::matches_at_ci;

constexpr std::array<std::string_view, 5> kRelativePhrases = {
    "last year", "prior year", "previous year", "a year ago", "year-ago"};

struct Cursor {
  std::string_view s;
  size_t pos;

  bool literal(std::string_view word) {
    if (!matches_at_ci(s, pos, word)) return false;
    pos += word.size();
    return true;
  }
  bool word(std::string_view w) {
    if (!matches_at_ci(s, pos, w) || !text::word_boundary_after(s, pos + w.size())) {
      return false;
    }
    pos += w.size();
    return true;
  }
  // Zero or more spaces; returns the number skipped.
  size_t spaces() {
    size_t n = 0;
    while (pos < s.size() && s[pos] == ' ') ++pos, ++n;
    return n;
  }
  bool space() { return spaces() > 0; }
  std::optional<int> year() {
    if (pos + 4 > s.size()) return std::nullopt;
    for (size_t i = 0; i < 4; ++i) {
      if (!is_digit(s[pos + i])) return std::nullopt;
    }
    if (!text::word_boundary_after(s, pos + 4)) return std::nullopt;
    int y = std::stoi(std::string(s.substr(pos, 4)));
    if (y < kMinFiscalYear || y > kMaxFiscalYear) return std::nullopt;
    pos += 4;
    return y;
  }
};

std::optional<Granularity> ordinal_quarter(Cursor& c) {
  static constexpr std::array<std::pair<std::string_view, Granularity>, 4> kOrd{{
      {"first", Granularity::kQ1},
      {"second", Granularity::kQ2},
      {"third", Granularity::kQ3},
      {"fourth", Granularity::kQ4},
  }};
  for (const auto& [w, g] : kOrd) {
    Cursor t = c;
    if (t.word(w) && t.space() && t.word("quarter")) {
      c = t;
      return g;
    }
  }
  return std::nullopt;
}

std::optional<Granularity> ordinal_half(Cursor& c) {
  for (auto [w, g] : {std::pair{std::string_view("first"), Granularity::kH1},
                      std::pair{std::string_view("second"), Granularity::kH2}}) {
    Cursor t = c;
    if (t.word(w) && t.space() && t.word("half")) {
      c = t;
      return g;
    }
  }
  return std::nullopt;
}

// "[of] [fiscal] [year] YYYY" after an ordinal period word.
std::optional<int> ordinal_tail(Cursor& c) {
  Cursor t = c;
  t.space();
  if (t.word("of")) t.space();
  if (t.word("fiscal")) {
    t.space();
    if (t.word("year")) t.space();
  } else if (t.literal("FY")) {
    t.spaces();
  }
  auto y = t.year();
  if (y) c = t;
  return y;
}

// Tries every explicit pattern at c.pos. On success advances c.
std::optional<ExplicitPeriod> match_explicit(Cursor& c) {
  if (!text::word_boundary_before(c.s, c.pos)) return std::nullopt;
  {
    Cursor t = c;
    if (t.literal("Q") && t.pos < t.s.size() && t.s[t.pos] >= '1' &&
        t.s[t.pos] <= '4') {
      auto g = static_cast<Granularity>(static_cast<int>(Granularity::kQ1) +
                                        (t.s[t.pos] - '1'));
      ++t.pos;
      t.spaces();
      if (t.literal("FY")) t.spaces();
      if (auto y = t.year()) {
        c = t;
        return ExplicitPeriod{g, *y};
      }
    }
  }
  {
    Cursor t = c;
    if (t.literal("H") && t.pos < t.s.size() &&
        (t.s[t.pos] == '1' || t.s[t.pos] == '2')) {
      Granularity g = t.s[t.pos] == '1' ? Granularity::kH1 : Granularity::kH2;
      ++t.pos;
      t.spaces();
      if (t.literal("FY")) t.spaces();
      if (auto y = t.year()) {
        c = t;
        return ExplicitPeriod{g, *y};
      }
    }
  }
  {
    Cursor t = c;
    if (t.literal("FY")) {
      t.spaces();
      if (auto y = t.year()) {
        c = t;
        return ExplicitPeriod{Granularity::kFY, *y};
      }
    }
  }
  {
    Cursor t = c;
    bool prefix = false;
    if (t.word("fiscal")) {
      t.space();
      if (t.word("year")) t.space();
      prefix = true;
    } else if (t.word("full")) {
      if (t.pos < t.s.size() && (t.s[t.pos] == '-' || t.s[t.pos] == ' ')) ++t.pos;
      if (t.word("year")) {
        t.space();
        if (t.word("fiscal")) t.space();
        prefix = true;
      }
    }
    if (prefix) {
      if (auto y = t.year()) {
        c = t;
        return ExplicitPeriod{Granularity::kFY, *y};
      }
    }
  }
  {
    Cursor t = c;
    if (auto g = ordinal_quarter(t)) {
      if (auto y = ordinal_tail(t)) {
        c = t;
        return ExplicitPeriod{*g, *y};
      }
    }
  }
  {
    Cursor t = c;
    if (auto g = ordinal_half(t)) {
      if (auto y = ordinal_tail(t)) {
        c = t;
        return ExplicitPeriod{*g, *y};
      }
    }
  }
  {
    Cursor t = c;
    if (auto y = t.year()) {
      c = t;
      return ExplicitPeriod{Granularity::kFY, *y};
    }
  }
  return std::nullopt;
}

std::optional<size_t> match_relative(std::string_view s, size_t pos) {
  if (!text::word_boundary_before(s, pos)) return std::nullopt;
  for (std::string_view p : kRelativePhrases) {
    if (matches_at_ci(s, pos, p) && text::word_boundary_after(s, pos + p.size())) {
      return p.size();
    }
  }
  return std::nullopt;
}

}  // namespace

std::vector<PeriodMention> find_period_mentions(std::string_view s) {
  std::vector<PeriodMention> out;
  size_t i = 0;
  while (i < s.size()) {
    if (auto len = match_relative(s, i)) {
      out.push_back({{i, i + *len}, std::string(s.substr(i, *len)), true});
      i += *len;
      continue;
    }
    Cursor c{s, i};
    if (match_explicit(c)) {
      out.push_back({{i, c.pos}, std::string(s.substr(i, c.pos - i)), false});
      i = c.pos;
      continue;
    }
    ++i;
  }
  return out;
}

std::optional<ExplicitPeriod> parse_explicit_period(std::string_view phrase) {
  std::string_view p = text::trim(phrase);
  Cursor c{p, 0};
  auto period = match_explicit(c);
  if (!period || c.pos != p.size()) return std::nullopt;
  return period;
}

bool is_relative_prior_phrase(std::string_view phrase) {
  std::string_view p = text::trim(phrase);
  auto len = match_relative(p, 0);
  return len && *len == p.size();
}

}  // namespace finkpi
