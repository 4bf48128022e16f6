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

// ASCII text helpers shared by the parsers. Not part of the public API.

#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace finkpi::text {

inline constexpr std::string_view kEnDash = "\xE2\x80\x93";

inline bool is_digit(char c) { return c >= '0' && c <= '9'; }
inline bool is_alpha(char c) {
  return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z');
}
inline bool is_alnum(char c) { return is_digit(c) || is_alpha(c); }
inline bool is_space(char c) {
  return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' ||
         c == '\v';
}
inline char lower(char c) {
  return (c >= 'A' && c <= 'Z') ? static_cast<char>(c - 'A' + 'a') : c;
}
inline char upper(char c) {
  return (c >= 'a' && c <= 'z') ? static_cast<char>(c - 'a' + 'A') : c;
}

inline std::string to_lower(std::string_view s) {
  std::string out(s);
  for (char& c : out) c = lower(c);
  return out;
}

inline std::string_view trim(std::string_view s) {
  size_t b = 0;
  size_t e = s.size();
  while (b < e && is_space(s[b])) ++b;
  while (e > b && is_space(s[e - 1])) --e;
  return s.substr(b, e - b);
}

// Case-insensitive comparison of `needle` against `hay` at `pos`.
inline bool matches_at_ci(std::string_view hay, size_t pos,
                          std::string_view needle) {
  if (pos + needle.size() > hay.size()) return false;
  for (size_t i = 0; i < needle.size(); ++i) {
    if (lower(hay[pos + i]) != lower(needle[i])) return false;
  }
  return true;
}

inline bool word_boundary_before(std::string_view s, size_t pos) {
  return pos == 0 || !is_alnum(s[pos - 1]);
}
inline bool word_boundary_after(std::string_view s, size_t end) {
  return end >= s.size() || !is_alnum(s[end]);
}

// All case-insensitive whole-word occurrences of `needle` in `hay`.
inline std::vector<size_t> find_words_ci(std::string_view hay,
                                         std::string_view needle) {
  std::vector<size_t> out;
  if (needle.empty() || needle.size() > hay.size()) return out;
  for (size_t i = 0; i + needle.size() <= hay.size(); ++i) {
    if (matches_at_ci(hay, i, needle) && word_boundary_before(hay, i) &&
        word_boundary_after(hay, i + needle.size())) {
      out.push_back(i);
    }
  }
  return out;
}

// Distance between two half-open intervals; 0 when they touch or overlap.
inline size_t interval_distance(size_t a_start, size_t a_end, size_t b_start,
                                size_t b_end) {
  if (a_end <= b_start) return b_start - a_end;
  if (b_end <= a_start) return a_start - b_end;
  return 0;
}

}  // namespace finkpi::text
