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

// Corpus ingest: decoding raw filings, layout segmentation and numeric span
// detection. Everything here is a pure function of its inputs.

#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "finkpi/document.hpp"

namespace finkpi::ingest {

enum class InputFormat { kPlainText, kHtml };

// Layout cues recovered from markup. Ranges index into the stripped text.
struct MarkupHints {
  std::vector<CharRange> tables;
  std::vector<CharRange> headings;
};

struct StrippedHtml {
  std::string text;
  MarkupHints hints;
};

bool is_valid_utf8(std::string_view bytes);

// Removes tags, comments, script/style bodies; decodes entities; emits tab
// separators between table cells and newlines between rows and blocks.
StrippedHtml strip_html(std::string_view html);

// CRLF/CR to LF, non-breaking spaces to spaces, trailing blanks per line
// dropped, leading/trailing blank lines removed.
std::string normalize_text(std::string_view text);

// Throws Error(kDecodeError) on invalid UTF-8 and Error(kEmptyDocument)
// when nothing but whitespace remains.
Document load_document(std::string_view bytes, InputFormat format,
                       DocumentMeta meta);

// Boundaries: a blank line (two or more consecutive newlines) separates
// blocks; a short all-caps or title-case line followed by body text becomes a
// Header; two or more consecutive lines with at least two tab or
// multi-space delimited columns become a Table. Always returns at least one
// section. Returned sections carry no numeric spans yet.
std::vector<Section> segment_sections(std::string_view raw_text,
                                      const MarkupHints* hints = nullptr);

// Face values only; scale words are recorded in unit_token but never applied.
std::vector<NumericSpan> detect_numeric_spans(const Section& section);

// Sentence boundaries inside a section body. Table sections split per line.
std::vector<CharRange> split_sentences(std::string_view body,
                                       SectionKind kind = SectionKind::kNarrative);

}  // namespace finkpi::ingest
