// Copyright 2026 The Phenorag Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef PHENORAG_TEXT_HPP_
#define PHENORAG_TEXT_HPP_

#include <cstddef>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace phenorag {

std::string Trim(std::string_view s);
std::string ToLowerAscii(std::string_view s);
std::string ToUpperAscii(std::string_view s);

struct TokenSpan {
  std::size_t begin = 0;  // byte offset
  std::size_t end = 0;
};

// Maximal runs of non-whitespace bytes.
std::vector<TokenSpan> WhitespaceTokens(std::string_view text);
std::size_t CountWhitespaceTokens(std::string_view text);

// Byte offsets of UTF-8 code point starts, plus a final entry equal to
// text.size(). Continuation bytes are never returned.
std::vector<std::size_t> CodepointOffsets(std::string_view text);

struct RegexMatch {
  std::size_t position = 0;
  std::size_t length = 0;
  // Submatch 1..n; nullopt for groups that did not participate.
  std::vector<std::optional<std::string>> groups;
};

// Perl-syntax regular expression, compiled once and immutable afterwards.
// Python `re` conventions: `.` does not match a newline unless `(?s)` is
// given, `^`/`$` anchor at the text ends unless `(?m)` is given, and inline
// flags such as `(?i)` are honoured. Copies share the compiled program and
// are safe to use from several threads.
class Regex {
 public:
  // Throws ConfigError when the pattern does not compile.
  explicit Regex(std::string pattern, bool icase = false);

  const std::string& pattern() const noexcept { return pattern_; }
  bool icase() const noexcept { return icase_; }

  bool Search(std::string_view text) const;
  std::optional<RegexMatch> Find(std::string_view text,
                                 std::size_t from = 0) const;

 private:
  struct Impl;
  std::string pattern_;
  bool icase_;
  std::shared_ptr<const Impl> impl_;
};

}  // namespace phenorag

#endif  // PHENORAG_TEXT_HPP_
