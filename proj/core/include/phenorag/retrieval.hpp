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

#ifndef PHENORAG_RETRIEVAL_HPP_
#define PHENORAG_RETRIEVAL_HPP_

#include <cstddef>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "phenorag/corpus.hpp"
#include "phenorag/text.hpp"

namespace phenorag {

enum class TokenizerKind { kWhitespace, kCharBudget };

struct ChunkerConfig {
  std::size_t snippet_size = 2048;
  std::size_t overlap = 0;
  TokenizerKind tokenizer = TokenizerKind::kWhitespace;
  // Only used by kCharBudget; code points per token.
  double chars_per_token = 4.0;

  friend bool operator==(const ChunkerConfig&, const ChunkerConfig&) = default;
};

// Throws ConfigError unless snippet_size > 0, overlap < snippet_size and
// chars_per_token > 0.
void ValidateChunkerConfig(const ChunkerConfig& cfg);

struct Snippet {
  std::string snippet_id;  // "<note_id>:<5-digit index>", sorts per note
  std::string patient_id;
  std::string note_id;
  std::string note_type;
  std::size_t start_token = 0;
  std::size_t end_token = 0;  // exclusive
  std::string text;

  friend bool operator==(const Snippet&, const Snippet&) = default;
};

std::string MakeSnippetId(std::string_view note_id, std::size_t index);

// Token count of `text` under the configured tokenizer.
std::size_t CountTokens(std::string_view text, const ChunkerConfig& cfg);

// Splits one note into consecutive windows of at most snippet_size tokens,
// advancing by snippet_size - overlap. Whitespace snippets hold their tokens
// joined by single spaces; char-budget snippets hold the raw substring.
// Snippets never cross note boundaries. Empty note -> no snippets.
std::vector<Snippet> ChunkNote(const ClinicalNote& note,
                               const ChunkerConfig& cfg);

std::vector<Snippet> ChunkPatient(const PatientRecord& record,
                                  const ChunkerConfig& cfg);

// Pattern strings as loaded from configuration.
struct PatternSet {
  std::vector<std::string> include_patterns;
  std::vector<std::string> exclude_patterns;

  friend bool operator==(const PatternSet&, const PatternSet&) = default;
};

// Include patterns always match case-insensitively; exclude patterns are
// compiled as written (report headers are upper case) and may opt into
// case folding with (?i).
class CompiledPatternSet {
 public:
  // Throws ConfigError if the include list is empty or any pattern fails to
  // compile.
  explicit CompiledPatternSet(const PatternSet& patterns);

  const PatternSet& source() const noexcept { return source_; }

  bool Included(std::string_view text) const;
  bool Excluded(std::string_view text) const;
  // Include-then-exclude: an excluded snippet is dropped even when it also
  // matches an include pattern.
  bool Accepts(std::string_view text) const {
    return Included(text) && !Excluded(text);
  }

 private:
  PatternSet source_;
  std::vector<Regex> include_;
  std::vector<Regex> exclude_;
};

// Snippets accepted by `patterns`, original order kept, first occurrence of
// each snippet_id only.
std::vector<Snippet> Retrieve(const std::vector<Snippet>& snippets,
                              const CompiledPatternSet& patterns);

// Pulmonary hypertension rule set, one line-joined regular expression.
std::string_view DefaultPhPattern();

// Exclusion patterns for echocardiogram and CT report boilerplate.
std::vector<std::string> EchoCtExclusionPatterns();

// Default include list (the PH rule set) with no exclusions.
PatternSet DefaultPatternSet();

// Reads a pattern file: one regex per line; blank lines and lines starting
// with '#' are skipped. Throws IoError.
std::vector<std::string> LoadPatternFile(const std::filesystem::path& path);

}  // namespace phenorag

#endif  // PHENORAG_RETRIEVAL_HPP_
