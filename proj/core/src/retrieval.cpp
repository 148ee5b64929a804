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

#include "phenorag/retrieval.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <unordered_set>

#include "phenorag/error.hpp"

namespace phenorag {
namespace {

// Physician-curated pulmonary hypertension patterns. Must stay identical to
// config/patterns/pulmonary_hypertension.txt.
constexpr std::string_view kPhPattern =
    R"((?i)(?:\bPulm.{0,10}hypertension\b|\bPH\b|\bPulm.?HTN\b|\bp.?HTN\b|\bp.?AH\b|\barterial.hypertension\b|\bPHT\b|(?:\belevated\b|\bhigh\b).(?:\bPASP\b|\bpulm.{0,10}art.{0,5}sys|\bpulm.{0,10}art.{0,5}pr|\bPAP\b)|(?:\belevated\b|\bhigh\b).(?:\bRVSP\b|\bRVP\b|\br.{0,5}v.{0,15}sys.{0,7}pressure\b|\br.{0,5}v.{0,15}pressure\b)\b|\bflat.{0,7}septum\b|\bseptal.flat|(?:\benlarge.{0,15}|\bdilat.{0,15})\bpulm.{0,10}art|\bPH-ILD\b|\bPHILD\b|\bCTEPH\b|\bPH-COPD\b|\bPHCOPD\b))";

struct Window {
  std::size_t start;
  std::size_t end;
};

std::vector<Window> Windows(std::size_t token_count, const ChunkerConfig& cfg) {
  std::vector<Window> out;
  if (token_count == 0) return out;
  const std::size_t stride = cfg.snippet_size - cfg.overlap;
  for (std::size_t start = 0;; start += stride) {
    const std::size_t end = std::min(start + cfg.snippet_size, token_count);
    out.push_back({start, end});
    if (end == token_count) break;
  }
  return out;
}

// Code point index at which char-budget token `t` starts.
std::size_t CharBudgetBoundary(std::size_t t, double chars_per_token,
                               std::size_t n_codepoints) {
  const auto cp = static_cast<std::size_t>(
      std::floor(static_cast<double>(t) * chars_per_token));
  return std::min(cp, n_codepoints);
}

std::size_t CharBudgetTokenCount(std::size_t n_codepoints,
                                 double chars_per_token) {
  if (n_codepoints == 0) return 0;
  auto n = static_cast<std::size_t>(
      std::ceil(static_cast<double>(n_codepoints) / chars_per_token));
  // Guard against floating point rounding leaving a trailing sliver.
  while (CharBudgetBoundary(n, chars_per_token, n_codepoints) < n_codepoints) {
    ++n;
  }
  while (n > 1 &&
         CharBudgetBoundary(n - 1, chars_per_token, n_codepoints) >=
             n_codepoints) {
    --n;
  }
  return n;
}

}  // namespace

void ValidateChunkerConfig(const ChunkerConfig& cfg) {
  if (cfg.snippet_size == 0) {
    throw ConfigError("chunker.snippet_size must be > 0");
  }
  if (cfg.overlap >= cfg.snippet_size) {
    throw ConfigError("chunker.overlap must be < chunker.snippet_size");
  }
  if (cfg.tokenizer == TokenizerKind::kCharBudget &&
      !(cfg.chars_per_token > 0)) {
    throw ConfigError("chunker.chars_per_token must be > 0");
  }
}

std::string MakeSnippetId(std::string_view note_id, std::size_t index) {
  char buf[16];
  std::snprintf(buf, sizeof(buf), ":%05zu", index);
  return std::string(note_id) + buf;
}

std::size_t CountTokens(std::string_view text, const ChunkerConfig& cfg) {
  if (cfg.tokenizer == TokenizerKind::kWhitespace) {
    return CountWhitespaceTokens(text);
  }
  return CharBudgetTokenCount(CodepointOffsets(text).size() - 1,
                              cfg.chars_per_token);
}

std::vector<Snippet> ChunkNote(const ClinicalNote& note,
                               const ChunkerConfig& cfg) {
  ValidateChunkerConfig(cfg);
  std::vector<Snippet> out;
  auto make = [&](std::size_t index, const Window& w, std::string text) {
    Snippet s;
    s.snippet_id = MakeSnippetId(note.note_id, index);
    s.patient_id = note.patient_id;
    s.note_id = note.note_id;
    s.note_type = note.note_type;
    s.start_token = w.start;
    s.end_token = w.end;
    s.text = std::move(text);
    out.push_back(std::move(s));
  };

  if (cfg.tokenizer == TokenizerKind::kWhitespace) {
    const auto tokens = WhitespaceTokens(note.text);
    const auto windows = Windows(tokens.size(), cfg);
    for (std::size_t i = 0; i < windows.size(); ++i) {
      std::string text;
      for (std::size_t t = windows[i].start; t < windows[i].end; ++t) {
        if (t > windows[i].start) text += ' ';
        text.append(note.text, tokens[t].begin,
                    tokens[t].end - tokens[t].begin);
      }
      make(i, windows[i], std::move(text));
    }
    return out;
  }

  const auto offsets = CodepointOffsets(note.text);
  const std::size_t n_cp = offsets.size() - 1;
  const std::size_t n_tokens = CharBudgetTokenCount(n_cp, cfg.chars_per_token);
  const auto windows = Windows(n_tokens, cfg);
  for (std::size_t i = 0; i < windows.size(); ++i) {
    const std::size_t cp_begin =
        CharBudgetBoundary(windows[i].start, cfg.chars_per_token, n_cp);
    const std::size_t cp_end =
        CharBudgetBoundary(windows[i].end, cfg.chars_per_token, n_cp);
    make(i, windows[i],
         note.text.substr(offsets[cp_begin],
                          offsets[cp_end] - offsets[cp_begin]));
  }
  return out;
}

std::vector<Snippet> ChunkPatient(const PatientRecord& record,
                                  const ChunkerConfig& cfg) {
  std::vector<Snippet> out;
  for (const auto& note : record.notes) {
    auto part = ChunkNote(note, cfg);
    std::move(part.begin(), part.end(), std::back_inserter(out));
  }
  return out;
}

CompiledPatternSet::CompiledPatternSet(const PatternSet& patterns)
    : source_(patterns) {
  if (patterns.include_patterns.empty()) {
    throw ConfigError("patterns.include must contain at least one pattern");
  }
  for (const auto& p : patterns.include_patterns) {
    include_.emplace_back(p, /*icase=*/true);
  }
  for (const auto& p : patterns.exclude_patterns) {
    exclude_.emplace_back(p, /*icase=*/false);
  }
}

bool CompiledPatternSet::Included(std::string_view text) const {
  for (const auto& re : include_) {
    if (re.Search(text)) return true;
  }
  return false;
}

bool CompiledPatternSet::Excluded(std::string_view text) const {
  for (const auto& re : exclude_) {
    if (re.Search(text)) return true;
  }
  return false;
}

std::vector<Snippet> Retrieve(const std::vector<Snippet>& snippets,
                              const CompiledPatternSet& patterns) {
  std::vector<Snippet> out;
  std::unordered_set<std::string> seen;
  for (const auto& s : snippets) {
    if (!patterns.Accepts(s.text)) continue;
    if (!seen.insert(s.snippet_id).second) continue;
    out.push_back(s);
  }
  return out;
}

std::string_view DefaultPhPattern() { return kPhPattern; }

std::vector<std::string> EchoCtExclusionPatterns() {
  return {
      R"(\bECHOCARDIOGRAM REPORT\b)",
      R"(\bTRANSTHORACIC ECHO(?:CARDIOGRAM)?\b)",
      R"(\bTRANSESOPHAGEAL ECHO(?:CARDIOGRAM)?\b)",
      R"(\bCT (?:CHEST|THORAX|ANGIOGRAM|ANGIOGRAPHY|PULMONARY ANGIOGRAM)\b)",
      R"(\bCTA (?:CHEST|PULMONARY)\b)",
      // IMPRESSION section following an imaging modality mention.
      R"(\b(?:ECHO|TTE|TEE|CT|CTA)\b(?s:.{0,2000}?)\bIMPRESSION:)",
  };
}

PatternSet DefaultPatternSet() {
  return PatternSet{{std::string(kPhPattern)}, {}};
}

std::vector<std::string> LoadPatternFile(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open pattern file " + path.string());
  std::vector<std::string> out;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line.front() == '#') continue;
    out.push_back(line);
  }
  return out;
}

}  // namespace phenorag
