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

#ifndef PHENORAG_PROMPTING_HPP_
#define PHENORAG_PROMPTING_HPP_

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "phenorag/retrieval.hpp"

namespace phenorag {

// Five zero-shot designs differing in steering, chain-of-thought and
// multiple-choice features:
//   A steering + CoT + multiple choice
//   B steering + CoT
//   C steering + CoT, without "explain your reasoning"
//   D steering + multiple choice
//   E steering only
enum class PromptDesign { kA, kB, kC, kD, kE };

inline constexpr PromptDesign kAllDesigns[] = {
    PromptDesign::kA, PromptDesign::kB, PromptDesign::kC, PromptDesign::kD,
    PromptDesign::kE};

std::string_view DesignName(PromptDesign d);
std::optional<PromptDesign> ParseDesign(std::string_view text);

// How steering maps "history of" and "possible" mentions to answers.
//   kHistoryYes: history -> yes, possible -> no (default)
//   kHistoryNo:  history -> no, possible -> yes
enum class SteeringPolarity { kHistoryYes, kHistoryNo };

std::string_view PolarityName(SteeringPolarity p);
std::optional<SteeringPolarity> ParsePolarity(std::string_view text);

// Amendment that tells the model to ignore ECHO/CT report content.
inline constexpr std::string_view kImagingAmendment = "disregard_imaging";

// Returns the instruction text for a registered amendment id, or nullopt.
std::optional<std::string_view> AmendmentText(std::string_view id);

inline constexpr std::string_view kCotPhrase = "let's think step-by-step";
inline constexpr std::string_view kExplainPhrase = "Explain your reasoning.";

struct PromptTemplate {
  std::string design_id;  // "A".."E", or "any_positive" for aggregation
  bool steering = true;
  SteeringPolarity steering_polarity = SteeringPolarity::kHistoryYes;
  bool cot = false;
  bool multiple_choice = false;
  bool explain_reasoning = true;
  // Placeholders: {snippet} {options} {steering} {cot} {amendments}.
  std::string body;
  std::vector<std::string> amendments;

  friend bool operator==(const PromptTemplate&,
                         const PromptTemplate&) = default;
};

std::string_view DefaultSnippetBody();
std::string_view AnyPositiveBody();

// Feature flags for `design` with the default snippet body.
PromptTemplate MakeDesignTemplate(
    PromptDesign design,
    SteeringPolarity polarity = SteeringPolarity::kHistoryYes);

// Template for the "different prompt" aggregation: asks whether any of the
// collected responses indicated a positive diagnosis.
PromptTemplate MakeAnyPositiveTemplate();

// Reads a template body from a plain text file. Throws IoError.
std::string LoadTemplateBody(const std::filesystem::path& path);

// Throws ConfigError for unknown amendment ids or a body without {snippet}.
void ValidateTemplate(const PromptTemplate& tmpl);

// Placeholders are expanded in a single pass, so text inside the snippet is
// never re-expanded. A line holding only a placeholder that expands to
// nothing is dropped. Throws InvalidArgument for empty snippet text and
// ConfigError for unknown amendments.
std::string RenderPrompt(const PromptTemplate& tmpl,
                         std::string_view snippet_text);
inline std::string RenderPrompt(const PromptTemplate& tmpl,
                                const Snippet& snippet) {
  return RenderPrompt(tmpl, snippet.text);
}

enum class Decision { kPositive, kNegative, kUnparseable };

std::string_view DecisionName(Decision d);
std::optional<Decision> ParseDecisionName(std::string_view text);

struct SnippetVerdict {
  std::string snippet_id;
  Decision decision = Decision::kUnparseable;
  std::string raw_response;
  std::string reasoning;
  // Transport failure that produced this verdict, empty otherwise.
  std::string error;

  friend bool operator==(const SnippetVerdict&,
                         const SnippetVerdict&) = default;
};

// Never throws. Multiple-choice templates look for an "(a)"/"(b)" option
// first; all templates then look for "Answer: yes/no", a leading yes/no, or
// a response whose standalone yes/no tokens all agree. Text following the
// answer token becomes the reasoning.
SnippetVerdict ParseResponse(std::string_view raw, const PromptTemplate& tmpl);

}  // namespace phenorag

#endif  // PHENORAG_PROMPTING_HPP_
