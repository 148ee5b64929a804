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

#ifndef PHENORAG_MAPREDUCE_HPP_
#define PHENORAG_MAPREDUCE_HPP_

#include <cstddef>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "phenorag/corpus.hpp"
#include "phenorag/llm_client.hpp"
#include "phenorag/prompting.hpp"
#include "phenorag/retrieval.hpp"

namespace phenorag {

enum class AggregationMethod { kMax, kLlmSamePrompt, kLlmDifferentPrompt };

std::string_view AggregationName(AggregationMethod m);
std::optional<AggregationMethod> ParseAggregation(std::string_view text);

// How ECHO/CT report snippets are kept away from the decision.
enum class ExclusionMode { kNone, kRegex, kPromptAmended };

std::string_view ExclusionName(ExclusionMode m);
std::optional<ExclusionMode> ParseExclusion(std::string_view text);

struct ContributingSnippet {
  std::string snippet_id;
  std::string note_type;
  Decision decision = Decision::kUnparseable;

  friend bool operator==(const ContributingSnippet&,
                         const ContributingSnippet&) = default;
};

struct PatientDecision {
  std::string patient_id;
  bool decision = false;
  // nullopt for the structured (rules) baseline.
  std::optional<AggregationMethod> method;
  std::vector<ContributingSnippet> contributing;  // snippet_id order
  std::optional<std::string> aggregate_response;
  // LLM reduce failed and the decision fell back to max aggregation.
  bool degraded = false;
  std::size_t reduce_calls = 0;
  std::size_t failed_snippets = 0;
  std::size_t unparseable_snippets = 0;

  friend bool operator==(const PatientDecision&,
                         const PatientDecision&) = default;
};

// One completion per snippet, issued concurrently through `client`.
// Verdicts come back sorted by snippet_id whatever the completion order.
// Transport failures become unparseable verdicts with `error` set.
std::vector<SnippetVerdict> MapPhase(const std::vector<Snippet>& snippets,
                                     const PromptTemplate& tmpl,
                                     LlmClient& client,
                                     const GenerationParams& params = {});

// decision = some verdict is positive. Negative and unparseable verdicts
// count as false.
PatientDecision ReduceMax(const std::vector<SnippetVerdict>& verdicts);

// Decision and reasoning of each response, one block per verdict:
//   Response <k> (<label>)
//   Decision: <positive|negative|unparseable>
//   Reasoning: <text>
// Blocks are separated by a blank line.
std::string AggregationContext(const std::vector<SnippetVerdict>& verdicts);

struct LlmReduceOptions {
  AggregationMethod mode = AggregationMethod::kLlmDifferentPrompt;
  // Whitespace-token budget for one aggregation context; larger contexts
  // are reduced hierarchically in groups.
  std::size_t token_budget = 2048;
  GenerationParams generation;
};

// Aggregates verdicts with one or more completions. The same-prompt mode
// wraps the context in `snippet_template`; the different-prompt mode wraps
// it in the any-positive template. Zero verdicts -> false without a call.
// A backend failure falls back to ReduceMax with `degraded` set.
PatientDecision ReduceLlm(const std::vector<SnippetVerdict>& verdicts,
                          const PromptTemplate& snippet_template,
                          LlmClient& client, const LlmReduceOptions& options);

struct PipelineSettings {
  ChunkerConfig chunker;
  PatternSet patterns;  // exclude list applies only under ExclusionMode::kRegex
  ExclusionMode exclusion = ExclusionMode::kNone;
  PromptTemplate prompt = MakeDesignTemplate(PromptDesign::kA);
  AggregationMethod aggregation = AggregationMethod::kMax;
  std::size_t reduce_token_budget = 2048;
  GenerationParams generation;
};

// Validated, compiled form of PipelineSettings bound to a client.
class Pipeline {
 public:
  // Throws ConfigError for invalid chunker, patterns or template, or regex
  // exclusion without exclude patterns.
  Pipeline(PipelineSettings settings, std::shared_ptr<LlmClient> client);

  const PipelineSettings& settings() const noexcept { return settings_; }
  // Template with amendments implied by the exclusion mode.
  const PromptTemplate& prompt() const noexcept { return prompt_; }
  const CompiledPatternSet& patterns() const noexcept { return patterns_; }
  LlmClient& client() const noexcept { return *client_; }

  std::vector<Snippet> RetrieveSnippets(const PatientRecord& record) const;

  // chunk -> retrieve -> map -> reduce.
  PatientDecision RunPatient(const PatientRecord& record) const;

  // Runs patients on `patient_workers` threads (snippet calls still share
  // the client's admission limit). `on_decision` is called serially as
  // each patient finishes. The result is in input order.
  std::vector<PatientDecision> RunPatients(
      std::span<const PatientRecord* const> records,
      std::size_t patient_workers,
      const std::function<void(const PatientDecision&)>& on_decision = {})
      const;

 private:
  static PatternSet EffectivePatterns(const PipelineSettings& s);

  PipelineSettings settings_;
  PromptTemplate prompt_;
  CompiledPatternSet patterns_;
  std::shared_ptr<LlmClient> client_;
};

}  // namespace phenorag

#endif  // PHENORAG_MAPREDUCE_HPP_
