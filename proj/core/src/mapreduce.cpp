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

#include "phenorag/mapreduce.hpp"

#include <algorithm>
#include <atomic>
#include <mutex>
#include <thread>
#include <unordered_map>

#include "phenorag/error.hpp"
#include "phenorag/text.hpp"

namespace phenorag {
namespace {

// Runs fn(i) for i in [0, n) on up to `workers` threads. The first
// exception thrown by fn is rethrown after all workers stop.
template <typename Fn>
void ParallelFor(std::size_t n, std::size_t workers, Fn&& fn) {
  workers = std::min(workers, n);
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::atomic<bool> failed{false};
  std::exception_ptr error;
  std::mutex error_mu;
  {
    std::vector<std::jthread> threads;
    threads.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) {
      threads.emplace_back([&] {
        for (std::size_t i = next++; i < n && !failed; i = next++) {
          try {
            fn(i);
          } catch (...) {
            std::lock_guard lock(error_mu);
            if (!error) error = std::current_exception();
            failed = true;
          }
        }
      });
    }
  }
  if (error) std::rethrow_exception(error);
}

std::string Block(std::size_t index, const SnippetVerdict& v) {
  std::string out = "Response " + std::to_string(index) + " (" +
                    v.snippet_id + ")\nDecision: " +
                    std::string(DecisionName(v.decision)) + "\nReasoning: ";
  out += v.reasoning.empty() ? "(none)" : v.reasoning;
  return out;
}

std::size_t BlockTokens(std::size_t index, const SnippetVerdict& v) {
  return CountWhitespaceTokens(Block(index, v));
}

std::vector<ContributingSnippet> Contributions(
    const std::vector<SnippetVerdict>& verdicts) {
  std::vector<ContributingSnippet> out;
  out.reserve(verdicts.size());
  for (const auto& v : verdicts) out.push_back({v.snippet_id, "", v.decision});
  return out;
}

}  // namespace

std::string_view AggregationName(AggregationMethod m) {
  switch (m) {
    case AggregationMethod::kMax:
      return "max";
    case AggregationMethod::kLlmSamePrompt:
      return "llm_same_prompt";
    case AggregationMethod::kLlmDifferentPrompt:
      return "llm_different_prompt";
  }
  return "";
}

std::optional<AggregationMethod> ParseAggregation(std::string_view text) {
  const std::string t = ToLowerAscii(Trim(text));
  if (t == "max") return AggregationMethod::kMax;
  if (t == "llm_same_prompt") return AggregationMethod::kLlmSamePrompt;
  if (t == "llm_different_prompt") {
    return AggregationMethod::kLlmDifferentPrompt;
  }
  return std::nullopt;
}

std::string_view ExclusionName(ExclusionMode m) {
  switch (m) {
    case ExclusionMode::kNone:
      return "none";
    case ExclusionMode::kRegex:
      return "regex";
    case ExclusionMode::kPromptAmended:
      return "prompt_amended";
  }
  return "";
}

std::optional<ExclusionMode> ParseExclusion(std::string_view text) {
  const std::string t = ToLowerAscii(Trim(text));
  if (t == "none") return ExclusionMode::kNone;
  if (t == "regex") return ExclusionMode::kRegex;
  if (t == "prompt_amended") return ExclusionMode::kPromptAmended;
  return std::nullopt;
}

std::vector<SnippetVerdict> MapPhase(const std::vector<Snippet>& snippets,
                                     const PromptTemplate& tmpl,
                                     LlmClient& client,
                                     const GenerationParams& params) {
  std::vector<SnippetVerdict> verdicts(snippets.size());
  ParallelFor(snippets.size(), client.options().max_concurrency,
              [&](std::size_t i) {
                const Snippet& s = snippets[i];
                SnippetVerdict v;
                try {
                  const std::string raw = client.Complete(
                      MakeRequest(RenderPrompt(tmpl, s), params));
                  v = ParseResponse(raw, tmpl);
                } catch (const std::exception& e) {
                  v.decision = Decision::kUnparseable;
                  v.error = e.what();
                }
                v.snippet_id = s.snippet_id;
                verdicts[i] = std::move(v);
              });
  std::stable_sort(verdicts.begin(), verdicts.end(),
                   [](const SnippetVerdict& a, const SnippetVerdict& b) {
                     return a.snippet_id < b.snippet_id;
                   });
  return verdicts;
}

PatientDecision ReduceMax(const std::vector<SnippetVerdict>& verdicts) {
  PatientDecision d;
  d.method = AggregationMethod::kMax;
  d.contributing = Contributions(verdicts);
  d.decision = std::any_of(verdicts.begin(), verdicts.end(),
                           [](const SnippetVerdict& v) {
                             return v.decision == Decision::kPositive;
                           });
  for (const auto& v : verdicts) {
    if (!v.error.empty()) ++d.failed_snippets;
    if (v.decision == Decision::kUnparseable) ++d.unparseable_snippets;
  }
  return d;
}

std::string AggregationContext(const std::vector<SnippetVerdict>& verdicts) {
  std::string out;
  for (std::size_t i = 0; i < verdicts.size(); ++i) {
    if (i > 0) out += "\n\n";
    out += Block(i + 1, verdicts[i]);
  }
  return out;
}

PatientDecision ReduceLlm(const std::vector<SnippetVerdict>& verdicts,
                          const PromptTemplate& snippet_template,
                          LlmClient& client, const LlmReduceOptions& options) {
  if (options.mode == AggregationMethod::kMax) {
    throw InvalidArgument("ReduceLlm needs an LLM aggregation mode");
  }
  PatientDecision base = ReduceMax(verdicts);
  base.method = options.mode;
  if (verdicts.empty()) {
    base.decision = false;
    return base;
  }

  static const PromptTemplate kAnyPositive = MakeAnyPositiveTemplate();
  const PromptTemplate& tmpl =
      options.mode == AggregationMethod::kLlmSamePrompt ? snippet_template
                                                        : kAnyPositive;
  std::size_t calls = 0;
  auto reduce_once = [&](const std::vector<SnippetVerdict>& group) {
    ++calls;
    const std::string raw = client.Complete(
        MakeRequest(RenderPrompt(tmpl, AggregationContext(group)),
                    options.generation));
    return ParseResponse(raw, tmpl);
  };

  try {
    std::vector<SnippetVerdict> level = verdicts;
    for (std::size_t depth = 1;; ++depth) {
      std::size_t total = 0;
      for (std::size_t i = 0; i < level.size(); ++i) {
        total += BlockTokens(i + 1, level[i]);
      }
      if (total <= options.token_budget || level.size() == 1) {
        SnippetVerdict final_verdict = reduce_once(level);
        PatientDecision d = base;
        d.decision = final_verdict.decision == Decision::kPositive;
        d.aggregate_response = final_verdict.raw_response;
        d.reduce_calls = calls;
        return d;
      }

      // Greedy packing; at least two responses per group so every level
      // shrinks.
      std::vector<SnippetVerdict> next;
      std::size_t i = 0;
      while (i < level.size()) {
        std::vector<SnippetVerdict> group;
        std::size_t tokens = 0;
        while (i < level.size()) {
          const std::size_t t = BlockTokens(group.size() + 1, level[i]);
          if (group.size() >= 2 && tokens + t > options.token_budget) break;
          tokens += t;
          group.push_back(level[i++]);
        }
        SnippetVerdict merged = reduce_once(group);
        merged.snippet_id = "group " + std::to_string(depth) + "." +
                            std::to_string(next.size() + 1);
        next.push_back(std::move(merged));
      }
      level = std::move(next);
    }
  } catch (const BackendError&) {
    base.method = options.mode;
    base.degraded = true;
    base.reduce_calls = calls;
    return base;
  }
}

PatternSet Pipeline::EffectivePatterns(const PipelineSettings& s) {
  PatternSet p = s.patterns;
  if (s.exclusion != ExclusionMode::kRegex) {
    p.exclude_patterns.clear();
  } else if (p.exclude_patterns.empty()) {
    throw ConfigError(
        "exclusion 'regex' requires at least one patterns.exclude entry");
  }
  return p;
}

Pipeline::Pipeline(PipelineSettings settings,
                   std::shared_ptr<LlmClient> client)
    : settings_(std::move(settings)),
      prompt_(settings_.prompt),
      patterns_(EffectivePatterns(settings_)),
      client_(std::move(client)) {
  if (!client_) throw ConfigError("pipeline has no LLM client");
  ValidateChunkerConfig(settings_.chunker);
  if (settings_.exclusion == ExclusionMode::kPromptAmended &&
      std::find(prompt_.amendments.begin(), prompt_.amendments.end(),
                kImagingAmendment) == prompt_.amendments.end()) {
    prompt_.amendments.emplace_back(kImagingAmendment);
  }
  ValidateTemplate(prompt_);
  if (settings_.reduce_token_budget == 0) {
    throw ConfigError("reduce_token_budget must be > 0");
  }
}

std::vector<Snippet> Pipeline::RetrieveSnippets(
    const PatientRecord& record) const {
  return Retrieve(ChunkPatient(record, settings_.chunker), patterns_);
}

PatientDecision Pipeline::RunPatient(const PatientRecord& record) const {
  const std::vector<Snippet> snippets = RetrieveSnippets(record);
  const auto verdicts =
      MapPhase(snippets, prompt_, *client_, settings_.generation);

  PatientDecision d;
  if (settings_.aggregation == AggregationMethod::kMax) {
    d = ReduceMax(verdicts);
  } else {
    LlmReduceOptions opts;
    opts.mode = settings_.aggregation;
    opts.token_budget = settings_.reduce_token_budget;
    opts.generation = settings_.generation;
    d = ReduceLlm(verdicts, prompt_, *client_, opts);
  }
  d.patient_id = record.patient_id;

  std::unordered_map<std::string_view, std::string_view> types;
  for (const auto& s : snippets) types.emplace(s.snippet_id, s.note_type);
  for (auto& c : d.contributing) {
    if (auto it = types.find(c.snippet_id); it != types.end()) {
      c.note_type = std::string(it->second);
    }
  }
  return d;
}

std::vector<PatientDecision> Pipeline::RunPatients(
    std::span<const PatientRecord* const> records,
    std::size_t patient_workers,
    const std::function<void(const PatientDecision&)>& on_decision) const {
  std::vector<PatientDecision> out(records.size());
  std::mutex mu;
  ParallelFor(records.size(), std::max<std::size_t>(1, patient_workers),
              [&](std::size_t i) {
                PatientDecision d = RunPatient(*records[i]);
                if (on_decision) {
                  std::lock_guard lock(mu);
                  on_decision(d);
                }
                out[i] = std::move(d);
              });
  return out;
}

}  // namespace phenorag
