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

#ifndef PHENORAG_APP_CONFIG_HPP_
#define PHENORAG_APP_CONFIG_HPP_

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "phenorag/cohort.hpp"
#include "phenorag/corpus.hpp"
#include "phenorag/http_backend.hpp"
#include "phenorag/mapreduce.hpp"
#include "phenorag/prompting.hpp"
#include "phenorag/retrieval.hpp"
#include "phenorag/structured_phenotype.hpp"

namespace phenorag::app {

struct CorpusFiles {
  std::string notes;
  std::string events;
  std::string labels;
  friend bool operator==(const CorpusFiles&, const CorpusFiles&) = default;
};

// Pattern lists are inline unless a file is named; a named file replaces
// the corresponding list.
struct PatternConfig {
  std::vector<std::string> include = {std::string(DefaultPhPattern())};
  std::vector<std::string> exclude = EchoCtExclusionPatterns();
  std::string include_file;
  std::string exclude_file;
  friend bool operator==(const PatternConfig&, const PatternConfig&) = default;
};

struct PromptConfig {
  PromptDesign design = PromptDesign::kA;
  SteeringPolarity polarity = SteeringPolarity::kHistoryYes;
  std::string template_file;  // replaces the default body when set
  std::vector<std::string> amendments;
  friend bool operator==(const PromptConfig&, const PromptConfig&) = default;
};

struct RulesConfig {
  std::string file;  // YAML code list; empty for the built-in rule set
  std::size_t min_code_count = 1;
  bool prefix_match = false;
  friend bool operator==(const RulesConfig&, const RulesConfig&) = default;
};

struct GridConfig {
  std::vector<PromptDesign> prompts = {std::begin(kAllDesigns),
                                       std::end(kAllDesigns)};
  std::vector<AggregationMethod> aggregations = {
      AggregationMethod::kLlmSamePrompt, AggregationMethod::kLlmDifferentPrompt,
      AggregationMethod::kMax};
  std::vector<ExclusionMode> exclusions = {ExclusionMode::kNone};
  friend bool operator==(const GridConfig&, const GridConfig&) = default;
};

struct AppConfig {
  // Exactly one corpus source. The synthetic spec's seed is the global
  // seed below.
  std::optional<CorpusFiles> corpus_files;
  std::optional<CohortSpec> synthetic = CohortSpec{};
  std::uint64_t seed = 7;
  std::string split = "all";  // patients processed: a split name or "all"
  std::string output_dir = "out";
  std::size_t workers = 4;  // patients in flight

  ChunkerConfig chunker;
  PatternConfig patterns;
  ExclusionMode exclusion = ExclusionMode::kNone;
  PromptConfig prompt;
  AggregationMethod aggregation = AggregationMethod::kMax;
  std::size_t reduce_token_budget = 2048;

  BackendKind backend = BackendKind::kMock;
  std::string mock_rules_file;  // empty for the synthetic-cohort oracle
  HttpConfig http;
  ClientOptions client;
  GenerationParams generation;

  RulesConfig rules;
  GridConfig grid;

  friend bool operator==(const AppConfig&, const AppConfig&) = default;
};

// Parses YAML text. Unknown keys, wrong types and bad enum values raise
// ConfigError naming the offending key path. "key.path=value" overrides are
// applied in order before validation.
AppConfig ParseConfig(std::string_view yaml,
                      const std::vector<std::string>& overrides = {});
// Reads a config file (IoError when unreadable).
AppConfig LoadConfig(const std::filesystem::path& path,
                     const std::vector<std::string>& overrides = {});
// Default configuration with overrides applied (no file).
AppConfig DefaultConfig(const std::vector<std::string>& overrides = {});

// Normalized YAML with every field spelled out; ParseConfig(ToYaml(c)) == c.
std::string ToYaml(const AppConfig& config);

// Throws ConfigError when the configuration is inconsistent.
void ValidateConfig(const AppConfig& config);

// Resolved building blocks.
CohortSpec EffectiveCohortSpec(const AppConfig& config);
PatternSet ResolvePatterns(const AppConfig& config);
PromptTemplate ResolvePrompt(const AppConfig& config);
PipelineSettings ResolvePipeline(const AppConfig& config);
BackendConfig ResolveBackend(const AppConfig& config);
RuleSet ResolveRules(const AppConfig& config);
MockConfig LoadMockRules(const std::filesystem::path& path);
RuleSet LoadRuleFile(const std::filesystem::path& path);

// nullopt for "all".
std::optional<Split> SelectedSplit(const AppConfig& config);

}  // namespace phenorag::app

#endif  // PHENORAG_APP_CONFIG_HPP_
