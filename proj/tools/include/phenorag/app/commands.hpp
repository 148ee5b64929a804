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

#ifndef PHENORAG_APP_COMMANDS_HPP_
#define PHENORAG_APP_COMMANDS_HPP_

#include <filesystem>
#include <memory>
#include <string>
#include <vector>

#include "phenorag/app/config.hpp"
#include "phenorag/corpus.hpp"
#include "phenorag/decision_io.hpp"
#include "phenorag/error.hpp"
#include "phenorag/evaluation.hpp"
#include "phenorag/llm_client.hpp"

namespace phenorag::app {

// Process exit codes by error category.
inline constexpr int kExitOk = 0;
inline constexpr int kExitInternal = 1;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitIo = 3;
inline constexpr int kExitBackend = 4;
inline constexpr int kExitData = 5;

int ExitCodeFor(ErrorKind kind);

// Writes notes.jsonl, events.jsonl and labels.csv under dir.
void WriteSyntheticCorpus(const CohortSpec& spec,
                          const std::filesystem::path& dir);

// Reads the configured files or generates the synthetic cohort.
Corpus LoadCorpus(const AppConfig& config);

RunHeader LlmRunHeader(const AppConfig& config);
RunHeader BaselineRunHeader(const AppConfig& config);

std::filesystem::path DefaultLlmOutput(const AppConfig& config);
std::filesystem::path DefaultBaselineOutput(const AppConfig& config);

struct RunOutcome {
  std::filesystem::path path;
  std::size_t patients = 0;  // decisions in the final file
  std::size_t resumed = 0;   // taken over from an earlier partial run
  std::size_t positives = 0;
};

// Runs the LLM pipeline over the configured split and writes a decisions
// file. Decisions already present in `out` under the same header are kept
// and their patients skipped; a header mismatch raises ConfigError.
RunOutcome RunLlm(const AppConfig& config, const Corpus& corpus,
                  std::shared_ptr<LlmClient> client,
                  const std::filesystem::path& out);

RunOutcome RunBaseline(const AppConfig& config, const Corpus& corpus,
                       const std::filesystem::path& out);

// Gold labels for a split name, or every labelled patient for "all".
LabelMap GoldFromCorpus(const Corpus& corpus, const std::string& split);
LabelMap GoldFromLabels(const std::filesystem::path& labels,
                        const std::string& split);

RunSummary SummarizeDecisionFile(const DecisionFile& file);

EvalReport EvaluateFiles(const std::vector<std::filesystem::path>& files,
                         const LabelMap& gold, const std::string& split);

struct GridOutcome {
  std::vector<std::filesystem::path> files;  // baseline first
  EvalReport report;
};

// Structured baseline plus every prompt x aggregation x exclusion run of
// config.grid, scored against the corpus labels. Files, report.json and
// report.txt land in <output_dir>/grid/.
GridOutcome RunGrid(const AppConfig& config, const Corpus& corpus,
                    std::shared_ptr<LlmClient> client);

// Creates parent directories; IoError on failure.
void WriteText(const std::filesystem::path& path, const std::string& text);

// Command-line entry point; returns the process exit code.
int Main(int argc, char** argv);

}  // namespace phenorag::app

#endif  // PHENORAG_APP_COMMANDS_HPP_
