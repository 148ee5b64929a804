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

#include <benchmark/benchmark.h>

#include "phenorag/cohort.hpp"
#include "phenorag/mapreduce.hpp"
#include "phenorag/mock_backend.hpp"
#include "phenorag/retrieval.hpp"

namespace phenorag {
namespace {

const Corpus& Cohort() {
  static const Corpus corpus = [] {
    CohortSpec spec;
    spec.n_patients = 200;
    return GenerateCohort(spec);
  }();
  return corpus;
}

std::vector<Snippet> AllSnippets(const ChunkerConfig& cfg) {
  std::vector<Snippet> out;
  for (const auto& [id, rec] : Cohort()) {
    auto s = ChunkPatient(rec, cfg);
    out.insert(out.end(), s.begin(), s.end());
  }
  return out;
}

void BM_ChunkCohort(benchmark::State& state) {
  ChunkerConfig cfg;
  cfg.snippet_size = static_cast<std::size_t>(state.range(0));
  std::size_t n = 0;
  for (auto _ : state) {
    for (const auto& [id, rec] : Cohort()) {
      n += ChunkPatient(rec, cfg).size();
    }
  }
  benchmark::DoNotOptimize(n);
}
BENCHMARK(BM_ChunkCohort)->Arg(64)->Arg(2048);

void BM_RetrieveDefaultPatterns(benchmark::State& state) {
  ChunkerConfig cfg;
  cfg.snippet_size = 64;
  const auto snippets = AllSnippets(cfg);
  PatternSet patterns = DefaultPatternSet();
  if (state.range(0)) patterns.exclude_patterns = EchoCtExclusionPatterns();
  const CompiledPatternSet compiled(patterns);
  for (auto _ : state) {
    benchmark::DoNotOptimize(Retrieve(snippets, compiled));
  }
  state.SetItemsProcessed(state.iterations() *
                          static_cast<int64_t>(snippets.size()));
}
BENCHMARK(BM_RetrieveDefaultPatterns)->Arg(0)->Arg(1);

void BM_MapPhaseMock(benchmark::State& state) {
  ChunkerConfig cfg;
  cfg.snippet_size = 64;
  const CompiledPatternSet patterns(DefaultPatternSet());
  const auto snippets = Retrieve(AllSnippets(cfg), patterns);
  ClientOptions options;
  options.max_concurrency = static_cast<std::size_t>(state.range(0));
  LlmClient client(std::make_shared<MockBackend>(SyntheticOracleConfig()),
                   options);
  const PromptTemplate tmpl = MakeDesignTemplate(PromptDesign::kA);
  for (auto _ : state) {
    benchmark::DoNotOptimize(MapPhase(snippets, tmpl, client));
  }
  state.SetItemsProcessed(state.iterations() *
                          static_cast<int64_t>(snippets.size()));
}
BENCHMARK(BM_MapPhaseMock)->Arg(1)->Arg(8);

void BM_RunCohort(benchmark::State& state) {
  PipelineSettings settings;
  settings.patterns = DefaultPatternSet();
  settings.aggregation = static_cast<AggregationMethod>(state.range(0));
  ClientOptions options;
  options.max_concurrency = 8;
  const Pipeline pipeline(
      settings,
      std::make_shared<LlmClient>(
          std::make_shared<MockBackend>(SyntheticOracleConfig()), options));
  const auto records = Cohort().Select(std::nullopt);
  for (auto _ : state) {
    benchmark::DoNotOptimize(pipeline.RunPatients(records, 4));
  }
}
BENCHMARK(BM_RunCohort)
    ->Arg(static_cast<int>(AggregationMethod::kMax))
    ->Arg(static_cast<int>(AggregationMethod::kLlmDifferentPrompt))
    ->Unit(benchmark::kMillisecond);

}  // namespace
}  // namespace phenorag

BENCHMARK_MAIN();
