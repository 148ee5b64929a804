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

#include "phenorag/app/commands.hpp"

#include <spdlog/spdlog.h>

#include <fstream>
#include <set>

#include "phenorag/cohort.hpp"
#include "phenorag/mapreduce.hpp"
#include "phenorag/structured_phenotype.hpp"

namespace phenorag::app {
namespace fs = std::filesystem;

namespace {

std::string CorpusIdentity(const AppConfig& c) {
  AppConfig id;
  id.corpus_files = c.corpus_files;
  id.synthetic = c.synthetic;
  id.seed = c.seed;
  id.split = c.split;
  const std::string yaml = ToYaml(id);
  // The leading seed/split/corpus block identifies the input.
  return yaml.substr(0, yaml.find("\nchunker:"));
}

std::string JoinLines(const std::vector<std::string>& lines) {
  std::string out;
  for (const auto& l : lines) out += l + "\n";
  return out;
}

std::string LlmFingerprint(const AppConfig& c) {
  const PipelineSettings s = ResolvePipeline(c);
  const BackendConfig b = ResolveBackend(c);
  std::string text = CorpusIdentity(c);
  text += "\nchunk " + std::to_string(s.chunker.snippet_size) + " " +
          std::to_string(s.chunker.overlap) + " " +
          std::to_string(static_cast<int>(s.chunker.tokenizer)) + " " +
          std::to_string(s.chunker.chars_per_token);
  text += "\ninclude\n" + JoinLines(s.patterns.include_patterns);
  if (s.exclusion == ExclusionMode::kRegex) {
    text += "exclude\n" + JoinLines(s.patterns.exclude_patterns);
  }
  text += "exclusion " + std::string(ExclusionName(s.exclusion));
  text += "\nprompt " + s.prompt.design_id + " " +
          std::string(PolarityName(s.prompt.steering_polarity)) + "\n" +
          s.prompt.body + "\n" + JoinLines(s.prompt.amendments);
  text += "aggregation " + std::string(AggregationName(s.aggregation)) + " " +
          std::to_string(s.reduce_token_budget);
  text += "\ngeneration " + std::to_string(s.generation.max_output_tokens) +
          " " + std::to_string(s.generation.temperature);
  if (b.kind == BackendKind::kMock) {
    text += "\nmock " + b.mock.default_response + "\n";
    for (const auto& r : b.mock.rules) {
      text += std::to_string(r.priority) + " " + r.trigger + " -> " +
              r.response_template + "\n";
    }
  } else {
    text += "\nhttp " + b.http.endpoint + " " + b.http.adapter.extra_body;
  }
  return Fingerprint(text);
}

std::string BaselineFingerprint(const AppConfig& c) {
  const RuleSet rules = ResolveRules(c);
  std::string text = CorpusIdentity(c);
  text += "\nrules " + std::to_string(rules.min_code_count) + " " +
          (rules.prefix_match ? "prefix" : "exact") + "\n";
  for (const auto& d : rules.diagnostic_codes) {
    text += std::string(VocabularyName(d.vocabulary)) + " " + d.code + "\n";
  }
  for (const auto& m : rules.medication_codes) text += "RX " + m.code + "\n";
  return Fingerprint(text);
}

std::size_t CountPositives(const std::map<std::string, PatientDecision>& d) {
  std::size_t n = 0;
  for (const auto& [id, dec] : d) n += dec.decision ? 1 : 0;
  return n;
}

std::optional<Split> SplitFilter(const std::string& split) {
  if (split == "all") return std::nullopt;
  auto s = ParseSplit(split);
  if (!s) {
    throw ConfigError("split: unknown value '" + split +
                      "' (expected one of all, train, validation, test)");
  }
  return s;
}

}  // namespace

void WriteText(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out << text;
  if (!out) throw IoError("cannot write " + path.string());
}

int ExitCodeFor(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kConfig:
    case ErrorKind::kInvalidArgument:
      return kExitConfig;
    case ErrorKind::kIo:
      return kExitIo;
    case ErrorKind::kBackend:
      return kExitBackend;
    case ErrorKind::kData:
      return kExitData;
  }
  return kExitInternal;
}

void WriteSyntheticCorpus(const CohortSpec& spec, const fs::path& dir) {
  const Corpus corpus = GenerateCohort(spec);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create " + dir.string() + ": " + ec.message());
  WriteCorpus(corpus, dir / "notes.jsonl", dir / "events.jsonl",
              dir / "labels.csv");
}

Corpus LoadCorpus(const AppConfig& c) {
  if (c.synthetic) return GenerateCohort(EffectiveCohortSpec(c));
  IngestResult r = IngestCorpus(c.corpus_files->notes, c.corpus_files->events,
                                c.corpus_files->labels);
  for (const auto& w : r.warnings) spdlog::warn("{}", w);
  return std::move(r.corpus);
}

RunHeader LlmRunHeader(const AppConfig& c) {
  RunHeader h;
  h.model = "llm";
  h.prompt = std::string(DesignName(c.prompt.design));
  h.aggregation = std::string(AggregationName(c.aggregation));
  h.exclusion = std::string(ExclusionName(c.exclusion));
  h.split = c.split;
  h.fingerprint = LlmFingerprint(c);
  return h;
}

RunHeader BaselineRunHeader(const AppConfig& c) {
  RunHeader h;
  h.model = "structured";
  h.split = c.split;
  h.fingerprint = BaselineFingerprint(c);
  return h;
}

fs::path DefaultLlmOutput(const AppConfig& c) {
  return fs::path(c.output_dir) /
         ("llm_" + std::string(DesignName(c.prompt.design)) + "_" +
          std::string(AggregationName(c.aggregation)) + "_" +
          std::string(ExclusionName(c.exclusion)) + ".jsonl");
}

fs::path DefaultBaselineOutput(const AppConfig& c) {
  return fs::path(c.output_dir) / "structured.jsonl";
}

RunOutcome RunLlm(const AppConfig& c, const Corpus& corpus,
                  std::shared_ptr<LlmClient> client, const fs::path& out) {
  const Pipeline pipeline(ResolvePipeline(c), std::move(client));
  const RunHeader header = LlmRunHeader(c);
  const auto records = corpus.Select(SelectedSplit(c));
  std::set<std::string> selected;
  for (const auto* r : records) selected.insert(r->patient_id);

  RunOutcome outcome;
  outcome.path = out;
  std::map<std::string, PatientDecision> done;
  if (fs::exists(out)) {
    DecisionFile existing = ReadDecisionFile(out);
    if (existing.header != header) {
      throw ConfigError(out.string() +
                        ": existing decisions were produced by a different "
                        "configuration; remove the file or choose another "
                        "output");
    }
    for (auto& [id, d] : existing.decisions) {
      if (selected.contains(id)) done.emplace(id, std::move(d));
    }
    outcome.resumed = done.size();
    // Rewrite without any torn trailing line before appending.
    WriteDecisionFile(out, header, done);
    spdlog::info("resuming {}: {} of {} patients already decided",
                 out.string(), done.size(), records.size());
  }

  std::vector<const PatientRecord*> todo;
  for (const auto* r : records) {
    if (!done.contains(r->patient_id)) todo.push_back(r);
  }
  {
    DecisionAppender appender(out, header);
    pipeline.RunPatients(todo, c.workers, [&](const PatientDecision& d) {
      appender.Append(d);
      done.emplace(d.patient_id, d);
    });
  }
  WriteDecisionFile(out, header, done);
  outcome.patients = done.size();
  outcome.positives = CountPositives(done);
  return outcome;
}

RunOutcome RunBaseline(const AppConfig& c, const Corpus& corpus,
                       const fs::path& out) {
  const RuleSet rules = ResolveRules(c);
  std::map<std::string, PatientDecision> decisions;
  for (const auto* r : corpus.Select(SelectedSplit(c))) {
    PatientDecision d;
    d.patient_id = r->patient_id;
    d.decision = ClassifyStructured(*r, rules);
    decisions.emplace(d.patient_id, std::move(d));
  }
  WriteDecisionFile(out, BaselineRunHeader(c), decisions);
  RunOutcome outcome;
  outcome.path = out;
  outcome.patients = decisions.size();
  outcome.positives = CountPositives(decisions);
  return outcome;
}

LabelMap GoldFromCorpus(const Corpus& corpus, const std::string& split) {
  LabelMap gold;
  for (const auto* r : corpus.Select(SplitFilter(split))) {
    if (r->gold_label) gold[r->patient_id] = *r->gold_label;
  }
  return gold;
}

LabelMap GoldFromLabels(const fs::path& labels, const std::string& split) {
  const std::optional<Split> s = SplitFilter(split);
  LabelMap gold;
  for (const auto& row : ReadLabels(labels)) {
    if (!s || row.split == s) gold[row.patient_id] = row.label;
  }
  return gold;
}

RunSummary SummarizeDecisionFile(const DecisionFile& file) {
  RunSummary s;
  s.model = file.header.model;
  s.prompt = file.header.prompt;
  s.aggregation = file.header.aggregation;
  s.exclusion = file.header.exclusion;
  s.split = file.header.split;
  for (const auto& [id, d] : file.decisions) {
    s.decisions[id] = d.decision;
    auto& types = s.retrieved_note_types[id];
    for (const auto& c : d.contributing) types.push_back(c.note_type);
  }
  return s;
}

EvalReport EvaluateFiles(const std::vector<fs::path>& files,
                         const LabelMap& gold, const std::string& split) {
  std::vector<RunSummary> runs;
  for (const auto& f : files) {
    runs.push_back(SummarizeDecisionFile(ReadDecisionFile(f)));
  }
  return CompareReport(runs, gold, split);
}

GridOutcome RunGrid(const AppConfig& c, const Corpus& corpus,
                    std::shared_ptr<LlmClient> client) {
  const fs::path dir = fs::path(c.output_dir) / "grid";
  GridOutcome outcome;
  outcome.files.push_back(
      RunBaseline(c, corpus, dir / "structured.jsonl").path);
  for (PromptDesign p : c.grid.prompts) {
    for (AggregationMethod a : c.grid.aggregations) {
      for (ExclusionMode e : c.grid.exclusions) {
        AppConfig run = c;
        run.prompt.design = p;
        run.aggregation = a;
        run.exclusion = e;
        run.output_dir = dir.string();
        ValidateConfig(run);
        spdlog::info("grid: prompt {} / {} / {}", DesignName(p),
                     AggregationName(a), ExclusionName(e));
        outcome.files.push_back(
            RunLlm(run, corpus, client, DefaultLlmOutput(run)).path);
      }
    }
  }
  outcome.report =
      EvaluateFiles(outcome.files, GoldFromCorpus(corpus, c.split), c.split);
  WriteText(dir / "report.json", ReportToJson(outcome.report));
  WriteText(dir / "report.txt", RenderReport(outcome.report));
  return outcome;
}

}  // namespace phenorag::app
