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

#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include <iostream>

#include "CLI11.hpp"
#include "phenorag/app/commands.hpp"
#include "phenorag/http_backend.hpp"

namespace phenorag::app {
namespace fs = std::filesystem;
namespace {

struct CommonFlags {
  std::string config;
  std::vector<std::string> sets;
  std::vector<std::string> flag_sets;  // applied after --set, so flags win

  AppConfig Load() const {
    std::vector<std::string> all = sets;
    all.insert(all.end(), flag_sets.begin(), flag_sets.end());
    return config.empty() ? DefaultConfig(all) : LoadConfig(config, all);
  }
};

using KeyedFlags = std::vector<std::pair<std::string, std::string>>;

// --config, --set, and one option per (flag, key) that becomes key=value.
void AddCommon(CLI::App* cmd, CommonFlags& f, const KeyedFlags& keyed) {
  cmd->add_option("-c,--config", f.config, "YAML run configuration")
      ->check(CLI::ExistingFile);
  cmd->add_option("--set", f.sets,
                  "Override a configuration value (key.path=value)");
  for (const auto& [flag, key] : keyed) {
    cmd->add_option_function<std::string>(
        flag,
        [&f, key = key](const std::string& v) {
          f.flag_sets.push_back(key + "=" + v);
        },
        "Sets " + key);
  }
}

void AddListFlag(CLI::App* cmd, CommonFlags& f, const std::string& flag,
                 const std::string& key, const std::string& help) {
  cmd->add_option_function<std::string>(
      flag,
      [&f, key](const std::string& v) {
        f.flag_sets.push_back(key + "=[" + v + "]");
      },
      help);
}

void LogClientStats(const LlmClient& client) {
  const ClientStats s = client.stats();
  spdlog::info("llm requests: {} ({} attempts, {} failed), peak in flight {}",
               s.requests, s.attempts, s.failures, s.peak_in_flight);
}

void PrintOutcome(const RunOutcome& r) {
  std::cout << r.path.string() << ": " << r.patients << " patients, "
            << r.positives << " positive";
  if (r.resumed > 0) std::cout << " (" << r.resumed << " resumed)";
  std::cout << "\n";
}

}  // namespace

int Main(int argc, char** argv) {
  CLI::App app{"Pulmonary hypertension phenotyping from clinical notes"};
  app.require_subcommand(1);
  bool quiet = false;
  bool verbose = false;
  app.add_flag("-q,--quiet", quiet, "Only log warnings and errors");
  app.add_flag("-v,--verbose", verbose, "Debug logging");

  const KeyedFlags run_flags = {
      {"--seed", "seed"},
      {"--split", "split"},
      {"--output-dir", "output_dir"},
      {"--workers", "workers"},
      {"--prompt", "prompt.design"},
      {"--polarity", "prompt.polarity"},
      {"--aggregation", "aggregation.method"},
      {"--exclusion", "exclusion"},
      {"--backend", "backend.kind"},
      {"--max-concurrency", "backend.client.max_concurrency"}};

  CommonFlags synth_f;
  std::string synth_dir;
  auto* synth = app.add_subcommand("synth", "Write a synthetic cohort");
  AddCommon(synth, synth_f,
            {{"--seed", "seed"},
             {"--n-patients", "corpus.synthetic.n_patients"},
             {"--case-fraction", "corpus.synthetic.case_fraction"},
             {"--cohort-split", "corpus.synthetic.split"}});
  synth->add_option("-o,--out", synth_dir, "Output directory")->required();

  CommonFlags run_f;
  std::string run_out;
  auto* run = app.add_subcommand("run", "Run the LLM pipeline");
  AddCommon(run, run_f, run_flags);
  run->add_option("-o,--out", run_out, "Decisions file");

  CommonFlags base_f;
  std::string base_out;
  auto* baseline =
      app.add_subcommand("baseline", "Run the structured-code baseline");
  AddCommon(baseline, base_f,
            {{"--seed", "seed"},
             {"--split", "split"},
             {"--output-dir", "output_dir"},
             {"--min-code-count", "rules.min_code_count"},
             {"--prefix-match", "rules.prefix_match"}});
  baseline->add_option("-o,--out", base_out, "Decisions file");

  CommonFlags eval_f;
  std::vector<std::string> eval_files;
  std::string eval_labels;
  std::string eval_split = "all";
  std::string eval_json;
  auto* eval = app.add_subcommand("eval", "Score decision files");
  eval->add_option("files", eval_files, "Decision files")
      ->required()
      ->check(CLI::ExistingFile);
  eval->add_option("--labels", eval_labels, "Labels CSV")
      ->check(CLI::ExistingFile);
  AddCommon(eval, eval_f, {});
  eval->add_option("--split", eval_split, "Split to evaluate, or 'all'");
  eval->add_option("--json", eval_json, "Write the structured report here");

  CommonFlags grid_f;
  auto* grid = app.add_subcommand(
      "grid", "Run the prompt x aggregation x exclusion grid and score it");
  AddCommon(grid, grid_f, run_flags);
  AddListFlag(grid, grid_f, "--prompts", "grid.prompts",
              "Comma-separated prompt designs");
  AddListFlag(grid, grid_f, "--aggregations", "grid.aggregations",
              "Comma-separated aggregation methods");
  AddListFlag(grid, grid_f, "--exclusions", "grid.exclusions",
              "Comma-separated exclusion modes");

  CommonFlags show_f;
  auto* show =
      app.add_subcommand("config", "Print the normalized configuration");
  AddCommon(show, show_f, run_flags);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitConfig;
  }

  auto logger = spdlog::get("phenorag");
  if (!logger) {
    logger = spdlog::stderr_color_mt("phenorag");
    logger->set_pattern("%^[%l]%$ %v");
  }
  spdlog::set_default_logger(logger);
  spdlog::set_level(quiet     ? spdlog::level::warn
                    : verbose ? spdlog::level::debug
                              : spdlog::level::info);

  try {
    if (*synth) {
      const AppConfig c = synth_f.Load();
      if (!c.synthetic) {
        throw ConfigError("corpus: synth needs a 'synthetic' corpus source");
      }
      const CohortSpec spec = EffectiveCohortSpec(c);
      WriteSyntheticCorpus(spec, synth_dir);
      spdlog::info("wrote {} patients to {}", spec.n_patients, synth_dir);
    } else if (*run) {
      const AppConfig c = run_f.Load();
      // Backend misconfiguration fails here, before any request.
      auto client = MakeClient(ResolveBackend(c));
      const Corpus corpus = LoadCorpus(c);
      const fs::path out =
          run_out.empty() ? DefaultLlmOutput(c) : fs::path(run_out);
      PrintOutcome(RunLlm(c, corpus, client, out));
      LogClientStats(*client);
    } else if (*baseline) {
      const AppConfig c = base_f.Load();
      const Corpus corpus = LoadCorpus(c);
      const fs::path out =
          base_out.empty() ? DefaultBaselineOutput(c) : fs::path(base_out);
      PrintOutcome(RunBaseline(c, corpus, out));
    } else if (*eval) {
      if (eval_labels.empty() == eval_f.config.empty()) {
        throw ConfigError("eval: give exactly one of --labels or --config");
      }
      const LabelMap gold =
          eval_labels.empty()
              ? GoldFromCorpus(LoadCorpus(eval_f.Load()), eval_split)
              : GoldFromLabels(eval_labels, eval_split);
      const std::vector<fs::path> files(eval_files.begin(), eval_files.end());
      const EvalReport report = EvaluateFiles(files, gold, eval_split);
      if (!eval_json.empty()) WriteText(eval_json, ReportToJson(report));
      std::cout << RenderReport(report);
    } else if (*grid) {
      const AppConfig c = grid_f.Load();
      auto client = MakeClient(ResolveBackend(c));
      const Corpus corpus = LoadCorpus(c);
      const GridOutcome g = RunGrid(c, corpus, client);
      LogClientStats(*client);
      std::cout << RenderReport(g.report);
    } else if (*show) {
      std::cout << ToYaml(show_f.Load());
    }
  } catch (const Error& e) {
    spdlog::error("{} error: {}", ErrorKindName(e.kind()), e.what());
    return ExitCodeFor(e.kind());
  } catch (const fs::filesystem_error& e) {
    spdlog::error("io error: {}", e.what());
    return kExitIo;
  } catch (const std::exception& e) {
    spdlog::error("internal error: {}", e.what());
    return kExitInternal;
  }
  return kExitOk;
}

}  // namespace phenorag::app
