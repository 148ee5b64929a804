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

#ifndef PHENORAG_EVALUATION_HPP_
#define PHENORAG_EVALUATION_HPP_

#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "phenorag/retrieval.hpp"

namespace phenorag {

struct ConfusionMatrix {
  std::size_t tp = 0;
  std::size_t fp = 0;
  std::size_t fn = 0;
  std::size_t tn = 0;

  std::size_t total() const { return tp + fp + fn + tn; }
  friend bool operator==(const ConfusionMatrix&,
                         const ConfusionMatrix&) = default;
};

struct Metrics {
  double precision = 0;
  double recall = 0;
  double f1 = 0;
};

// Ratios with a zero denominator are 0, so f1 is 0 when p + r = 0.
Metrics ComputeMetrics(const ConfusionMatrix& cm);

using LabelMap = std::map<std::string, bool>;

// Counts over the gold patients. Decisions for patients outside `gold` are
// ignored; gold patients without a decision raise DataError listing them.
ConfusionMatrix Score(const LabelMap& decisions, const LabelMap& gold);

struct NoteTypeShare {
  std::string note_type;
  std::size_t count = 0;
  double fraction = 0;
};

// Share of retrieved snippets per note type. The `top_k` most frequent
// types are named (ties by name); the rest, and any type literally called
// "Other", are pooled into a trailing "Other" row. Empty input -> empty.
std::vector<NoteTypeShare> NoteTypeDistribution(
    std::span<const std::string> note_types, std::size_t top_k = 6);
std::vector<NoteTypeShare> NoteTypeDistribution(
    std::span<const Snippet> retrieved, std::size_t top_k = 6);

// One evaluated configuration.
struct RunSummary {
  std::string model;  // "llm" or "structured"
  std::optional<std::string> prompt;
  std::optional<std::string> aggregation;
  std::optional<std::string> exclusion;
  std::string split = "all";  // split the decisions were produced for
  LabelMap decisions;
  // Note type of every retrieved snippet, by patient (LLM runs).
  std::map<std::string, std::vector<std::string>> retrieved_note_types;
};

struct ReportRow {
  std::string model;
  std::optional<std::string> prompt;
  std::optional<std::string> aggregation;
  std::optional<std::string> exclusion;
  ConfusionMatrix confusion;
  Metrics metrics;
};

struct EvalReport {
  std::string split;
  std::vector<ReportRow> rows;  // input order
  // Over the first LLM run's retrieved snippets for the evaluated patients.
  std::vector<NoteTypeShare> note_types;
};

// Scores every run against `gold` (already restricted to `split`). A run
// produced for a different split raises DataError.
EvalReport CompareReport(const std::vector<RunSummary>& runs,
                         const LabelMap& gold, const std::string& split);

// Structured form (the contract): {"split", "rows":[...], "grid":{...},
// "note_type_distribution":[...]}; field names are listed in the README.
std::string ReportToJson(const EvalReport& report);

// Aligned text: a comparison table, the prompt x (aggregation, exclusion)
// F1 grid when LLM rows exist, and the note type distribution.
std::string RenderReport(const EvalReport& report);

}  // namespace phenorag

#endif  // PHENORAG_EVALUATION_HPP_
