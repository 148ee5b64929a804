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

#ifndef PHENORAG_COHORT_HPP_
#define PHENORAG_COHORT_HPP_

#include <cstdint>
#include <string>
#include <vector>

#include "phenorag/corpus.hpp"

namespace phenorag {

// Knobs for the synthetic cohort generator. Every fraction is in [0, 1].
struct CohortSpec {
  std::size_t n_patients = 50;
  double case_fraction = 0.38;
  std::uint64_t seed = 7;

  // Cases whose only textual evidence sits in ECHO/CT reports.
  double imaging_only_case_fraction = 0.1;
  // Controls carrying an imaging report that raises suspicion of disease.
  double control_suspicion_fraction = 0.3;
  // Controls whose clinical notes mention "possible" disease.
  double control_possible_mention_fraction = 0.2;
  // Cases with at least one phenotype diagnosis or medication code.
  double case_code_fraction = 0.5;
  // Controls with a stray phenotype code (coding error).
  double control_code_fraction = 0.05;

  double mean_notes_per_patient = 6;
  std::size_t mean_note_tokens = 250;

  Split split = Split::kTest;

  friend bool operator==(const CohortSpec&, const CohortSpec&) = default;
};

// Throws ConfigError on out-of-range knobs.
void ValidateCohortSpec(const CohortSpec& spec);

// Deterministic: the corpus is a pure function of `spec`. Cases get
// affirmative disease statements in clinical notes (or only in imaging
// reports) and optionally phenotype codes; controls get clean notes,
// "possible" mentions, or imaging suspicion. All patients carry gold labels
// and `spec.split`.
Corpus GenerateCohort(const CohortSpec& spec);

// Phrase banks used by the generator. Exposed for tests and for building
// matching mock oracles.
struct CohortPhrases {
  std::vector<std::string> affirmative;
  std::vector<std::string> possible;
  std::vector<std::string> imaging_case;
  std::vector<std::string> imaging_suspicion;
  std::vector<std::string> filler;
  std::vector<std::string> imaging_filler;
  std::string echo_header;
  std::string ct_header;
};

const CohortPhrases& GeneratorPhrases();

}  // namespace phenorag

#endif  // PHENORAG_COHORT_HPP_
