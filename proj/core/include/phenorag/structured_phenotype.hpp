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

#ifndef PHENORAG_STRUCTURED_PHENOTYPE_HPP_
#define PHENORAG_STRUCTURED_PHENOTYPE_HPP_

#include <cstddef>
#include <string>
#include <vector>

#include "phenorag/corpus.hpp"

namespace phenorag {

struct DiagnosticCode {
  Vocabulary vocabulary = Vocabulary::kIcd10;
  std::string code;
  std::string name;  // documentation only

  friend bool operator==(const DiagnosticCode&,
                         const DiagnosticCode&) = default;
};

struct MedicationCode {
  std::string code;  // RxNorm
  std::string name;  // documentation only

  friend bool operator==(const MedicationCode&,
                         const MedicationCode&) = default;
};

struct RuleSet {
  std::vector<DiagnosticCode> diagnostic_codes;
  std::vector<MedicationCode> medication_codes;
  // Diagnosis events needed for a positive call.
  std::size_t min_code_count = 1;
  // When set, a diagnostic code also matches every code it prefixes
  // ("416" matches "416.8").
  bool prefix_match = false;

  friend bool operator==(const RuleSet&, const RuleSet&) = default;
};

// Pulmonary hypertension phenotype: six ICD-9 and eight ICD-10 diagnosis
// codes plus ten RxNorm entries (Ambrisentan, Bosentan and Riociguat share
// 1439816, so eight distinct medication codes).
RuleSet DefaultPhRuleSet();

// Throws ConfigError for empty codes or min_code_count == 0.
void ValidateRuleSet(const RuleSet& rules);

// Case-insensitive comparison after trimming.
bool DiagnosisMatches(const RuleSet& rules, const StructuredEvent& event);
bool MedicationMatches(const RuleSet& rules, const StructuredEvent& event);

// Positive iff at least min_code_count diagnosis events match, or any
// medication event matches.
bool ClassifyStructured(const PatientRecord& record, const RuleSet& rules);

}  // namespace phenorag

#endif  // PHENORAG_STRUCTURED_PHENOTYPE_HPP_
