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

#include "phenorag/structured_phenotype.hpp"

#include "phenorag/error.hpp"
#include "phenorag/text.hpp"

namespace phenorag {
namespace {

std::string Normalize(std::string_view code) {
  return ToUpperAscii(Trim(code));
}

}  // namespace

RuleSet DefaultPhRuleSet() {
  RuleSet r;
  r.diagnostic_codes = {
      {Vocabulary::kIcd9, "416", "Chronic pulmonary heart disease"},
      {Vocabulary::kIcd9, "416.0", "Primary pulmonary hypertension"},
      {Vocabulary::kIcd9, "416.1", "Kyphoscoliotic heart disease"},
      {Vocabulary::kIcd9, "416.2", "Chronic pulmonary embolism"},
      {Vocabulary::kIcd9, "416.8", "Other chronic pulmonary heart diseases"},
      {Vocabulary::kIcd9, "416.9",
       "Chronic pulmonary heart disease, unspecified"},
      {Vocabulary::kIcd10, "I27.21",
       "Secondary pulmonary arterial hypertension"},
      {Vocabulary::kIcd10, "I27.22",
       "Pulmonary hypertension due to left heart disease"},
      {Vocabulary::kIcd10, "I27.23",
       "Pulmonary hypertension due to lung diseases and hypoxia"},
      {Vocabulary::kIcd10, "I27.24",
       "Chronic thromboembolic pulmonary hypertension"},
      {Vocabulary::kIcd10, "I27.29", "Other secondary pulmonary hypertension"},
      {Vocabulary::kIcd10, "I27.8",
       "Other specified pulmonary heart diseases"},
      {Vocabulary::kIcd10, "I27.89",
       "Other specified pulmonary heart diseases"},
      {Vocabulary::kIcd10, "I27.9", "Pulmonary heart disease, unspecified"},
  };
  // 1439816 is listed for three drugs in the source table; kept verbatim.
  r.medication_codes = {
      {"1439816", "Ambrisentan"}, {"1439816", "Bosentan"},
      {"8814", "Epoprostenol"},   {"40138", "Iloprost"},
      {"1442132", "Macitentan"},  {"1439816", "Riociguat"},
      {"1729002", "Selexipag"},   {"136411", "Sildenafil"},
      {"358263", "Tadalafil"},    {"343048", "Treprostinil"},
  };
  return r;
}

void ValidateRuleSet(const RuleSet& rules) {
  if (rules.min_code_count == 0) {
    throw ConfigError("rules.min_code_count must be >= 1");
  }
  for (const auto& d : rules.diagnostic_codes) {
    if (Trim(d.code).empty()) throw ConfigError("empty diagnostic code");
    if (d.vocabulary == Vocabulary::kRxNorm) {
      throw ConfigError("diagnostic code " + d.code +
                        " uses the RxNorm vocabulary");
    }
  }
  for (const auto& m : rules.medication_codes) {
    if (Trim(m.code).empty()) throw ConfigError("empty medication code");
  }
}

bool DiagnosisMatches(const RuleSet& rules, const StructuredEvent& event) {
  if (event.vocabulary == Vocabulary::kRxNorm) return false;
  const std::string code = Normalize(event.code);
  for (const auto& d : rules.diagnostic_codes) {
    if (d.vocabulary != event.vocabulary) continue;
    const std::string rule = Normalize(d.code);
    if (code == rule) return true;
    if (rules.prefix_match && code.size() > rule.size() &&
        code.compare(0, rule.size(), rule) == 0) {
      return true;
    }
  }
  return false;
}

bool MedicationMatches(const RuleSet& rules, const StructuredEvent& event) {
  if (event.vocabulary != Vocabulary::kRxNorm) return false;
  const std::string code = Normalize(event.code);
  for (const auto& m : rules.medication_codes) {
    if (code == Normalize(m.code)) return true;
  }
  return false;
}

bool ClassifyStructured(const PatientRecord& record, const RuleSet& rules) {
  std::size_t diagnoses = 0;
  for (const auto& e : record.events) {
    if (MedicationMatches(rules, e)) return true;
    if (DiagnosisMatches(rules, e) && ++diagnoses >= rules.min_code_count) {
      return true;
    }
  }
  return false;
}

}  // namespace phenorag
