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

#ifndef PHENORAG_CORPUS_HPP_
#define PHENORAG_CORPUS_HPP_

#include <chrono>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace phenorag {

using Date = std::chrono::year_month_day;

// Strict ISO-8601 calendar date (YYYY-MM-DD). Throws DataError.
Date ParseDate(std::string_view text);
std::string FormatDate(const Date& date);

enum class Vocabulary { kIcd9, kIcd10, kRxNorm };

std::string_view VocabularyName(Vocabulary v);
// Accepts "ICD9", "ICD-9", "ICD10", "ICD-10", "RxNorm" in any case.
std::optional<Vocabulary> ParseVocabulary(std::string_view text);

enum class Split { kTrain, kValidation, kTest };

std::string_view SplitName(Split s);
std::optional<Split> ParseSplit(std::string_view text);

// Note types form an open set; these are the labels the generator uses for
// its named buckets.
namespace note_types {
inline constexpr std::string_view kProgressNote = "Progress Note";
inline constexpr std::string_view kConsult = "Consult";
inline constexpr std::string_view kDischargeSummary = "Discharge Summary";
inline constexpr std::string_view kHistoryAndPhysical =
    "History & Physical Exam";
inline constexpr std::string_view kProcedure = "Procedure";
inline constexpr std::string_view kTelephoneEncounter = "Telephone Encounter";
inline constexpr std::string_view kOther = "Other";
}  // namespace note_types

struct ClinicalNote {
  std::string note_id;
  std::string patient_id;
  std::string note_type;
  Date timestamp;
  std::string text;

  friend bool operator==(const ClinicalNote&, const ClinicalNote&) = default;
};

struct StructuredEvent {
  std::string patient_id;
  Vocabulary vocabulary = Vocabulary::kIcd10;
  std::string code;
  Date date;

  friend bool operator==(const StructuredEvent&,
                         const StructuredEvent&) = default;
};

struct PatientRecord {
  std::string patient_id;
  std::vector<ClinicalNote> notes;
  std::vector<StructuredEvent> events;
  std::optional<bool> gold_label;
  std::optional<Split> split;

  friend bool operator==(const PatientRecord&, const PatientRecord&) = default;
};

// Immutable-after-construction collection of patients keyed by patient_id.
// Iteration order is patient_id order.
class Corpus {
 public:
  using Map = std::map<std::string, PatientRecord>;

  Corpus() = default;
  explicit Corpus(Map patients) : patients_(std::move(patients)) {}

  const Map& patients() const noexcept { return patients_; }
  std::size_t size() const noexcept { return patients_.size(); }
  bool empty() const noexcept { return patients_.empty(); }

  const PatientRecord* Find(std::string_view patient_id) const;
  auto begin() const { return patients_.begin(); }
  auto end() const { return patients_.end(); }

  // Patients whose split equals `split` (all patients when nullopt).
  std::vector<const PatientRecord*> Select(std::optional<Split> split) const;

  friend bool operator==(const Corpus&, const Corpus&) = default;

 private:
  Map patients_;
};

struct LabelRow {
  std::string patient_id;
  bool label = false;
  std::optional<Split> split;
  std::size_t line = 0;  // 1-based line in the source file
};

// Reads a labels CSV (header: patient_id,label,split; split may be empty).
// Labels are 1/0, true/false or case/control. Throws IoError, or DataError naming
// file and line for malformed rows and duplicate patients.
std::vector<LabelRow> ReadLabels(const std::filesystem::path& labels_path);

struct IngestResult {
  Corpus corpus;
  std::vector<std::string> warnings;
};

// Reads a notes JSONL file, an events JSONL file and a labels CSV
// (header: patient_id,label,split). Malformed lines raise DataError naming
// file and line; duplicate note_ids raise DataError. Labels for patients
// without notes or events produce a warning and an empty record.
IngestResult IngestCorpus(const std::filesystem::path& notes_path,
                          const std::filesystem::path& events_path,
                          const std::filesystem::path& labels_path);

// Writes the three files in canonical form: patients in id order, notes and
// events in record order, JSON keys sorted, labels only for labelled
// patients.
void WriteCorpus(const Corpus& corpus,
                 const std::filesystem::path& notes_path,
                 const std::filesystem::path& events_path,
                 const std::filesystem::path& labels_path);

// In-memory forms of the file serializers, used by WriteCorpus.
std::string SerializeNoteLine(const ClinicalNote& note);
std::string SerializeEventLine(const StructuredEvent& event);

}  // namespace phenorag

#endif  // PHENORAG_CORPUS_HPP_
