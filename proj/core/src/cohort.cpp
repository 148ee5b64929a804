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

#include "phenorag/cohort.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>

#include "phenorag/error.hpp"
#include "phenorag/rng.hpp"
#include "phenorag/text.hpp"

namespace phenorag {
namespace {

struct CodeEntry {
  Vocabulary vocabulary;
  const char* code;
};

constexpr std::array<CodeEntry, 8> kPhenotypeDiagnoses = {{
    {Vocabulary::kIcd10, "I27.21"},
    {Vocabulary::kIcd10, "I27.22"},
    {Vocabulary::kIcd10, "I27.23"},
    {Vocabulary::kIcd10, "I27.24"},
    {Vocabulary::kIcd10, "I27.29"},
    {Vocabulary::kIcd10, "I27.9"},
    {Vocabulary::kIcd9, "416.0"},
    {Vocabulary::kIcd9, "416.8"},
}};

constexpr std::array<CodeEntry, 4> kPhenotypeMedications = {{
    {Vocabulary::kRxNorm, "136411"},
    {Vocabulary::kRxNorm, "358263"},
    {Vocabulary::kRxNorm, "1439816"},
    {Vocabulary::kRxNorm, "343048"},
}};

constexpr std::array<CodeEntry, 10> kBackgroundCodes = {{
    {Vocabulary::kIcd10, "E11.9"},
    {Vocabulary::kIcd10, "I10"},
    {Vocabulary::kIcd10, "J44.9"},
    {Vocabulary::kIcd10, "I50.9"},
    {Vocabulary::kIcd10, "N18.3"},
    {Vocabulary::kIcd9, "250.00"},
    {Vocabulary::kIcd9, "401.9"},
    {Vocabulary::kRxNorm, "197361"},
    {Vocabulary::kRxNorm, "310798"},
    {Vocabulary::kRxNorm, "860975"},
}};

// Clinical note types with typical weights; the trailing entries
// share the "Other" mass.
struct TypeWeight {
  std::string_view type;
  double weight;
};

constexpr std::array<TypeWeight, 12> kNoteTypes = {{
    {note_types::kProgressNote, 54.21},
    {note_types::kConsult, 7.95},
    {note_types::kDischargeSummary, 6.06},
    {note_types::kHistoryAndPhysical, 5.77},
    {note_types::kProcedure, 5.53},
    {note_types::kTelephoneEncounter, 3.94},
    {"Nursing Note", 4.0},
    {"Emergency Department Note", 3.5},
    {"Letter", 2.5},
    {"Patient Instructions", 2.5},
    {"Care Plan", 2.0},
    {"Operative Report", 2.04},
}};

constexpr std::string_view kEchoNoteType = "Echocardiogram Report";
constexpr std::string_view kCtNoteType = "Radiology Report";

CohortPhrases BuildPhrases() {
  CohortPhrases p;
  p.affirmative = {
      "Assessment: pulmonary hypertension, WHO group 1, confirmed by right "
      "heart catheterization.",
      "Known history of pulmonary arterial hypertension, maintained on "
      "ambrisentan and tadalafil.",
      "CTEPH diagnosed after V/Q scan and right heart catheterization; "
      "continue anticoagulation.",
      "PH-ILD with worsening exertional dyspnea; continue home oxygen and "
      "specialty clinic follow-up.",
      "Right heart catheterization confirmed PH with mean pulmonary artery "
      "pressure of 38 mmHg.",
      "Diagnosis: PAH, functional class II, stable on sildenafil.",
      "pHTN followed by cardiology, stable on current therapy.",
  };
  p.possible = {
      "Possible pulmonary hypertension; will obtain echocardiogram to "
      "evaluate.",
      "Dyspnea workup ongoing, rule out PH.",
  };
  p.imaging_case = {
      "IMPRESSION: Severe pulmonary hypertension with RVSP of 78 mmHg and "
      "flattened septum.",
      "IMPRESSION: Marked RV dilation with severe pulmonary hypertension.",
  };
  p.imaging_suspicion = {
      "IMPRESSION: Findings suggestive of pulmonary hypertension; elevated "
      "PASP estimated at 45 mmHg. Clinical correlation recommended.",
      "IMPRESSION: Enlarged main pulmonary artery measuring 3.4 cm, which can "
      "be seen with pulmonary hypertension.",
  };
  p.filler = {
      "Patient seen today for routine follow-up.",
      "Blood pressure 1#/# mmHg, heart rate # bpm.",
      "Physical exam notable for mild bilateral ankle edema.",
      "Surgical pathology report reviewed and unremarkable.",
      "Serum phosphate within normal limits.",
      "Systemic hypertension is well controlled on lisinopril.",
      "Pulmonary function tests show mild obstruction.",
      "Lungs clear to auscultation bilaterally.",
      "Continue metformin for type 2 diabetes.",
      "Denies chest pain, palpitations, or syncope.",
      "Medication list reconciled with the patient.",
      "Physical therapy referral placed for deconditioning.",
      "Graphical flowsheet reviewed with nursing staff.",
      "Pulmonary embolism was ruled out last year.",
      "Follow up in # weeks.",
      "Patient reports good adherence to the home exercise program.",
      "Renal function stable on recent labs.",
      "Telephone call returned; patient doing well.",
      "Plan discussed with patient and family, who agree.",
      "Alpha blocker held for dizziness.",
      "Chronic kidney disease stage 3, monitoring.",
      "Atrial fibrillation rate controlled on metoprolol.",
      "Obstructive sleep apnea on CPAP, adherent.",
      "Weight # kg, stable from prior visit.",
      "Influenza vaccine administered today.",
      "Oxygen saturation # percent on room air.",
  };
  p.imaging_filler = {
      "Left ventricular ejection fraction is estimated at # percent.",
      "No pericardial effusion.",
      "The aortic valve is trileaflet without stenosis.",
      "Mild mitral regurgitation.",
      "Mild dependent atelectasis in both lower lobes.",
      "No pleural effusion or pneumothorax.",
      "Coronary artery calcifications are present.",
  };
  p.echo_header =
      "ECHOCARDIOGRAM REPORT\nINDICATION: Dyspnea on exertion.\nFINDINGS:";
  p.ct_header =
      "CT CHEST WITHOUT CONTRAST\nTECHNIQUE: Axial images of the chest were "
      "obtained.\nFINDINGS:";
  return p;
}

constexpr std::array<std::string_view, 3> kSectionHeaders = {
    "SUBJECTIVE:", "OBJECTIVE:", "ASSESSMENT AND PLAN:"};

std::string FillNumbers(std::string_view tmpl, Rng& rng) {
  std::string out;
  out.reserve(tmpl.size() + 8);
  for (char c : tmpl) {
    if (c == '#') {
      out += std::to_string(rng.Between(10, 99));
    } else {
      out += c;
    }
  }
  return out;
}

std::string PaddedId(char prefix, std::size_t n, int width) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%c%0*zu", prefix, width, n);
  return buf;
}

class PatientBuilder {
 public:
  PatientBuilder(const CohortSpec& spec, const CohortPhrases& phrases, Rng& rng)
      : spec_(spec), phrases_(phrases), rng_(rng) {}

  // Body of a clinical note as a list of sentences grouped into sections.
  std::vector<std::string> ClinicalSentences() {
    const double mean = static_cast<double>(spec_.mean_note_tokens);
    const auto target = static_cast<std::size_t>(
        std::max(1.0, std::floor(mean * (0.5 + rng_.Uniform()))));
    std::vector<std::string> sentences;
    std::size_t tokens = 0;
    while (tokens < target) {
      std::string s = FillNumbers(rng_.Pick(phrases_.filler), rng_);
      tokens += CountWhitespaceTokens(s);
      sentences.push_back(std::move(s));
    }
    return sentences;
  }

  static std::string JoinClinical(const std::vector<std::string>& sentences) {
    std::string text;
    const std::size_t per_section =
        std::max<std::size_t>(1, (sentences.size() + 2) / 3);
    for (std::size_t i = 0; i < sentences.size(); ++i) {
      if (i % per_section == 0) {
        if (!text.empty()) text += '\n';
        text += kSectionHeaders[std::min<std::size_t>(i / per_section, 2)];
        text += '\n';
      } else {
        text += ' ';
      }
      text += sentences[i];
    }
    return text;
  }

  std::string ImagingReport(bool echo, const std::string& impression) {
    std::string text = echo ? phrases_.echo_header : phrases_.ct_header;
    const auto n = static_cast<std::size_t>(rng_.Between(3, 6));
    for (std::size_t i = 0; i < n; ++i) {
      text += ' ';
      text += FillNumbers(rng_.Pick(phrases_.imaging_filler), rng_);
    }
    text += '\n';
    text += impression;
    return text;
  }

  std::string_view ClinicalType() {
    std::array<double, kNoteTypes.size()> w{};
    for (std::size_t i = 0; i < kNoteTypes.size(); ++i) {
      w[i] = kNoteTypes[i].weight;
    }
    return kNoteTypes[rng_.Weighted(w)].type;
  }

  Date RandomDate() {
    using namespace std::chrono;
    const sys_days base = year{2010} / January / 1;
    return year_month_day{base + days{rng_.Between(0, 365 * 12)}};
  }

 private:
  const CohortSpec& spec_;
  const CohortPhrases& phrases_;
  Rng& rng_;
};

struct DraftNote {
  std::string note_type;
  Date date;
  std::string text;
};

}  // namespace

const CohortPhrases& GeneratorPhrases() {
  static const CohortPhrases phrases = BuildPhrases();
  return phrases;
}

void ValidateCohortSpec(const CohortSpec& spec) {
  auto check_fraction = [](double v, const char* name) {
    if (!(v >= 0.0 && v <= 1.0)) {
      throw ConfigError(std::string("cohort.") + name + " must be in [0, 1]");
    }
  };
  check_fraction(spec.case_fraction, "case_fraction");
  check_fraction(spec.imaging_only_case_fraction,
                 "imaging_only_case_fraction");
  check_fraction(spec.control_suspicion_fraction,
                 "control_suspicion_fraction");
  check_fraction(spec.control_possible_mention_fraction,
                 "control_possible_mention_fraction");
  check_fraction(spec.case_code_fraction, "case_code_fraction");
  check_fraction(spec.control_code_fraction, "control_code_fraction");
  if (!(spec.mean_notes_per_patient >= 1.0)) {
    throw ConfigError("cohort.mean_notes_per_patient must be >= 1");
  }
  if (spec.mean_note_tokens == 0) {
    throw ConfigError("cohort.mean_note_tokens must be > 0");
  }
}

Corpus GenerateCohort(const CohortSpec& spec) {
  ValidateCohortSpec(spec);
  const CohortPhrases& phrases = GeneratorPhrases();
  Rng rng(spec.seed);

  const std::size_t n = spec.n_patients;
  const auto n_cases = static_cast<std::size_t>(
      std::lround(static_cast<double>(n) * spec.case_fraction));
  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;
  rng.Shuffle(order);
  std::vector<bool> is_case(n, false);
  for (std::size_t i = 0; i < n_cases && i < n; ++i) is_case[order[i]] = true;

  const int width = n >= 100000 ? 7 : 5;
  Corpus::Map map;
  PatientBuilder builder(spec, phrases, rng);

  for (std::size_t i = 0; i < n; ++i) {
    PatientRecord rec;
    rec.patient_id = PaddedId('P', i + 1, width);
    rec.gold_label = is_case[i];
    rec.split = spec.split;

    // Draw the patient's profile first so the stream layout is fixed.
    const bool imaging_only = is_case[i] &&
                              rng.Bernoulli(spec.imaging_only_case_fraction);
    const bool has_codes = is_case[i] ? rng.Bernoulli(spec.case_code_fraction)
                                      : rng.Bernoulli(spec.control_code_fraction);
    const bool suspicion =
        !is_case[i] && rng.Bernoulli(spec.control_suspicion_fraction);
    const bool possible =
        !is_case[i] && rng.Bernoulli(spec.control_possible_mention_fraction);
    const bool normal_echo = rng.Bernoulli(0.2);

    const double span = 2.0 * spec.mean_notes_per_patient - 1.0;
    const auto n_notes = static_cast<std::size_t>(
        1 + rng.Below(static_cast<std::uint64_t>(std::max(1.0, span))));

    std::vector<DraftNote> drafts;
    std::vector<std::vector<std::string>> bodies;
    for (std::size_t k = 0; k < n_notes; ++k) {
      drafts.push_back({std::string(builder.ClinicalType()),
                        builder.RandomDate(), {}});
      bodies.push_back(builder.ClinicalSentences());
    }

    auto plant = [&](const std::string& sentence) {
      const std::size_t note = rng.Below(bodies.size());
      auto& body = bodies[note];
      const std::size_t pos = rng.Below(body.size() + 1);
      body.insert(body.begin() + static_cast<std::ptrdiff_t>(pos), sentence);
    };

    if (is_case[i] && !imaging_only) {
      const std::size_t n_mentions = 1 + rng.Below(2);
      for (std::size_t m = 0; m < n_mentions; ++m) {
        plant(rng.Pick(phrases.affirmative));
      }
    }
    if (possible) plant(rng.Pick(phrases.possible));

    for (std::size_t k = 0; k < n_notes; ++k) {
      drafts[k].text = PatientBuilder::JoinClinical(bodies[k]);
    }

    if (imaging_only) {
      drafts.push_back({std::string(kEchoNoteType), builder.RandomDate(),
                        builder.ImagingReport(
                            true, rng.Pick(phrases.imaging_case))});
    }
    if (suspicion) {
      const bool echo = rng.Bernoulli(0.5);
      drafts.push_back(
          {std::string(echo ? kEchoNoteType : kCtNoteType),
           builder.RandomDate(),
           builder.ImagingReport(echo, rng.Pick(phrases.imaging_suspicion))});
    }
    if (normal_echo) {
      drafts.push_back(
          {std::string(kEchoNoteType), builder.RandomDate(),
           builder.ImagingReport(
               true, "IMPRESSION: Normal biventricular size and function.")});
    }

    std::stable_sort(drafts.begin(), drafts.end(),
                     [](const DraftNote& a, const DraftNote& b) {
                       return a.date < b.date;
                     });
    for (std::size_t k = 0; k < drafts.size(); ++k) {
      ClinicalNote note;
      note.patient_id = rec.patient_id;
      note.note_id = rec.patient_id + "-" + PaddedId('N', k + 1, 3);
      note.note_type = std::move(drafts[k].note_type);
      note.timestamp = drafts[k].date;
      note.text = std::move(drafts[k].text);
      rec.notes.push_back(std::move(note));
    }

    const std::size_t n_background = rng.Below(4);
    for (std::size_t k = 0; k < n_background; ++k) {
      const auto& c = rng.Pick(std::span<const CodeEntry>(kBackgroundCodes));
      rec.events.push_back(
          {rec.patient_id, c.vocabulary, c.code, builder.RandomDate()});
    }
    if (has_codes) {
      if (is_case[i]) {
        const std::size_t n_dx = 1 + rng.Below(3);
        for (std::size_t k = 0; k < n_dx; ++k) {
          const auto& c =
              rng.Pick(std::span<const CodeEntry>(kPhenotypeDiagnoses));
          rec.events.push_back(
              {rec.patient_id, c.vocabulary, c.code, builder.RandomDate()});
        }
        if (rng.Bernoulli(0.5)) {
          const auto& c =
              rng.Pick(std::span<const CodeEntry>(kPhenotypeMedications));
          rec.events.push_back(
              {rec.patient_id, c.vocabulary, c.code, builder.RandomDate()});
        }
      } else {
        const auto& c =
            rng.Pick(std::span<const CodeEntry>(kPhenotypeDiagnoses));
        rec.events.push_back(
            {rec.patient_id, c.vocabulary, c.code, builder.RandomDate()});
      }
    }
    std::stable_sort(rec.events.begin(), rec.events.end(),
                     [](const StructuredEvent& a, const StructuredEvent& b) {
                       return a.date < b.date;
                     });

    map.emplace(rec.patient_id, std::move(rec));
  }
  return Corpus(std::move(map));
}

}  // namespace phenorag
