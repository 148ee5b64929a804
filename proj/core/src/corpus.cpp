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

#include "phenorag/corpus.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"
#include "phenorag/error.hpp"
#include "phenorag/text.hpp"

namespace phenorag {
namespace {

using json = nlohmann::json;

std::string Location(const std::filesystem::path& path, std::size_t line) {
  return path.string() + ":" + std::to_string(line);
}

std::string RequireString(const json& obj, const char* field,
                          const std::filesystem::path& path,
                          std::size_t line) {
  auto it = obj.find(field);
  if (it == obj.end()) {
    throw DataError(Location(path, line) + ": missing field '" + field + "'");
  }
  if (!it->is_string()) {
    throw DataError(Location(path, line) + ": field '" + field +
                    "' must be a string");
  }
  return it->get<std::string>();
}

json ParseLine(const std::string& line, const std::filesystem::path& path,
               std::size_t line_no) {
  json obj;
  try {
    obj = json::parse(line);
  } catch (const json::parse_error& e) {
    throw DataError(Location(path, line_no) + ": malformed record: " +
                    e.what());
  }
  if (!obj.is_object()) {
    throw DataError(Location(path, line_no) + ": record is not an object");
  }
  return obj;
}

std::ifstream OpenInput(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  return in;
}

std::ofstream OpenOutput(const std::filesystem::path& path) {
  if (path.has_parent_path()) {
    std::error_code ec;
    std::filesystem::create_directories(path.parent_path(), ec);
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path.string());
  return out;
}

std::vector<std::string> SplitCsvRow(const std::string& row) {
  std::vector<std::string> cells;
  std::string cell;
  std::istringstream ss(row);
  while (std::getline(ss, cell, ',')) cells.push_back(Trim(cell));
  if (!row.empty() && row.back() == ',') cells.emplace_back();
  return cells;
}

std::optional<bool> ParseLabel(std::string_view text) {
  std::string t = ToLowerAscii(text);
  if (t == "1" || t == "true" || t == "case") return true;
  if (t == "0" || t == "false" || t == "control") return false;
  return std::nullopt;
}

PatientRecord& Slot(Corpus::Map& map, const std::string& patient_id) {
  auto& rec = map[patient_id];
  rec.patient_id = patient_id;
  return rec;
}

}  // namespace

Date ParseDate(std::string_view text) {
  auto bad = [&] {
    return DataError("invalid ISO-8601 date '" + std::string(text) + "'");
  };
  if (text.size() != 10 || text[4] != '-' || text[7] != '-') throw bad();
  int y = 0;
  unsigned m = 0, d = 0;
  auto parse = [&](std::string_view part, auto& value) {
    auto [ptr, ec] = std::from_chars(part.data(), part.data() + part.size(),
                                     value);
    if (ec != std::errc() || ptr != part.data() + part.size()) throw bad();
  };
  parse(text.substr(0, 4), y);
  parse(text.substr(5, 2), m);
  parse(text.substr(8, 2), d);
  Date date{std::chrono::year(y), std::chrono::month(m), std::chrono::day(d)};
  if (!date.ok()) throw bad();
  return date;
}

std::string FormatDate(const Date& date) {
  char buf[16];
  std::snprintf(buf, sizeof(buf), "%04d-%02u-%02u",
                static_cast<int>(date.year()),
                static_cast<unsigned>(date.month()),
                static_cast<unsigned>(date.day()));
  return buf;
}

std::string_view VocabularyName(Vocabulary v) {
  switch (v) {
    case Vocabulary::kIcd9:
      return "ICD9";
    case Vocabulary::kIcd10:
      return "ICD10";
    case Vocabulary::kRxNorm:
      return "RxNorm";
  }
  return "";
}

std::optional<Vocabulary> ParseVocabulary(std::string_view text) {
  std::string t = ToUpperAscii(Trim(text));
  if (t == "ICD9" || t == "ICD-9" || t == "ICD9CM") return Vocabulary::kIcd9;
  if (t == "ICD10" || t == "ICD-10" || t == "ICD10CM") {
    return Vocabulary::kIcd10;
  }
  if (t == "RXNORM") return Vocabulary::kRxNorm;
  return std::nullopt;
}

std::string_view SplitName(Split s) {
  switch (s) {
    case Split::kTrain:
      return "train";
    case Split::kValidation:
      return "validation";
    case Split::kTest:
      return "test";
  }
  return "";
}

std::optional<Split> ParseSplit(std::string_view text) {
  std::string t = ToLowerAscii(Trim(text));
  if (t == "train") return Split::kTrain;
  if (t == "validation" || t == "val") return Split::kValidation;
  if (t == "test") return Split::kTest;
  return std::nullopt;
}

const PatientRecord* Corpus::Find(std::string_view patient_id) const {
  auto it = patients_.find(std::string(patient_id));
  return it == patients_.end() ? nullptr : &it->second;
}

std::vector<const PatientRecord*> Corpus::Select(
    std::optional<Split> split) const {
  std::vector<const PatientRecord*> out;
  for (const auto& [id, rec] : patients_) {
    if (!split || rec.split == split) out.push_back(&rec);
  }
  return out;
}

std::vector<LabelRow> ReadLabels(const std::filesystem::path& labels_path) {
  std::vector<LabelRow> rows;
  std::set<std::string> seen;
  auto in = OpenInput(labels_path);
  std::string line;
  std::size_t line_no = 0;
  bool header_seen = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (Trim(line).empty()) continue;
    auto cells = SplitCsvRow(line);
    if (!header_seen) {
      header_seen = true;
      if (cells.size() < 2 || cells[0] != "patient_id" ||
          cells[1] != "label") {
        throw DataError(Location(labels_path, line_no) +
                        ": expected header 'patient_id,label,split'");
      }
      continue;
    }
    if (cells.size() < 2 || cells.size() > 3 || cells[0].empty()) {
      throw DataError(Location(labels_path, line_no) +
                      ": expected 'patient_id,label[,split]'");
    }
    auto label = ParseLabel(cells[1]);
    if (!label) {
      throw DataError(Location(labels_path, line_no) + ": invalid label '" +
                      cells[1] + "'");
    }
    std::optional<Split> split;
    if (cells.size() == 3 && !cells[2].empty()) {
      split = ParseSplit(cells[2]);
      if (!split) {
        throw DataError(Location(labels_path, line_no) +
                        ": invalid split '" + cells[2] + "'");
      }
    }
    if (!seen.insert(cells[0]).second) {
      throw DataError(Location(labels_path, line_no) +
                      ": duplicate label for patient '" + cells[0] + "'");
    }
    rows.push_back({cells[0], *label, split, line_no});
  }
  return rows;
}

IngestResult IngestCorpus(const std::filesystem::path& notes_path,
                          const std::filesystem::path& events_path,
                          const std::filesystem::path& labels_path) {
  Corpus::Map map;
  IngestResult result;
  std::set<std::string> note_ids;
  std::string line;

  {
    auto in = OpenInput(notes_path);
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
      ++line_no;
      if (Trim(line).empty()) continue;
      json obj = ParseLine(line, notes_path, line_no);
      ClinicalNote note;
      note.patient_id = RequireString(obj, "patient_id", notes_path, line_no);
      note.note_id = RequireString(obj, "note_id", notes_path, line_no);
      note.note_type = RequireString(obj, "note_type", notes_path, line_no);
      std::string ts = RequireString(obj, "timestamp", notes_path, line_no);
      note.text = RequireString(obj, "text", notes_path, line_no);
      if (note.patient_id.empty() || note.note_id.empty()) {
        throw DataError(Location(notes_path, line_no) +
                        ": empty patient_id or note_id");
      }
      try {
        note.timestamp = ParseDate(ts);
      } catch (const DataError& e) {
        throw DataError(Location(notes_path, line_no) + ": " + e.what());
      }
      if (!note_ids.insert(note.note_id).second) {
        throw DataError(Location(notes_path, line_no) +
                        ": duplicate note_id '" + note.note_id + "'");
      }
      Slot(map, note.patient_id).notes.push_back(std::move(note));
    }
  }

  {
    auto in = OpenInput(events_path);
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
      ++line_no;
      if (Trim(line).empty()) continue;
      json obj = ParseLine(line, events_path, line_no);
      StructuredEvent ev;
      ev.patient_id = RequireString(obj, "patient_id", events_path, line_no);
      std::string vocab =
          RequireString(obj, "vocabulary", events_path, line_no);
      ev.code = Trim(RequireString(obj, "code", events_path, line_no));
      std::string date = RequireString(obj, "date", events_path, line_no);
      auto v = ParseVocabulary(vocab);
      if (!v) {
        throw DataError(Location(events_path, line_no) +
                        ": unknown vocabulary '" + vocab + "'");
      }
      ev.vocabulary = *v;
      if (ev.patient_id.empty() || ev.code.empty()) {
        throw DataError(Location(events_path, line_no) +
                        ": empty patient_id or code");
      }
      try {
        ev.date = ParseDate(date);
      } catch (const DataError& e) {
        throw DataError(Location(events_path, line_no) + ": " + e.what());
      }
      Slot(map, ev.patient_id).events.push_back(std::move(ev));
    }
  }

  for (auto& row : ReadLabels(labels_path)) {
    if (!map.contains(row.patient_id)) {
      result.warnings.push_back(Location(labels_path, row.line) +
                                ": label for patient '" + row.patient_id +
                                "' with no notes or events");
    }
    auto& rec = Slot(map, row.patient_id);
    rec.gold_label = row.label;
    rec.split = row.split;
  }

  result.corpus = Corpus(std::move(map));
  return result;
}

std::string SerializeNoteLine(const ClinicalNote& note) {
  json obj = {{"patient_id", note.patient_id},
              {"note_id", note.note_id},
              {"note_type", note.note_type},
              {"timestamp", FormatDate(note.timestamp)},
              {"text", note.text}};
  return obj.dump();
}

std::string SerializeEventLine(const StructuredEvent& event) {
  json obj = {{"patient_id", event.patient_id},
              {"vocabulary", std::string(VocabularyName(event.vocabulary))},
              {"code", event.code},
              {"date", FormatDate(event.date)}};
  return obj.dump();
}

void WriteCorpus(const Corpus& corpus,
                 const std::filesystem::path& notes_path,
                 const std::filesystem::path& events_path,
                 const std::filesystem::path& labels_path) {
  auto notes = OpenOutput(notes_path);
  auto events = OpenOutput(events_path);
  auto labels = OpenOutput(labels_path);
  labels << "patient_id,label,split\n";
  for (const auto& [id, rec] : corpus) {
    for (const auto& n : rec.notes) notes << SerializeNoteLine(n) << '\n';
    for (const auto& e : rec.events) events << SerializeEventLine(e) << '\n';
    if (rec.gold_label) {
      labels << id << ',' << (*rec.gold_label ? 1 : 0) << ',';
      if (rec.split) labels << SplitName(*rec.split);
      labels << '\n';
    }
  }
  if (!notes || !events || !labels) {
    throw IoError("write failed under " + notes_path.parent_path().string());
  }
}

}  // namespace phenorag
