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

#ifndef PHENORAG_DECISION_IO_HPP_
#define PHENORAG_DECISION_IO_HPP_

#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "phenorag/mapreduce.hpp"

namespace phenorag {

// First line of a decisions file; identifies the run configuration.
struct RunHeader {
  std::string model;  // "llm" or "structured"
  std::optional<std::string> prompt;       // design id, LLM runs only
  std::optional<std::string> aggregation;  // AggregationName, LLM runs only
  std::optional<std::string> exclusion;    // ExclusionName, LLM runs only
  std::string split = "all";               // SplitName or "all"
  std::string fingerprint;  // hash of the effective configuration

  friend bool operator==(const RunHeader&, const RunHeader&) = default;
};

// JSON object per line:
//   {"kind":"run", ...RunHeader}
//   {"kind":"decision","patient_id":..,"decision":bool,"method":..,
//    "contributing":[{"snippet_id","note_type","decision"}],
//    "aggregate_response":str|null,"degraded":bool,"reduce_calls":n,
//    "failed_snippets":n,"unparseable_snippets":n}
std::string SerializeHeader(const RunHeader& header);
std::string SerializeDecision(const PatientDecision& decision);

struct DecisionFile {
  RunHeader header;
  std::map<std::string, PatientDecision> decisions;  // by patient_id
};

// Throws IoError/DataError. A truncated final line (interrupted run) is
// ignored; any other malformed line is an error.
DecisionFile ReadDecisionFile(const std::filesystem::path& path);

// Writes header plus decisions in patient_id order, replacing `path`
// atomically.
void WriteDecisionFile(const std::filesystem::path& path,
                       const RunHeader& header,
                       const std::map<std::string, PatientDecision>& decisions);

// Appends one line per decision and flushes, so an interrupted run can be
// resumed from what reached disk.
class DecisionAppender {
 public:
  // Creates the file with `header` when absent.
  DecisionAppender(const std::filesystem::path& path, const RunHeader& header);
  void Append(const PatientDecision& decision);

 private:
  std::ofstream out_;
};

// 64-bit FNV-1a as 16 lowercase hex digits.
std::string Fingerprint(std::string_view text);

}  // namespace phenorag

#endif  // PHENORAG_DECISION_IO_HPP_
