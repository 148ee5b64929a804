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

#include "phenorag/decision_io.hpp"

#include <cstdio>

#include "json.hpp"
#include "phenorag/error.hpp"

namespace phenorag {
namespace {

using json = nlohmann::json;

json OptionalString(const std::optional<std::string>& s) {
  return s ? json(*s) : json(nullptr);
}

std::optional<std::string> ReadOptional(const json& obj, const char* key) {
  auto it = obj.find(key);
  if (it == obj.end() || it->is_null()) return std::nullopt;
  return it->get<std::string>();
}

RunHeader HeaderFromJson(const json& obj) {
  RunHeader h;
  h.model = obj.at("model").get<std::string>();
  h.prompt = ReadOptional(obj, "prompt");
  h.aggregation = ReadOptional(obj, "aggregation");
  h.exclusion = ReadOptional(obj, "exclusion");
  h.split = obj.at("split").get<std::string>();
  h.fingerprint = obj.value("fingerprint", "");
  return h;
}

PatientDecision DecisionFromJson(const json& obj) {
  PatientDecision d;
  d.patient_id = obj.at("patient_id").get<std::string>();
  d.decision = obj.at("decision").get<bool>();
  const std::string method = obj.at("method").get<std::string>();
  if (method != "rules") {
    d.method = ParseAggregation(method);
    if (!d.method) throw DataError("unknown method '" + method + "'");
  }
  for (const auto& c : obj.at("contributing")) {
    ContributingSnippet cs;
    cs.snippet_id = c.at("snippet_id").get<std::string>();
    cs.note_type = c.at("note_type").get<std::string>();
    const std::string dec = c.at("decision").get<std::string>();
    auto parsed = ParseDecisionName(dec);
    if (!parsed) throw DataError("unknown snippet decision '" + dec + "'");
    cs.decision = *parsed;
    d.contributing.push_back(std::move(cs));
  }
  d.aggregate_response = ReadOptional(obj, "aggregate_response");
  d.degraded = obj.value("degraded", false);
  d.reduce_calls = obj.value("reduce_calls", std::size_t{0});
  d.failed_snippets = obj.value("failed_snippets", std::size_t{0});
  d.unparseable_snippets = obj.value("unparseable_snippets", std::size_t{0});
  return d;
}

}  // namespace

std::string SerializeHeader(const RunHeader& header) {
  json obj = {{"kind", "run"},
              {"model", header.model},
              {"prompt", OptionalString(header.prompt)},
              {"aggregation", OptionalString(header.aggregation)},
              {"exclusion", OptionalString(header.exclusion)},
              {"split", header.split},
              {"fingerprint", header.fingerprint}};
  return obj.dump();
}

std::string SerializeDecision(const PatientDecision& d) {
  json contributing = json::array();
  for (const auto& c : d.contributing) {
    contributing.push_back({{"snippet_id", c.snippet_id},
                            {"note_type", c.note_type},
                            {"decision", std::string(DecisionName(c.decision))}});
  }
  json obj = {
      {"kind", "decision"},
      {"patient_id", d.patient_id},
      {"decision", d.decision},
      {"method",
       d.method ? std::string(AggregationName(*d.method)) : "rules"},
      {"contributing", std::move(contributing)},
      {"aggregate_response", OptionalString(d.aggregate_response)},
      {"degraded", d.degraded},
      {"reduce_calls", d.reduce_calls},
      {"failed_snippets", d.failed_snippets},
      {"unparseable_snippets", d.unparseable_snippets},
  };
  return obj.dump();
}

DecisionFile ReadDecisionFile(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open decisions file " + path.string());
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) lines.push_back(line);
  // getline drops the final newline, so a complete file ends with a
  // non-empty last line only when that line was cut off.
  in.clear();
  in.seekg(0, std::ios::end);
  bool ends_with_newline = false;
  if (in.tellg() > 0) {
    in.seekg(-1, std::ios::end);
    ends_with_newline = in.get() == '\n';
  }

  DecisionFile file;
  bool have_header = false;
  for (std::size_t i = 0; i < lines.size(); ++i) {
    const std::string& l = lines[i];
    if (l.empty()) continue;
    const bool last = i + 1 == lines.size();
    json obj;
    try {
      obj = json::parse(l);
    } catch (const json::parse_error& e) {
      if (last && !ends_with_newline) break;
      throw DataError(path.string() + ":" + std::to_string(i + 1) +
                      ": malformed line: " + e.what());
    }
    try {
      const std::string kind = obj.at("kind").get<std::string>();
      if (kind == "run") {
        if (have_header) {
          throw DataError("second run header");
        }
        file.header = HeaderFromJson(obj);
        have_header = true;
      } else if (kind == "decision") {
        if (!have_header) throw DataError("decision before run header");
        PatientDecision d = DecisionFromJson(obj);
        file.decisions.insert_or_assign(d.patient_id, std::move(d));
      } else {
        throw DataError("unknown record kind '" + kind + "'");
      }
    } catch (const json::exception& e) {
      throw DataError(path.string() + ":" + std::to_string(i + 1) + ": " +
                      e.what());
    } catch (const DataError& e) {
      throw DataError(path.string() + ":" + std::to_string(i + 1) + ": " +
                      e.what());
    }
  }
  if (!have_header) {
    throw DataError(path.string() + ": missing run header");
  }
  return file;
}

void WriteDecisionFile(const std::filesystem::path& path,
                       const RunHeader& header,
                       const std::map<std::string, PatientDecision>& decisions) {
  if (path.has_parent_path()) {
    std::filesystem::create_directories(path.parent_path());
  }
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write " + tmp.string());
    out << SerializeHeader(header) << '\n';
    for (const auto& [id, d] : decisions) out << SerializeDecision(d) << '\n';
    if (!out) throw IoError("write failed: " + tmp.string());
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) throw IoError("cannot replace " + path.string() + ": " + ec.message());
}

DecisionAppender::DecisionAppender(const std::filesystem::path& path,
                                   const RunHeader& header) {
  if (path.has_parent_path()) {
    std::filesystem::create_directories(path.parent_path());
  }
  const bool fresh = !std::filesystem::exists(path) ||
                     std::filesystem::file_size(path) == 0;
  out_.open(path, std::ios::binary | std::ios::app);
  if (!out_) throw IoError("cannot append to " + path.string());
  if (fresh) {
    out_ << SerializeHeader(header) << '\n';
    out_.flush();
  }
}

void DecisionAppender::Append(const PatientDecision& decision) {
  out_ << SerializeDecision(decision) << '\n';
  out_.flush();
  if (!out_) throw IoError("append failed");
}

std::string Fingerprint(std::string_view text) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx",
                static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace phenorag
