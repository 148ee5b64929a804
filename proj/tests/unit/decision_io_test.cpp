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

#include <gtest/gtest.h>

#include "phenorag/error.hpp"
#include "test_support.hpp"

namespace phenorag {
namespace {

using testing::ReadFile;
using testing::TempDir;
using testing::WriteFile;

RunHeader LlmHeader() {
  RunHeader h;
  h.model = "llm";
  h.prompt = "A";
  h.aggregation = "max";
  h.exclusion = "regex";
  h.split = "test";
  h.fingerprint = Fingerprint("cfg");
  return h;
}

PatientDecision Decided(std::string id, bool positive) {
  PatientDecision d;
  d.patient_id = std::move(id);
  d.decision = positive;
  d.method = AggregationMethod::kLlmDifferentPrompt;
  d.contributing = {{"N1:00000", "Progress Note", Decision::kPositive},
                    {"N2:00000", "Consult", Decision::kUnparseable}};
  d.aggregate_response = "Answer: yes";
  d.reduce_calls = 2;
  d.failed_snippets = 1;
  d.unparseable_snippets = 1;
  return d;
}

TEST(DecisionIoTest, RoundTripsThroughFile) {
  TempDir dir;
  std::map<std::string, PatientDecision> m;
  m["P2"] = Decided("P2", false);
  m["P1"] = Decided("P1", true);
  PatientDecision rules;
  rules.patient_id = "P3";
  rules.decision = true;
  m["P3"] = rules;
  WriteDecisionFile(dir / "d.jsonl", LlmHeader(), m);
  const DecisionFile back = ReadDecisionFile(dir / "d.jsonl");
  EXPECT_EQ(back.header, LlmHeader());
  EXPECT_EQ(back.decisions, m);
  EXPECT_FALSE(back.decisions.at("P3").method.has_value());

  const std::string text = ReadFile(dir / "d.jsonl");
  EXPECT_EQ(text.find("\"P1\""), text.find("\"patient_id\":\"P1\"") + 13);
  EXPECT_LT(text.find("\"P1\""), text.find("\"P2\""));
}

TEST(DecisionIoTest, AppenderWritesHeaderOnceAndResumes) {
  TempDir dir;
  const auto path = dir / "d.jsonl";
  {
    DecisionAppender a(path, LlmHeader());
    a.Append(Decided("P1", true));
  }
  {
    DecisionAppender a(path, LlmHeader());
    a.Append(Decided("P2", false));
  }
  const DecisionFile f = ReadDecisionFile(path);
  EXPECT_EQ(f.decisions.size(), 2u);
  const std::string text = ReadFile(path);
  EXPECT_EQ(text.find("\"kind\":\"run\""), text.rfind("\"kind\":\"run\""));
}

TEST(DecisionIoTest, TruncatedLastLineIsIgnored) {
  TempDir dir;
  const auto path = dir / "d.jsonl";
  WriteDecisionFile(path, LlmHeader(), {{"P1", Decided("P1", true)}});
  WriteFile(path, ReadFile(path) + "{\"kind\":\"decision\",\"patie");
  EXPECT_EQ(ReadDecisionFile(path).decisions.size(), 1u);
  // The same garbage followed by a newline is corruption, not truncation.
  WriteFile(path, ReadFile(path) + "\n");
  EXPECT_THROW(ReadDecisionFile(path), DataError);
}

TEST(DecisionIoTest, StructuralErrors) {
  TempDir dir;
  const auto path = dir / "d.jsonl";
  EXPECT_THROW(ReadDecisionFile(path), IoError);
  WriteFile(path, "");
  EXPECT_THROW(ReadDecisionFile(path), DataError);
  WriteFile(path, SerializeDecision(Decided("P1", true)) + "\n");
  EXPECT_THROW(ReadDecisionFile(path), DataError);
  WriteFile(path, SerializeHeader(LlmHeader()) + "\n" +
                      SerializeHeader(LlmHeader()) + "\n");
  EXPECT_THROW(ReadDecisionFile(path), DataError);
  WriteFile(path, SerializeHeader(LlmHeader()) + "\n{\"kind\":\"other\"}\n");
  EXPECT_THROW(ReadDecisionFile(path), DataError);
}

TEST(DecisionIoTest, LaterLinesWinForSamePatient) {
  TempDir dir;
  const auto path = dir / "d.jsonl";
  WriteFile(path, SerializeHeader(LlmHeader()) + "\n" +
                      SerializeDecision(Decided("P1", false)) + "\n" +
                      SerializeDecision(Decided("P1", true)) + "\n");
  EXPECT_TRUE(ReadDecisionFile(path).decisions.at("P1").decision);
}

TEST(FingerprintTest, KnownFnv1aValues) {
  EXPECT_EQ(Fingerprint(""), "cbf29ce484222325");
  EXPECT_EQ(Fingerprint("a"), "af63dc4c8601ec8c");
  EXPECT_NE(Fingerprint("ab"), Fingerprint("ba"));
}

}  // namespace
}  // namespace phenorag
