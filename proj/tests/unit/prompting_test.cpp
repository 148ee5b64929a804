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

#include "phenorag/prompting.hpp"

#include <gmock/gmock.h>
#include <gtest/gtest.h>

#include <set>

#include "phenorag/error.hpp"

namespace phenorag {
namespace {

using ::testing::HasSubstr;
using ::testing::Not;

constexpr char kSnippet[] = "Known PH, on sildenafil.";

bool Contains(const std::string& s, std::string_view part) {
  return s.find(part) != std::string::npos;
}

TEST(DesignTest, FeatureGrid) {
  struct Row {
    PromptDesign d;
    bool cot;
    bool mc;
    bool explain;
  };
  const Row rows[] = {{PromptDesign::kA, true, true, true},
                      {PromptDesign::kB, true, false, true},
                      {PromptDesign::kC, true, false, false},
                      {PromptDesign::kD, false, true, true},
                      {PromptDesign::kE, false, false, true}};
  for (const auto& r : rows) {
    const PromptTemplate t = MakeDesignTemplate(r.d);
    EXPECT_TRUE(t.steering);
    EXPECT_EQ(t.cot, r.cot) << DesignName(r.d);
    EXPECT_EQ(t.multiple_choice, r.mc) << DesignName(r.d);
    EXPECT_EQ(t.explain_reasoning, r.explain) << DesignName(r.d);
    EXPECT_EQ(ParseDesign(DesignName(r.d)), r.d);
  }
  EXPECT_FALSE(ParseDesign("F"));
}

TEST(DesignTest, RenderedPromptsAreDistinct) {
  std::set<std::string> seen;
  for (auto d : kAllDesigns) {
    for (auto p : {SteeringPolarity::kHistoryYes, SteeringPolarity::kHistoryNo}) {
      EXPECT_TRUE(seen.insert(RenderPrompt(MakeDesignTemplate(d, p), kSnippet))
                      .second);
    }
  }
}

TEST(RenderTest, DesignACarriesEveryFeature) {
  const std::string p = RenderPrompt(MakeDesignTemplate(PromptDesign::kA), kSnippet);
  EXPECT_THAT(p, HasSubstr(kSnippet));
  EXPECT_THAT(p, HasSubstr(std::string(kCotPhrase)));
  EXPECT_THAT(p, HasSubstr("(a) Yes"));
  EXPECT_THAT(p, HasSubstr("(b) No"));
  EXPECT_THAT(p, HasSubstr("history of PH as a yes"));
  EXPECT_THAT(p, HasSubstr(std::string(kExplainPhrase)));
  EXPECT_THAT(p, Not(HasSubstr("{")));
}

TEST(RenderTest, DesignEHasSteeringOnly) {
  const std::string p = RenderPrompt(MakeDesignTemplate(PromptDesign::kE), kSnippet);
  EXPECT_THAT(p, HasSubstr(kSnippet));
  EXPECT_THAT(p, HasSubstr("possible or suspected case of PH as a no"));
  EXPECT_THAT(p, Not(HasSubstr(std::string(kCotPhrase))));
  EXPECT_THAT(p, Not(HasSubstr("(a) Yes")));
  // Blank placeholder lines are dropped.
  EXPECT_THAT(p, Not(HasSubstr("\n\n")));
}

TEST(RenderTest, DesignCOmitsExplainPhrase) {
  const std::string p = RenderPrompt(MakeDesignTemplate(PromptDesign::kC), kSnippet);
  EXPECT_THAT(p, HasSubstr(std::string(kCotPhrase)));
  EXPECT_THAT(p, Not(HasSubstr(std::string(kExplainPhrase))));
}

TEST(RenderTest, PolarityFlipsSteering) {
  const std::string p = RenderPrompt(
      MakeDesignTemplate(PromptDesign::kB, SteeringPolarity::kHistoryNo),
      kSnippet);
  EXPECT_THAT(p, HasSubstr("history of PH as a no"));
  EXPECT_THAT(p, HasSubstr("suspected case of PH as a yes"));
  EXPECT_EQ(ParsePolarity(PolarityName(SteeringPolarity::kHistoryNo)),
            SteeringPolarity::kHistoryNo);
  EXPECT_FALSE(ParsePolarity("sometimes"));
}

TEST(RenderTest, ImagingAmendmentAddsInstruction) {
  PromptTemplate t = MakeDesignTemplate(PromptDesign::kA);
  const std::string plain = RenderPrompt(t, kSnippet);
  t.amendments = {std::string(kImagingAmendment)};
  const std::string amended = RenderPrompt(t, kSnippet);
  const std::string instruction(*AmendmentText(kImagingAmendment));
  EXPECT_THAT(amended, HasSubstr(instruction));
  EXPECT_THAT(plain, Not(HasSubstr(instruction)));
  EXPECT_THAT(amended, HasSubstr("Disregard any content from echocardiogram"));
}

TEST(RenderTest, UnknownAmendmentIsConfigError) {
  PromptTemplate t = MakeDesignTemplate(PromptDesign::kA);
  t.amendments = {"ignore_everything"};
  EXPECT_THROW(RenderPrompt(t, kSnippet), ConfigError);
  EXPECT_THROW(ValidateTemplate(t), ConfigError);
  t.amendments.clear();
  t.body = "no placeholder";
  EXPECT_THROW(ValidateTemplate(t), ConfigError);
}

TEST(RenderTest, EmptySnippetIsInvalidArgument) {
  EXPECT_THROW(RenderPrompt(MakeDesignTemplate(PromptDesign::kA), ""),
               InvalidArgument);
}

TEST(RenderTest, SnippetTextIsNotReexpanded) {
  const std::string snippet = "literal {options} and {cot} in a note";
  const std::string p =
      RenderPrompt(MakeDesignTemplate(PromptDesign::kE), snippet);
  EXPECT_THAT(p, HasSubstr(snippet));
}

TEST(RenderTest, AnyPositiveTemplate) {
  const PromptTemplate t = MakeAnyPositiveTemplate();
  const std::string p = RenderPrompt(t, "Response 1: Answer: yes");
  EXPECT_THAT(p, HasSubstr("indicate a positive diagnosis"));
  EXPECT_THAT(p, HasSubstr("Response 1: Answer: yes"));
  EXPECT_THAT(p, Not(HasSubstr("Count a documented history")));
}

TEST(ParseTest, MultipleChoiceAnswerCapturesReasoning) {
  const auto v =
      ParseResponse("Answer: (a) Yes. The note states a confirmed diagnosis.",
                    MakeDesignTemplate(PromptDesign::kA));
  EXPECT_EQ(v.decision, Decision::kPositive);
  EXPECT_TRUE(Contains(v.reasoning, "confirmed diagnosis")) << v.reasoning;
  EXPECT_EQ(v.raw_response,
            "Answer: (a) Yes. The note states a confirmed diagnosis.");
}

TEST(ParseTest, BareWordsAndUnparseable) {
  const PromptTemplate e = MakeDesignTemplate(PromptDesign::kE);
  EXPECT_EQ(ParseResponse("no", e).decision, Decision::kNegative);
  EXPECT_EQ(ParseResponse("Yes, clearly.", e).decision, Decision::kPositive);
  EXPECT_EQ(ParseResponse("The findings are equivocal.", e).decision,
            Decision::kUnparseable);
  EXPECT_EQ(ParseResponse("", e).decision, Decision::kUnparseable);
  // Conflicting standalone tokens without an explicit answer.
  EXPECT_EQ(ParseResponse("Perhaps yes, perhaps no.", e).decision,
            Decision::kUnparseable);
}

TEST(ParseTest, ExplicitAnswerWinsOverProse) {
  const PromptTemplate b = MakeDesignTemplate(PromptDesign::kB);
  EXPECT_EQ(ParseResponse("Let's think. No echo data... Answer: yes", b).decision,
            Decision::kPositive);
  const PromptTemplate a = MakeDesignTemplate(PromptDesign::kA);
  EXPECT_EQ(ParseResponse("answer is (b)", a).decision, Decision::kNegative);
  EXPECT_EQ(ParseResponse("I pick (b) because ...", a).decision,
            Decision::kNegative);
}

TEST(ParseTest, DecisionNamesRoundTrip) {
  for (auto d : {Decision::kPositive, Decision::kNegative,
                 Decision::kUnparseable}) {
    EXPECT_EQ(ParseDecisionName(DecisionName(d)), d);
  }
  EXPECT_FALSE(ParseDecisionName("maybe"));
}

}  // namespace
}  // namespace phenorag
