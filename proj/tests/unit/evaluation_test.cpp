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

#include "phenorag/evaluation.hpp"

#include <gmock/gmock.h>
#include <gtest/gtest.h>

#include "json.hpp"
#include "phenorag/error.hpp"
#include "phenorag/rng.hpp"

namespace phenorag {
namespace {

using ::testing::HasSubstr;
using json = nlohmann::json;

LabelMap Labels(const std::string& bits) {
  LabelMap m;
  for (std::size_t i = 0; i < bits.size(); ++i) {
    m["P" + std::to_string(10 + i)] = bits[i] == '1';
  }
  return m;
}

RunSummary Llm(std::string prompt, std::string agg, std::string excl,
               LabelMap decisions) {
  RunSummary r;
  r.model = "llm";
  r.prompt = std::move(prompt);
  r.aggregation = std::move(agg);
  r.exclusion = std::move(excl);
  r.decisions = std::move(decisions);
  return r;
}

TEST(ScoreTest, PerfectAndAllNegative) {
  const LabelMap gold = Labels("1111000000");
  EXPECT_EQ(Score(gold, gold), (ConfusionMatrix{4, 0, 0, 6}));
  EXPECT_EQ(Score(Labels("0000000000"), gold), (ConfusionMatrix{0, 0, 4, 6}));
}

TEST(ScoreTest, MetricsFromCounts) {
  const Metrics m = ComputeMetrics({3, 1, 2, 0});
  EXPECT_DOUBLE_EQ(m.precision, 0.75);
  EXPECT_DOUBLE_EQ(m.recall, 0.6);
  EXPECT_NEAR(m.f1, 2.0 / 3.0, 1e-12);
  const Metrics zero = ComputeMetrics({0, 0, 0, 5});
  EXPECT_EQ(zero.precision, 0);
  EXPECT_EQ(zero.recall, 0);
  EXPECT_EQ(zero.f1, 0);
}

TEST(ScoreTest, MissingDecisionsAreListed) {
  const LabelMap gold = Labels("101");
  LabelMap partial = gold;
  partial.erase("P10");
  partial.erase("P12");
  partial["P99"] = true;  // outside gold: ignored
  try {
    Score(partial, gold);
    FAIL() << "expected DataError";
  } catch (const DataError& e) {
    EXPECT_THAT(e.what(), HasSubstr("P10"));
    EXPECT_THAT(e.what(), HasSubstr("P12"));
  }
  LabelMap extra = gold;
  extra["P99"] = true;
  EXPECT_EQ(Score(extra, gold), (ConfusionMatrix{2, 0, 0, 1}));
}

TEST(ScoreTest, MatchesBruteForceRecount) {
  Rng rng(1234);
  for (int round = 0; round < 300; ++round) {
    const auto n = rng.Below(30);
    std::string g;
    std::string d;
    for (std::uint64_t i = 0; i < n; ++i) {
      g += rng.Below(2) ? '1' : '0';
      d += rng.Below(2) ? '1' : '0';
    }
    const ConfusionMatrix cm = Score(Labels(d), Labels(g));
    std::size_t tp = 0, fp = 0, fn = 0, tn = 0;
    for (std::size_t i = 0; i < g.size(); ++i) {
      tp += d[i] == '1' && g[i] == '1';
      fp += d[i] == '1' && g[i] == '0';
      fn += d[i] == '0' && g[i] == '1';
      tn += d[i] == '0' && g[i] == '0';
    }
    EXPECT_EQ(cm, (ConfusionMatrix{tp, fp, fn, tn}));
    const Metrics m = ComputeMetrics(cm);
    const double p = tp + fp ? double(tp) / double(tp + fp) : 0.0;
    const double r = tp + fn ? double(tp) / double(tp + fn) : 0.0;
    EXPECT_NEAR(m.precision, p, 1e-12);
    EXPECT_NEAR(m.recall, r, 1e-12);
    EXPECT_NEAR(m.f1, p + r > 0 ? 2 * p * r / (p + r) : 0.0, 1e-12);
  }
}

TEST(NoteTypeTest, Examples) {
  std::vector<std::string> types(54, "Progress Note");
  types.insert(types.end(), 46, "Consult");
  auto dist = NoteTypeDistribution(types);
  ASSERT_EQ(dist.size(), 2u);
  EXPECT_EQ(dist[0].note_type, "Progress Note");
  EXPECT_DOUBLE_EQ(dist[0].fraction, 0.54);

  dist = NoteTypeDistribution(std::vector<std::string>{"Discharge Summary"});
  ASSERT_EQ(dist.size(), 1u);
  EXPECT_DOUBLE_EQ(dist[0].fraction, 1.0);
  EXPECT_TRUE(NoteTypeDistribution(std::vector<std::string>{}).empty());
}

TEST(NoteTypeTest, TailPoolsIntoOther) {
  std::vector<std::string> types = {"a", "a", "a", "b", "b", "c", "d", "Other"};
  const auto dist = NoteTypeDistribution(types, 2);
  ASSERT_EQ(dist.size(), 3u);
  EXPECT_EQ(dist[0].note_type, "a");
  EXPECT_EQ(dist[1].note_type, "b");
  EXPECT_EQ(dist[2].note_type, "Other");
  EXPECT_EQ(dist[2].count, 3u);
  double sum = 0;
  for (const auto& s : dist) sum += s.fraction;
  EXPECT_NEAR(sum, 1.0, 1e-12);
  // Ties broken by name.
  const auto tie = NoteTypeDistribution(std::vector<std::string>{"z", "y"}, 1);
  EXPECT_EQ(tie[0].note_type, "y");
}

TEST(CompareReportTest, IdenticalRunsGiveIdenticalRows) {
  const LabelMap gold = Labels("110010");
  const LabelMap d = Labels("100110");
  const EvalReport r = CompareReport(
      {Llm("A", "max", "none", d), Llm("B", "max", "none", d)}, gold, "test");
  ASSERT_EQ(r.rows.size(), 2u);
  EXPECT_EQ(r.rows[0].confusion, r.rows[1].confusion);
  EXPECT_EQ(r.rows[0].metrics.f1, r.rows[1].metrics.f1);
  EXPECT_EQ(ReportToJson(r), ReportToJson(r));
}

TEST(CompareReportTest, SplitMismatchIsDataError) {
  RunSummary r = Llm("A", "max", "none", Labels("1"));
  r.split = "validation";
  EXPECT_THROW(CompareReport({r}, Labels("1"), "test"), DataError);
  r.split = "all";
  EXPECT_NO_THROW(CompareReport({r}, Labels("1"), "test"));
}

TEST(CompareReportTest, GridCardinality) {
  const LabelMap gold = Labels("1100");
  std::vector<RunSummary> runs;
  for (const char* p : {"A", "B", "C", "D", "E"}) {
    for (const char* a : {"max", "llm_same_prompt", "llm_different_prompt"}) {
      for (const char* e : {"none", "regex", "prompt_amended"}) {
        runs.push_back(Llm(p, a, e, Labels("1000")));
      }
    }
  }
  const EvalReport r = CompareReport(runs, gold, "test");
  EXPECT_EQ(r.rows.size(), 45u);
  const json j = json::parse(ReportToJson(r));
  EXPECT_EQ(j.at("rows").size(), 45u);
  EXPECT_EQ(j.at("grid").at("rows").size(), 5u);
  EXPECT_EQ(j.at("grid").at("columns").size(), 9u);
  EXPECT_EQ(j.at("grid").at("columns")[0].at("aggregation"), "llm_same_prompt");
  EXPECT_EQ(j.at("grid").at("average").size(), 9u);
  EXPECT_THAT(RenderReport(r), HasSubstr("llm_different_prompt"));
}

TEST(CompareReportTest, JsonCarriesRowsAndDistribution) {
  const LabelMap gold = Labels("10");
  RunSummary structured;
  structured.model = "structured";
  structured.decisions = Labels("00");
  RunSummary llm = Llm("A", "max", "regex", Labels("10"));
  llm.retrieved_note_types["P10"] = {"Progress Note", "Consult"};
  llm.retrieved_note_types["P11"] = {"Progress Note"};
  llm.retrieved_note_types["P99"] = {"Ignored"};
  const EvalReport r = CompareReport({structured, llm}, gold, "all");
  const json j = json::parse(ReportToJson(r));
  EXPECT_EQ(j.at("split"), "all");
  EXPECT_EQ(j.at("rows")[0].at("model"), "structured");
  EXPECT_TRUE(j.at("rows")[0].at("prompt").is_null());
  EXPECT_EQ(j.at("rows")[1].at("tp"), 1);
  EXPECT_DOUBLE_EQ(j.at("rows")[1].at("f1").get<double>(), 1.0);
  const auto& dist = j.at("note_type_distribution");
  ASSERT_EQ(dist.size(), 2u);
  EXPECT_EQ(dist[0].at("note_type"), "Progress Note");
  EXPECT_EQ(dist[0].at("count"), 2);
  const std::string text = RenderReport(r);
  EXPECT_THAT(text, HasSubstr("structured"));
  EXPECT_THAT(text, HasSubstr("Progress Note"));
}

}  // namespace
}  // namespace phenorag
