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

#include "phenorag/retrieval.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <regex>
#include <sstream>

#include "json.hpp"
#include "phenorag/cohort.hpp"
#include "phenorag/error.hpp"
#include "phenorag/rng.hpp"
#include "test_support.hpp"

namespace phenorag {
namespace {

using testing::SourceDir;
using testing::TempDir;
using testing::TestDataDir;
using testing::WriteFile;

// Reference rule set, line-wrapped.
constexpr char kWrappedRuleSet[] = R"(
(?i)(?:\bPulm.{0,10}hypertension\b|\bPH\b|\bPulm.?HTN
\b|\bp.?HTN\b|\bp.?AH\b|\barterial.hypertension\b|\bPHT\b|
(?:\belevated\b|\bhigh\b).(?:\bPASP\b|\bpulm.{0,10}art.
{0,5}sys|\bpulm.{0,10}art.{0,5}pr|\bPAP\b)|(?:\belevated\b|
\bhigh\b).(?:\bRVSP\b|\bRVP\b|\br.{0,5}v.{0,15}sys.{0,7}
pressure\b|\br.{0,5}v.{0,15}pressure\b)\b|\bflat.
{0,7}septum\b|\bseptal.flat|(?:\benlarge.{0,15}|
\bdilat.{0,15})\bpulm.{0,10}art|\bPH-ILD\b|\bPHILD\b|
\bCTEPH\b|\bPH-COPD\b|\bPHCOPD\b)
)";

std::string JoinWrapped(const std::string& wrapped) {
  std::istringstream in(wrapped);
  std::string line;
  std::string out;
  while (std::getline(in, line)) out += Trim(line);
  return out;
}

std::string Words(std::size_t n, const std::string& stem = "w") {
  std::string s;
  for (std::size_t i = 0; i < n; ++i) {
    if (i > 0) s += ' ';
    s += stem + std::to_string(i);
  }
  return s;
}

ClinicalNote Note(std::string text, std::string note_type = "Progress Note",
                  std::string id = "N1") {
  ClinicalNote n;
  n.note_id = std::move(id);
  n.patient_id = "P1";
  n.note_type = std::move(note_type);
  n.timestamp = ParseDate("2020-01-01");
  n.text = std::move(text);
  return n;
}

std::vector<Snippet> Snippets(const std::vector<std::string>& texts) {
  std::vector<Snippet> out;
  for (std::size_t i = 0; i < texts.size(); ++i) {
    Snippet s;
    s.snippet_id = MakeSnippetId("N" + std::to_string(i), 0);
    s.patient_id = "P1";
    s.note_id = "N" + std::to_string(i);
    s.text = texts[i];
    out.push_back(s);
  }
  return out;
}

TEST(ChunkTest, LongNoteSplitsIntoFullWindowsAndRemainder) {
  const auto snippets = ChunkNote(Note(Words(5000)), ChunkerConfig{});
  ASSERT_EQ(snippets.size(), 3u);
  EXPECT_EQ(snippets[0].end_token - snippets[0].start_token, 2048u);
  EXPECT_EQ(snippets[1].end_token - snippets[1].start_token, 2048u);
  EXPECT_EQ(snippets[2].end_token - snippets[2].start_token, 904u);
  EXPECT_EQ(snippets[2].end_token, 5000u);
  EXPECT_EQ(snippets[0].snippet_id, "N1:00000");
  EXPECT_EQ(snippets[2].snippet_id, "N1:00002");
  for (const auto& s : snippets) {
    EXPECT_EQ(s.patient_id, "P1");
    EXPECT_EQ(s.note_type, "Progress Note");
  }
}

TEST(ChunkTest, ExactWindowAndEmptyNote) {
  EXPECT_EQ(ChunkNote(Note(Words(2048)), ChunkerConfig{}).size(), 1u);
  EXPECT_EQ(ChunkNote(Note(Words(2049)), ChunkerConfig{}).size(), 2u);
  EXPECT_TRUE(ChunkNote(Note(""), ChunkerConfig{}).empty());
  EXPECT_TRUE(ChunkNote(Note(" \n\t "), ChunkerConfig{}).empty());
}

TEST(ChunkTest, OverlapAdvancesByStride) {
  ChunkerConfig cfg;
  cfg.snippet_size = 4;
  cfg.overlap = 2;
  const auto snippets = ChunkNote(Note(Words(10)), cfg);
  ASSERT_EQ(snippets.size(), 4u);
  EXPECT_EQ(snippets[0].text, "w0 w1 w2 w3");
  EXPECT_EQ(snippets[1].text, "w2 w3 w4 w5");
  EXPECT_EQ(snippets[3].start_token, 6u);
  EXPECT_EQ(snippets[3].end_token, 10u);
}

TEST(ChunkTest, WhitespaceSnippetsNormalizeSpacing) {
  ChunkerConfig cfg;
  cfg.snippet_size = 2;
  const auto snippets = ChunkNote(Note("a \n b\t\tc"), cfg);
  ASSERT_EQ(snippets.size(), 2u);
  EXPECT_EQ(snippets[0].text, "a b");
  EXPECT_EQ(snippets[1].text, "c");
}

TEST(ChunkTest, CharBudgetKeepsCodepointsWhole) {
  ChunkerConfig cfg;
  cfg.tokenizer = TokenizerKind::kCharBudget;
  cfg.chars_per_token = 4;
  cfg.snippet_size = 2;
  auto snippets = ChunkNote(Note("abcdefghij"), cfg);
  ASSERT_EQ(snippets.size(), 2u);
  EXPECT_EQ(snippets[0].text, "abcdefgh");
  EXPECT_EQ(snippets[1].text, "ij");
  EXPECT_EQ(CountTokens("abcdefghij", cfg), 3u);

  // Each é is two bytes but one code point.
  cfg.chars_per_token = 1;
  cfg.snippet_size = 3;
  snippets = ChunkNote(Note("\xC3\xA9\xC3\xA9\xC3\xA9\xC3\xA9"), cfg);
  ASSERT_EQ(snippets.size(), 2u);
  EXPECT_EQ(snippets[0].text, "\xC3\xA9\xC3\xA9\xC3\xA9");
  EXPECT_EQ(snippets[1].text, "\xC3\xA9");
}

TEST(ChunkTest, InvalidConfigIsRejected) {
  ChunkerConfig cfg;
  cfg.snippet_size = 0;
  EXPECT_THROW(ValidateChunkerConfig(cfg), ConfigError);
  cfg = {};
  cfg.overlap = cfg.snippet_size;
  EXPECT_THROW(ChunkNote(Note("a"), cfg), ConfigError);
  cfg = {};
  cfg.tokenizer = TokenizerKind::kCharBudget;
  cfg.chars_per_token = 0;
  EXPECT_THROW(ValidateChunkerConfig(cfg), ConfigError);
}

// Without overlap, snippets partition the note: every token lands in exactly
// one snippet, in order, and no snippet is over budget.
TEST(ChunkTest, SnippetsCoverNoteExactly) {
  Rng rng(21);
  const char alphabet[] = {'a', 'b', ' ', '\n', 'x', '.'};
  for (int round = 0; round < 300; ++round) {
    std::string text;
    const auto len = rng.Below(400);
    for (std::uint64_t i = 0; i < len; ++i) text += alphabet[rng.Below(6)];
    ChunkerConfig cfg;
    cfg.snippet_size = 1 + rng.Below(30);
    const auto snippets = ChunkNote(Note(text), cfg);
    std::string joined;
    std::size_t expected_start = 0;
    for (const auto& s : snippets) {
      EXPECT_EQ(s.start_token, expected_start);
      EXPECT_LE(s.end_token - s.start_token, cfg.snippet_size);
      EXPECT_GT(s.end_token, s.start_token);
      expected_start = s.end_token;
      if (!joined.empty()) joined += ' ';
      joined += s.text;
    }
    EXPECT_EQ(expected_start, CountTokens(text, cfg));
    std::string tokens;
    for (const auto& t : WhitespaceTokens(text)) {
      if (!tokens.empty()) tokens += ' ';
      tokens += text.substr(t.begin, t.end - t.begin);
    }
    EXPECT_EQ(joined, tokens);

    cfg.tokenizer = TokenizerKind::kCharBudget;
    cfg.chars_per_token = 0.5 + static_cast<double>(rng.Below(8)) / 2;
    std::string raw;
    for (const auto& s : ChunkNote(Note(text), cfg)) raw += s.text;
    EXPECT_EQ(raw, text.empty() ? "" : text);
  }
}

TEST(ChunkTest, PatientSnippetsStayWithinNotes) {
  PatientRecord rec;
  rec.patient_id = "P1";
  rec.notes = {Note(Words(5), "A", "N1"), Note(Words(3), "B", "N2")};
  ChunkerConfig cfg;
  cfg.snippet_size = 4;
  const auto snippets = ChunkPatient(rec, cfg);
  ASSERT_EQ(snippets.size(), 3u);
  EXPECT_EQ(snippets[0].note_id, "N1");
  EXPECT_EQ(snippets[1].note_id, "N1");
  EXPECT_EQ(snippets[1].text, "w4");
  EXPECT_EQ(snippets[2].note_id, "N2");
  EXPECT_EQ(snippets[2].note_type, "B");
}

TEST(PatternTest, DefaultRuleSetIsTheJoinedReferenceText) {
  EXPECT_EQ(DefaultPhPattern(), JoinWrapped(kWrappedRuleSet));
}

TEST(PatternTest, ShippedFilesMatchBuiltIns) {
  const auto patterns = SourceDir() / "config" / "patterns";
  const auto include = LoadPatternFile(patterns / "pulmonary_hypertension.txt");
  ASSERT_EQ(include.size(), 1u);
  EXPECT_EQ(include[0], DefaultPhPattern());
  EXPECT_EQ(LoadPatternFile(patterns / "echo_ct_exclusions.txt"),
            EchoCtExclusionPatterns());
}

TEST(PatternTest, GoldenSuiteMatchesReferenceEngine) {
  std::ifstream in(TestDataDir() / "regex_golden.jsonl");
  ASSERT_TRUE(in);
  const CompiledPatternSet patterns(DefaultPatternSet());
  std::string body(DefaultPhPattern());
  ASSERT_EQ(body.rfind("(?i)", 0), 0u);
  const std::regex ecma(body.substr(4),
                        std::regex::ECMAScript | std::regex::icase);
  std::string line;
  int cases = 0;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto j = nlohmann::json::parse(line);
    const std::string text = j.at("text");
    const bool expected = j.at("match");
    EXPECT_EQ(patterns.Included(text), expected) << text;
    EXPECT_EQ(std::regex_search(text, ecma), expected) << text;
    ++cases;
  }
  EXPECT_GE(cases, 50);
}

TEST(PatternTest, RetrievalExamples) {
  const CompiledPatternSet patterns(DefaultPatternSet());
  EXPECT_TRUE(patterns.Included("patient has pulmonary hypertension"));
  EXPECT_TRUE(patterns.Included("elevated PASP noted on exam"));
  EXPECT_FALSE(patterns.Included("pathology report unremarkable"));
  EXPECT_TRUE(patterns.Included("pH 7.4 on arterial gas"));
}

TEST(PatternTest, ExclusionDropsImagingReportsOnly) {
  const CompiledPatternSet plain(DefaultPatternSet());
  const CompiledPatternSet excluding(
      PatternSet{{std::string(DefaultPhPattern())}, EchoCtExclusionPatterns()});
  const std::string echo =
      "ECHOCARDIOGRAM REPORT\nFINDINGS: mildly dilated RV.\nIMPRESSION: "
      "possible pulmonary hypertension.";
  EXPECT_TRUE(plain.Accepts(echo));
  EXPECT_FALSE(excluding.Accepts(echo));
  EXPECT_TRUE(excluding.Included(echo));

  const std::string progress =
      "ASSESSMENT AND PLAN: pulmonary hypertension confirmed by right heart "
      "catheterization.";
  EXPECT_TRUE(excluding.Accepts(progress));
  for (const auto& phrase : GeneratorPhrases().affirmative) {
    EXPECT_FALSE(excluding.Excluded(phrase)) << phrase;
  }
  EXPECT_TRUE(excluding.Excluded(GeneratorPhrases().echo_header));
  EXPECT_TRUE(excluding.Excluded(GeneratorPhrases().ct_header));
}

TEST(PatternTest, IncludeFoldsCaseExcludeDoesNot) {
  const CompiledPatternSet p(
      PatternSet{{"pulmonary"}, {R"(\bECHOCARDIOGRAM REPORT\b)"}});
  EXPECT_TRUE(p.Included("PULMONARY"));
  EXPECT_TRUE(p.Excluded("ECHOCARDIOGRAM REPORT"));
  EXPECT_FALSE(p.Excluded("echocardiogram report"));
  const CompiledPatternSet folded(PatternSet{{"x"}, {"(?i)echo"}});
  EXPECT_TRUE(folded.Excluded("ECHO"));
}

TEST(PatternTest, BadPatternSetsAreConfigErrors) {
  EXPECT_THROW(CompiledPatternSet(PatternSet{}), ConfigError);
  EXPECT_THROW(CompiledPatternSet(PatternSet{{"(open"}, {}}), ConfigError);
  EXPECT_THROW(CompiledPatternSet(PatternSet{{"ok"}, {"[bad"}}), ConfigError);
}

TEST(RetrieveTest, KeepsOrderAndDeduplicates) {
  auto snippets = Snippets({"known PH", "nothing", "CTEPH noted"});
  snippets.push_back(snippets[0]);
  const CompiledPatternSet patterns(DefaultPatternSet());
  const auto out = Retrieve(snippets, patterns);
  ASSERT_EQ(out.size(), 2u);
  EXPECT_EQ(out[0].text, "known PH");
  EXPECT_EQ(out[1].text, "CTEPH noted");
  EXPECT_TRUE(Retrieve({}, patterns).empty());
}

// Adding exclusions never adds snippets, and retrieval is idempotent.
TEST(RetrieveTest, ExclusionIsMonotoneAndRetrievalIdempotent) {
  CohortSpec spec;
  spec.n_patients = 40;
  spec.seed = 3;
  ChunkerConfig chunker;
  chunker.snippet_size = 64;
  const CompiledPatternSet plain(DefaultPatternSet());
  const auto excl = EchoCtExclusionPatterns();
  for (const auto& [id, rec] : GenerateCohort(spec)) {
    const auto all = ChunkPatient(rec, chunker);
    const auto base = Retrieve(all, plain);
    EXPECT_EQ(Retrieve(base, plain), base);
    std::vector<std::string> active;
    std::size_t previous = base.size();
    for (const auto& e : excl) {
      active.push_back(e);
      const CompiledPatternSet p(
          PatternSet{{std::string(DefaultPhPattern())}, active});
      const auto kept = Retrieve(all, p);
      EXPECT_LE(kept.size(), previous) << id;
      for (const auto& s : kept) {
        EXPECT_NE(std::find(base.begin(), base.end(), s), base.end());
      }
      EXPECT_EQ(Retrieve(kept, p), kept);
      previous = kept.size();
    }
  }
}

TEST(PatternFileTest, SkipsCommentsAndBlankLines) {
  TempDir dir;
  WriteFile(dir / "p.txt", "# header\n\nfoo\r\n#bar\nbaz\n");
  EXPECT_EQ(LoadPatternFile(dir / "p.txt"),
            (std::vector<std::string>{"foo", "baz"}));
  EXPECT_THROW(LoadPatternFile(dir / "missing.txt"), IoError);
}

}  // namespace
}  // namespace phenorag
