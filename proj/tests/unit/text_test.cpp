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

#include "phenorag/text.hpp"

#include <gtest/gtest.h>

#include <thread>

#include "phenorag/error.hpp"
#include "phenorag/rng.hpp"

namespace phenorag {
namespace {

TEST(TextTest, TrimAndCase) {
  EXPECT_EQ(Trim("  a b \t\n"), "a b");
  EXPECT_EQ(Trim(""), "");
  EXPECT_EQ(Trim(" \n "), "");
  EXPECT_EQ(ToLowerAscii("AbC-1"), "abc-1");
  EXPECT_EQ(ToUpperAscii("i27.9"), "I27.9");
}

TEST(TextTest, WhitespaceTokens) {
  const std::string text = "  alpha beta\n\tgamma  ";
  const auto tokens = WhitespaceTokens(text);
  ASSERT_EQ(tokens.size(), 3u);
  EXPECT_EQ(text.substr(tokens[0].begin, tokens[0].end - tokens[0].begin),
            "alpha");
  EXPECT_EQ(text.substr(tokens[2].begin, tokens[2].end - tokens[2].begin),
            "gamma");
  EXPECT_EQ(CountWhitespaceTokens(text), 3u);
  EXPECT_EQ(CountWhitespaceTokens(""), 0u);
  EXPECT_TRUE(WhitespaceTokens("   ").empty());
}

TEST(TextTest, CountMatchesSpans) {
  Rng rng(3);
  const char alphabet[] = {'a', 'b', ' ', '\n', '\t', 'z'};
  for (int round = 0; round < 200; ++round) {
    std::string s;
    const auto n = rng.Below(40);
    for (std::uint64_t i = 0; i < n; ++i) s += alphabet[rng.Below(6)];
    EXPECT_EQ(CountWhitespaceTokens(s), WhitespaceTokens(s).size()) << s;
  }
}

TEST(TextTest, CodepointOffsetsSkipContinuationBytes) {
  const std::string text = "a\xC3\xA9" "b\xE2\x82\xAC";  // a é b €
  const auto offsets = CodepointOffsets(text);
  EXPECT_EQ(offsets, (std::vector<std::size_t>{0, 1, 3, 4, 7}));
  EXPECT_EQ(CodepointOffsets(""), std::vector<std::size_t>{0});
}

TEST(RegexTest, DotDoesNotCrossNewlines) {
  Regex re("a.b");
  EXPECT_TRUE(re.Search("a-b"));
  EXPECT_FALSE(re.Search("a\nb"));
  EXPECT_TRUE(Regex("(?s)a.b").Search("a\nb"));
}

TEST(RegexTest, AnchorsMatchTextEnds) {
  Regex re("^b");
  EXPECT_FALSE(re.Search("a\nb"));
  EXPECT_TRUE(Regex("(?m)^b").Search("a\nb"));
  EXPECT_TRUE(Regex("a$").Search("xa"));
}

TEST(RegexTest, CaseFolding) {
  EXPECT_FALSE(Regex("abc").Search("ABC"));
  EXPECT_TRUE(Regex("abc", true).Search("ABC"));
  EXPECT_TRUE(Regex("(?i)abc").Search("aBc"));
}

TEST(RegexTest, FindReportsPositionAndGroups) {
  Regex re("(x)(y)?z");
  auto m = re.Find("..xz..");
  ASSERT_TRUE(m);
  EXPECT_EQ(m->position, 2u);
  EXPECT_EQ(m->length, 2u);
  ASSERT_EQ(m->groups.size(), 2u);
  EXPECT_EQ(m->groups[0], "x");
  EXPECT_FALSE(m->groups[1].has_value());
  EXPECT_FALSE(re.Find("nothing"));
}

TEST(RegexTest, FindFromOffsetSeesPrecedingText) {
  Regex re(R"(\bword)");
  // Offset 1 lands inside "aword"; \b must see the preceding 'a'.
  EXPECT_FALSE(re.Find("aword", 1));
  auto m = re.Find("word word", 1);
  ASSERT_TRUE(m);
  EXPECT_EQ(m->position, 5u);
  EXPECT_FALSE(re.Find("abc", 4));
}

TEST(RegexTest, InvalidPatternIsConfigError) {
  EXPECT_THROW(Regex("(unclosed"), ConfigError);
}

TEST(RegexTest, CopiesShareProgramAcrossThreads) {
  const Regex re(R"(\bPH\b)", true);
  std::atomic<int> hits{0};
  std::vector<std::jthread> threads;
  for (int t = 0; t < 4; ++t) {
    threads.emplace_back([copy = re, &hits] {
      for (int i = 0; i < 500; ++i) hits += copy.Search("known ph here") ? 1 : 0;
    });
  }
  threads.clear();
  EXPECT_EQ(hits.load(), 2000);
}

}  // namespace
}  // namespace phenorag
