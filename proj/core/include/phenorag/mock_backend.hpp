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

#ifndef PHENORAG_MOCK_BACKEND_HPP_
#define PHENORAG_MOCK_BACKEND_HPP_

#include <string>
#include <vector>

#include "phenorag/llm_client.hpp"
#include "phenorag/text.hpp"

namespace phenorag {

struct MockRule {
  std::string trigger;  // regex searched in the prompt
  std::string response_template;  // "{match}" expands to the matched text
  int priority = 0;

  friend bool operator==(const MockRule&, const MockRule&) = default;
};

struct MockConfig {
  std::vector<MockRule> rules;
  std::string default_response = "Answer: (b) No. The excerpt does not "
                                 "establish the diagnosis.";

  friend bool operator==(const MockConfig&, const MockConfig&) = default;
};

// Deterministic oracle: the highest-priority rule whose trigger matches the
// prompt answers; ties go to the earlier rule. A pure function of the
// prompt, so thread interleavings cannot change its output.
class MockBackend : public CompletionBackend {
 public:
  // Throws ConfigError when a trigger does not compile.
  explicit MockBackend(MockConfig config);

  std::string Complete(const CompletionRequest& req) override;

 private:
  struct CompiledRule {
    Regex trigger;
    std::string response;
    int priority;
  };
  MockConfig config_;
  std::vector<CompiledRule> rules_;  // sorted by priority, stable
};

inline constexpr char kMockPositive[] =
    "Answer: (a) Yes. The excerpt documents an established diagnosis.";
inline constexpr char kMockNegative[] =
    "Answer: (b) No. The excerpt does not establish the diagnosis.";

// Rule table mirroring an LLM on the synthetic cohort: affirmative
// statements answer yes (one phrasing is deliberately missed), "possible"
// mentions answer no, imaging suspicion is a false positive unless the
// prompt carries the disregard-imaging amendment, and aggregation prompts
// answer yes iff some collected response is positive.
MockConfig SyntheticOracleConfig();

}  // namespace phenorag

#endif  // PHENORAG_MOCK_BACKEND_HPP_
