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

#include "phenorag/mock_backend.hpp"

#include <algorithm>
#include <numeric>

namespace phenorag {

MockBackend::MockBackend(MockConfig config) : config_(std::move(config)) {
  std::vector<std::size_t> order(config_.rules.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) {
                     return config_.rules[a].priority >
                            config_.rules[b].priority;
                   });
  for (std::size_t i : order) {
    const auto& r = config_.rules[i];
    rules_.push_back({Regex(r.trigger), r.response_template, r.priority});
  }
}

std::string MockBackend::Complete(const CompletionRequest& req) {
  for (const auto& rule : rules_) {
    auto m = rule.trigger.Find(req.prompt);
    if (!m) continue;
    std::string out = rule.response;
    const std::string matched = req.prompt.substr(m->position, m->length);
    for (std::size_t pos = 0;
         (pos = out.find("{match}", pos)) != std::string::npos;
         pos += matched.size()) {
      out.replace(pos, 7, matched);
    }
    return out;
  }
  return config_.default_response;
}

MockConfig SyntheticOracleConfig() {
  MockConfig cfg;
  cfg.default_response = kMockNegative;
  cfg.rules = {
      // Aggregation prompts: positive iff any collected response was.
      {R"(Decision: positive)", kMockPositive, 200},
      {R"(Decision: (?:negative|unparseable))", kMockNegative, 190},
      // The amendment suppresses imaging-report evidence entirely.
      {R"((?s)\A(?=.*Disregard any content from echocardiogram)(?=.*(?:ECHOCARDIOGRAM REPORT|CT CHEST)))",
       kMockNegative, 100},
      {R"(Possible pulmonary hypertension|rule out PH)", kMockNegative, 90},
      {R"(confirmed by right heart catheterization|Known history of pulmonary arterial hypertension|CTEPH diagnosed|PH-ILD with|Right heart catheterization confirmed PH|Diagnosis: PAH)",
       kMockPositive, 50},
      {R"((?i)severe pulmonary hypertension)", kMockPositive, 40},
      // Imaging suspicion fools the model: the false positives that
      // exclusion is meant to remove.
      {R"(suggestive of pulmonary hypertension|can be seen with pulmonary hypertension)",
       kMockPositive, 30},
  };
  return cfg;
}

}  // namespace phenorag
