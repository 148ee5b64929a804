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

#include <fstream>
#include <sstream>

#include "phenorag/error.hpp"
#include "phenorag/text.hpp"

namespace phenorag {
namespace {

constexpr std::string_view kSnippetBody =
    R"(You are a physician reviewing an excerpt from a patient's clinical record.
Question: Based only on the excerpt below, does the patient have pulmonary hypertension (PH)?
{steering}
{amendments}
Excerpt:
"""
{snippet}
"""
{options}
{cot})";

constexpr std::string_view kAnyPositiveBody =
    R"(You are a physician reviewing responses from several reviewers. Each reviewer read a different excerpt from the same patient's clinical record and decided whether it shows pulmonary hypertension (PH).
{amendments}
Reviewer responses:
"""
{snippet}
"""
Did any of the responses indicate a positive diagnosis of PH?
{options}
{cot})";

constexpr std::string_view kImagingAmendmentText =
    "Disregard any content from echocardiogram (ECHO) or computed tomography "
    "(CT) reports; suspicion raised in such reports does not establish the "
    "diagnosis.";

std::string SteeringText(SteeringPolarity p) {
  if (p == SteeringPolarity::kHistoryYes) {
    return "Count a documented history of PH as a yes. Count a possible or "
           "suspected case of PH as a no.";
  }
  return "Count a documented history of PH as a no. Count a possible or "
         "suspected case of PH as a yes.";
}

std::string OptionsText(const PromptTemplate& t) {
  std::string out;
  if (t.multiple_choice) {
    out =
        "Choose one of the following options:\n(a) Yes\n(b) No\nStart your "
        "reply with \"Answer:\" followed by the option.";
  } else {
    out = "Start your reply with \"Answer: yes\" or \"Answer: no\".";
  }
  if (t.explain_reasoning) {
    out += ' ';
    out += kExplainPhrase;
  }
  return out;
}

std::string AmendmentsText(const PromptTemplate& t) {
  std::string out;
  for (const auto& id : t.amendments) {
    auto text = AmendmentText(id);
    if (!text) throw ConfigError("unknown prompt amendment '" + id + "'");
    if (!out.empty()) out += '\n';
    out += *text;
  }
  return out;
}

struct Placeholder {
  std::string_view name;
  std::string value;
};

std::string Expand(std::string_view line,
                   const std::vector<Placeholder>& values) {
  std::string out;
  std::size_t i = 0;
  while (i < line.size()) {
    if (line[i] == '{') {
      bool replaced = false;
      for (const auto& p : values) {
        const std::size_t n = p.name.size();
        if (line.compare(i + 1, n, p.name) == 0 && i + 1 + n < line.size() &&
            line[i + 1 + n] == '}') {
          out += p.value;
          i += n + 2;
          replaced = true;
          break;
        }
      }
      if (replaced) continue;
    }
    out += line[i++];
  }
  return out;
}

std::string StripLeadingPunct(std::string_view s) {
  std::size_t i = 0;
  while (i < s.size() &&
         (std::string_view(" \t\r\n.,:;)-*").find(s[i]) != std::string_view::npos)) {
    ++i;
  }
  return Trim(s.substr(i));
}

SnippetVerdict Verdict(std::string_view raw, Decision d,
                       std::size_t answer_end) {
  SnippetVerdict v;
  v.raw_response = std::string(raw);
  v.decision = d;
  v.reasoning = StripLeadingPunct(raw.substr(std::min(answer_end, raw.size())));
  return v;
}

Decision FromWord(std::string_view word) {
  return ToLowerAscii(word) == "yes" ? Decision::kPositive
                                     : Decision::kNegative;
}

Decision FromOption(std::string_view letter) {
  return ToLowerAscii(letter) == "a" ? Decision::kPositive
                                     : Decision::kNegative;
}

}  // namespace

std::string_view DesignName(PromptDesign d) {
  switch (d) {
    case PromptDesign::kA:
      return "A";
    case PromptDesign::kB:
      return "B";
    case PromptDesign::kC:
      return "C";
    case PromptDesign::kD:
      return "D";
    case PromptDesign::kE:
      return "E";
  }
  return "";
}

std::optional<PromptDesign> ParseDesign(std::string_view text) {
  std::string t = ToUpperAscii(Trim(text));
  for (auto d : kAllDesigns) {
    if (t == DesignName(d)) return d;
  }
  return std::nullopt;
}

std::string_view PolarityName(SteeringPolarity p) {
  return p == SteeringPolarity::kHistoryYes ? "history_yes" : "history_no";
}

std::optional<SteeringPolarity> ParsePolarity(std::string_view text) {
  std::string t = ToLowerAscii(Trim(text));
  if (t == "history_yes") return SteeringPolarity::kHistoryYes;
  if (t == "history_no") return SteeringPolarity::kHistoryNo;
  return std::nullopt;
}

std::optional<std::string_view> AmendmentText(std::string_view id) {
  if (id == kImagingAmendment) return kImagingAmendmentText;
  return std::nullopt;
}

std::string_view DefaultSnippetBody() { return kSnippetBody; }
std::string_view AnyPositiveBody() { return kAnyPositiveBody; }

PromptTemplate MakeDesignTemplate(PromptDesign design,
                                  SteeringPolarity polarity) {
  PromptTemplate t;
  t.design_id = std::string(DesignName(design));
  t.steering = true;
  t.steering_polarity = polarity;
  t.body = std::string(kSnippetBody);
  switch (design) {
    case PromptDesign::kA:
      t.cot = true;
      t.multiple_choice = true;
      break;
    case PromptDesign::kB:
      t.cot = true;
      break;
    case PromptDesign::kC:
      t.cot = true;
      t.explain_reasoning = false;
      break;
    case PromptDesign::kD:
      t.multiple_choice = true;
      break;
    case PromptDesign::kE:
      break;
  }
  return t;
}

PromptTemplate MakeAnyPositiveTemplate() {
  PromptTemplate t;
  t.design_id = "any_positive";
  t.steering = false;
  t.cot = false;
  t.multiple_choice = false;
  t.explain_reasoning = true;
  t.body = std::string(kAnyPositiveBody);
  return t;
}

std::string LoadTemplateBody(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open template " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  std::string body = ss.str();
  while (!body.empty() && (body.back() == '\n' || body.back() == '\r')) {
    body.pop_back();
  }
  return body;
}

void ValidateTemplate(const PromptTemplate& tmpl) {
  if (tmpl.body.find("{snippet}") == std::string::npos) {
    throw ConfigError("prompt template '" + tmpl.design_id +
                      "' has no {snippet} placeholder");
  }
  for (const auto& id : tmpl.amendments) {
    if (!AmendmentText(id)) {
      throw ConfigError("unknown prompt amendment '" + id + "'");
    }
  }
}

std::string RenderPrompt(const PromptTemplate& tmpl,
                         std::string_view snippet_text) {
  if (snippet_text.empty()) {
    throw InvalidArgument("cannot render a prompt for an empty snippet");
  }
  const std::vector<Placeholder> values = {
      {"snippet", std::string(snippet_text)},
      {"options", OptionsText(tmpl)},
      {"steering", tmpl.steering ? SteeringText(tmpl.steering_polarity) : ""},
      {"cot", tmpl.cot ? "Before answering, " + std::string(kCotPhrase) + "."
                       : std::string()},
      {"amendments", AmendmentsText(tmpl)},
  };

  std::string out;
  std::string_view body = tmpl.body;
  std::size_t start = 0;
  bool first = true;
  while (start <= body.size()) {
    std::size_t nl = body.find('\n', start);
    std::string_view line = body.substr(
        start, nl == std::string_view::npos ? std::string_view::npos
                                            : nl - start);
    bool drop = false;
    const std::string trimmed = Trim(line);
    for (const auto& p : values) {
      if (p.value.empty() && trimmed.size() == p.name.size() + 2 &&
          trimmed.front() == '{' && trimmed.back() == '}' &&
          std::string_view(trimmed).substr(1, p.name.size()) == p.name) {
        drop = true;
        break;
      }
    }
    if (!drop) {
      if (!first) out += '\n';
      out += Expand(line, values);
      first = false;
    }
    if (nl == std::string_view::npos) break;
    start = nl + 1;
  }
  return out;
}

std::string_view DecisionName(Decision d) {
  switch (d) {
    case Decision::kPositive:
      return "positive";
    case Decision::kNegative:
      return "negative";
    case Decision::kUnparseable:
      return "unparseable";
  }
  return "";
}

std::optional<Decision> ParseDecisionName(std::string_view text) {
  if (text == "positive") return Decision::kPositive;
  if (text == "negative") return Decision::kNegative;
  if (text == "unparseable") return Decision::kUnparseable;
  return std::nullopt;
}

SnippetVerdict ParseResponse(std::string_view raw, const PromptTemplate& tmpl) {
  static const Regex kAnswerOption(
      R"(\banswer\s*(?:is)?\s*[:\-]?\s*\(?([ab])\b\)?)", true);
  static const Regex kOptionToken(R"(\(([ab])\))", true);
  static const Regex kAnswerWord(
      R"(\banswer\s*(?:is)?\s*[:\-]?\s*(?:\(?[ab]\)\s*)?(yes|no)\b)", true);
  static const Regex kLeadingWord(R"(\A[\s"'*>]*(yes|no)\b)", true);
  static const Regex kAnyWord(R"(\b(yes|no)\b)", true);

  if (tmpl.multiple_choice) {
    if (auto m = kAnswerOption.Find(raw)) {
      return Verdict(raw, FromOption(*m->groups[0]), m->position + m->length);
    }
    std::optional<RegexMatch> first;
    bool mixed = false;
    for (std::size_t pos = 0; auto m = kOptionToken.Find(raw, pos);) {
      if (!first) {
        first = m;
      } else if (ToLowerAscii(*m->groups[0]) !=
                 ToLowerAscii(*first->groups[0])) {
        mixed = true;
      }
      pos = m->position + m->length;
    }
    if (first && !mixed) {
      return Verdict(raw, FromOption(*first->groups[0]),
                     first->position + first->length);
    }
  }

  if (auto m = kAnswerWord.Find(raw)) {
    return Verdict(raw, FromWord(*m->groups[0]), m->position + m->length);
  }
  if (auto m = kLeadingWord.Find(raw)) {
    return Verdict(raw, FromWord(*m->groups[0]), m->position + m->length);
  }
  std::optional<RegexMatch> first;
  bool mixed = false;
  for (std::size_t pos = 0; auto m = kAnyWord.Find(raw, pos);) {
    if (!first) {
      first = m;
    } else if (ToLowerAscii(*m->groups[0]) !=
               ToLowerAscii(*first->groups[0])) {
      mixed = true;
    }
    pos = m->position + m->length;
  }
  if (first && !mixed) {
    return Verdict(raw, FromWord(*first->groups[0]),
                   first->position + first->length);
  }

  SnippetVerdict v;
  v.raw_response = std::string(raw);
  v.decision = Decision::kUnparseable;
  v.reasoning = Trim(raw);
  return v;
}

}  // namespace phenorag
