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

#include "phenorag/app/config.hpp"

#include <yaml-cpp/yaml.h>

#include <charconv>
#include <fstream>
#include <functional>
#include <set>
#include <sstream>

#include "phenorag/error.hpp"
#include "phenorag/text.hpp"

namespace phenorag::app {
namespace {

std::string_view TokenizerName(TokenizerKind k) {
  return k == TokenizerKind::kWhitespace ? "whitespace" : "char_budget";
}

std::optional<TokenizerKind> ParseTokenizer(std::string_view s) {
  const std::string t = ToLowerAscii(Trim(s));
  if (t == "whitespace") return TokenizerKind::kWhitespace;
  if (t == "char_budget") return TokenizerKind::kCharBudget;
  return std::nullopt;
}

std::string_view BackendName(BackendKind k) {
  return k == BackendKind::kMock ? "mock" : "http";
}

std::optional<BackendKind> ParseBackend(std::string_view s) {
  const std::string t = ToLowerAscii(Trim(s));
  if (t == "mock") return BackendKind::kMock;
  if (t == "http") return BackendKind::kHttp;
  return std::nullopt;
}

std::string Join(const std::vector<std::string>& parts) {
  std::string out;
  for (const auto& p : parts) {
    if (!out.empty()) out += ", ";
    out += p;
  }
  return out;
}

// Reads a YAML mapping while remembering which keys were consumed, so that
// leftovers can be reported as unknown.
class Reader {
 public:
  Reader(YAML::Node node, std::string path)
      : node_(std::move(node)), path_(std::move(path)) {
    if (node_ && !node_.IsNull() && !node_.IsMap()) {
      throw ConfigError(Where() + "expected a mapping");
    }
  }

  bool Has(const std::string& key) {
    seen_.insert(key);
    return node_.IsMap() && node_[key] && !node_[key].IsNull();
  }

  std::string Path(const std::string& key) const {
    return path_.empty() ? key : path_ + "." + key;
  }

  Reader Child(const std::string& key) {
    seen_.insert(key);
    return Reader(node_.IsMap() ? node_[key] : YAML::Node(), Path(key));
  }

  YAML::Node Raw(const std::string& key) {
    seen_.insert(key);
    return node_.IsMap() ? node_[key] : YAML::Node();
  }

  std::string Scalar(const std::string& key) {
    YAML::Node n = node_[key];
    if (!n.IsScalar()) throw ConfigError(Path(key) + ": expected a scalar");
    return n.Scalar();
  }

  void Get(const std::string& key, std::string& out) {
    if (!Has(key)) return;
    out = Scalar(key);
  }

  void Get(const std::string& key, bool& out) {
    if (!Has(key)) return;
    const std::string s = ToLowerAscii(Scalar(key));
    if (s == "true" || s == "yes" || s == "on") {
      out = true;
    } else if (s == "false" || s == "no" || s == "off") {
      out = false;
    } else {
      throw ConfigError(Path(key) + ": expected true or false, got '" + s +
                        "'");
    }
  }

  template <typename T>
    requires std::is_integral_v<T>
  void Get(const std::string& key, T& out) {
    if (!Has(key)) return;
    const std::string s = Trim(Scalar(key));
    T value{};
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
    if (ec != std::errc() || ptr != s.data() + s.size()) {
      throw ConfigError(Path(key) + ": expected an integer, got '" +
                        s + "'");
    }
    out = value;
  }

  void Get(const std::string& key, double& out) {
    if (!Has(key)) return;
    const std::string s = Trim(Scalar(key));
    double value = 0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
    if (ec != std::errc() || ptr != s.data() + s.size()) {
      throw ConfigError(Path(key) + ": expected a number, got '" + s + "'");
    }
    out = value;
  }

  void Get(const std::string& key, std::chrono::milliseconds& out) {
    std::int64_t ms = out.count();
    Get(key, ms);
    out = std::chrono::milliseconds(ms);
  }

  void Get(const std::string& key, std::vector<std::string>& out) {
    if (!Has(key)) {
      if (node_.IsMap() && node_[key] && node_[key].IsNull()) out.clear();
      return;
    }
    YAML::Node n = node_[key];
    if (!n.IsSequence()) throw ConfigError(Path(key) + ": expected a list");
    out.clear();
    for (std::size_t i = 0; i < n.size(); ++i) {
      if (!n[i].IsScalar()) {
        throw ConfigError(Path(key) + "[" + std::to_string(i) +
                          "]: expected a scalar");
      }
      out.push_back(n[i].Scalar());
    }
  }

  template <typename E>
  void GetEnum(const std::string& key, E& out,
               std::optional<E> (*parse)(std::string_view),
               std::vector<std::string> allowed) {
    if (!Has(key)) return;
    out = ParseEnum(Path(key), Scalar(key), parse, allowed);
  }

  template <typename E>
  void GetEnumList(const std::string& key, std::vector<E>& out,
                   std::optional<E> (*parse)(std::string_view),
                   const std::vector<std::string>& allowed) {
    std::vector<std::string> raw;
    if (!Has(key)) return;
    Get(key, raw);
    out.clear();
    for (std::size_t i = 0; i < raw.size(); ++i) {
      out.push_back(ParseEnum(Path(key) + "[" + std::to_string(i) + "]",
                              raw[i], parse, allowed));
    }
  }

  // Unknown keys are configuration errors.
  void Finish() const {
    if (!node_.IsMap()) return;
    for (const auto& kv : node_) {
      const std::string key = kv.first.Scalar();
      if (!seen_.contains(key)) {
        throw ConfigError(Path(key) + ": unknown key");
      }
    }
  }

  template <typename E>
  static E ParseEnum(const std::string& path, const std::string& value,
                     std::optional<E> (*parse)(std::string_view),
                     const std::vector<std::string>& allowed) {
    auto v = parse(value);
    if (!v) {
      throw ConfigError(path + ": unknown value '" + value +
                        "' (expected one of " + Join(allowed) + ")");
    }
    return *v;
  }

 private:
  std::string Where() const { return path_.empty() ? "" : path_ + ": "; }

  YAML::Node node_;
  std::string path_;
  std::set<std::string> seen_;
};

const std::vector<std::string> kDesignNames = {"A", "B", "C", "D", "E"};
const std::vector<std::string> kPolarityNames = {"history_yes", "history_no"};
const std::vector<std::string> kAggregationNames = {
    "max", "llm_same_prompt", "llm_different_prompt"};
const std::vector<std::string> kExclusionNames = {"none", "regex",
                                                  "prompt_amended"};
const std::vector<std::string> kTokenizerNames = {"whitespace", "char_budget"};
const std::vector<std::string> kBackendNames = {"mock", "http"};
const std::vector<std::string> kSplitNames = {"train", "validation", "test"};

std::optional<Split> ParseSplitName(std::string_view s) { return ParseSplit(s); }

void ApplyOverride(YAML::Node& root, const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos || eq == 0) {
    throw ConfigError("override '" + assignment +
                      "': expected key.path=value");
  }
  const std::string path = Trim(assignment.substr(0, eq));
  const std::string text = assignment.substr(eq + 1);
  std::vector<std::string> keys;
  std::stringstream ss(path);
  for (std::string k; std::getline(ss, k, '.');) {
    if (k.empty()) {
      throw ConfigError("override '" + assignment + "': empty key segment");
    }
    keys.push_back(k);
  }
  YAML::Node value;
  try {
    value = YAML::Load(text);
  } catch (const YAML::Exception& e) {
    throw ConfigError("override '" + path + "': " + e.what());
  }
  if (!value || value.IsNull()) value = YAML::Node(text);

  std::function<void(YAML::Node, std::size_t)> set = [&](YAML::Node node,
                                                          std::size_t i) {
    if (i + 1 == keys.size()) {
      node[keys[i]] = value;
      return;
    }
    YAML::Node child = node[keys[i]];
    if (!child || child.IsNull()) {
      node[keys[i]] = YAML::Node(YAML::NodeType::Map);
    } else if (!child.IsMap()) {
      throw ConfigError("override '" + path + "': '" + keys[i] +
                        "' is not a mapping");
    }
    set(node[keys[i]], i + 1);
  };
  set(root, 0);
}

AppConfig FromNode(YAML::Node root) {
  AppConfig c;
  Reader r(root, "");
  r.Get("seed", c.seed);
  r.Get("split", c.split);
  r.Get("output_dir", c.output_dir);
  r.Get("workers", c.workers);

  if (r.Has("corpus")) {
    Reader corpus = r.Child("corpus");
    const bool files = corpus.Has("files");
    const bool synthetic = corpus.Has("synthetic");
    if (files == synthetic) {
      throw ConfigError(
          "corpus: exactly one of 'files' or 'synthetic' must be given");
    }
    if (files) {
      Reader f = corpus.Child("files");
      CorpusFiles cf;
      f.Get("notes", cf.notes);
      f.Get("events", cf.events);
      f.Get("labels", cf.labels);
      f.Finish();
      c.corpus_files = cf;
      c.synthetic.reset();
    } else {
      Reader s = corpus.Child("synthetic");
      CohortSpec spec;
      s.Get("n_patients", spec.n_patients);
      s.Get("case_fraction", spec.case_fraction);
      s.Get("imaging_only_case_fraction", spec.imaging_only_case_fraction);
      s.Get("control_suspicion_fraction", spec.control_suspicion_fraction);
      s.Get("control_possible_mention_fraction",
            spec.control_possible_mention_fraction);
      s.Get("case_code_fraction", spec.case_code_fraction);
      s.Get("control_code_fraction", spec.control_code_fraction);
      s.Get("mean_notes_per_patient", spec.mean_notes_per_patient);
      s.Get("mean_note_tokens", spec.mean_note_tokens);
      s.GetEnum("split", spec.split, &ParseSplitName, kSplitNames);
      s.Finish();
      c.synthetic = spec;
    }
    corpus.Finish();
  } else {
    c.synthetic = CohortSpec{};
  }
  if (c.synthetic) c.synthetic->seed = c.seed;

  {
    Reader ch = r.Child("chunker");
    ch.Get("snippet_size", c.chunker.snippet_size);
    ch.Get("overlap", c.chunker.overlap);
    ch.GetEnum("tokenizer", c.chunker.tokenizer, &ParseTokenizer,
               kTokenizerNames);
    ch.Get("chars_per_token", c.chunker.chars_per_token);
    ch.Finish();
  }
  {
    Reader p = r.Child("patterns");
    p.Get("include", c.patterns.include);
    p.Get("exclude", c.patterns.exclude);
    p.Get("include_file", c.patterns.include_file);
    p.Get("exclude_file", c.patterns.exclude_file);
    p.Finish();
  }
  r.GetEnum("exclusion", c.exclusion, &ParseExclusion, kExclusionNames);
  {
    Reader p = r.Child("prompt");
    p.GetEnum("design", c.prompt.design, &ParseDesign, kDesignNames);
    p.GetEnum("polarity", c.prompt.polarity, &ParsePolarity, kPolarityNames);
    p.Get("template_file", c.prompt.template_file);
    p.Get("amendments", c.prompt.amendments);
    p.Finish();
  }
  {
    Reader a = r.Child("aggregation");
    a.GetEnum("method", c.aggregation, &ParseAggregation, kAggregationNames);
    a.Get("token_budget", c.reduce_token_budget);
    a.Finish();
  }
  {
    Reader b = r.Child("backend");
    b.GetEnum("kind", c.backend, &ParseBackend, kBackendNames);
    b.Get("mock_rules_file", c.mock_rules_file);
    {
      Reader h = b.Child("http");
      h.Get("endpoint", c.http.endpoint);
      h.Get("credential_env", c.http.credential_env);
      h.Get("timeout_seconds", c.http.timeout_seconds);
      Reader a = h.Child("adapter");
      a.Get("prompt_field", c.http.adapter.prompt_field);
      a.Get("max_tokens_field", c.http.adapter.max_tokens_field);
      a.Get("temperature_field", c.http.adapter.temperature_field);
      a.Get("response_pointer", c.http.adapter.response_pointer);
      a.Get("extra_body", c.http.adapter.extra_body);
      a.Finish();
      h.Finish();
    }
    {
      Reader cl = b.Child("client");
      cl.Get("max_concurrency", c.client.max_concurrency);
      cl.Get("max_attempts", c.client.retry.max_attempts);
      cl.Get("backoff_ms", c.client.retry.backoff_base);
      cl.Get("requests_per_second", c.client.rate_limit.requests_per_second);
      cl.Get("burst", c.client.rate_limit.burst);
      cl.Finish();
    }
    {
      Reader g = b.Child("generation");
      g.Get("max_output_tokens", c.generation.max_output_tokens);
      g.Get("temperature", c.generation.temperature);
      g.Finish();
    }
    b.Finish();
  }
  {
    Reader ru = r.Child("rules");
    ru.Get("file", c.rules.file);
    ru.Get("min_code_count", c.rules.min_code_count);
    ru.Get("prefix_match", c.rules.prefix_match);
    ru.Finish();
  }
  {
    Reader g = r.Child("grid");
    g.GetEnumList("prompts", c.grid.prompts, &ParseDesign, kDesignNames);
    g.GetEnumList("aggregations", c.grid.aggregations, &ParseAggregation,
                  kAggregationNames);
    g.GetEnumList("exclusions", c.grid.exclusions, &ParseExclusion,
                  kExclusionNames);
    g.Finish();
  }
  r.Finish();
  ValidateConfig(c);
  return c;
}

std::string Number(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  std::string s(buf, ptr);
  if (s.find_first_of(".eE") == std::string::npos) s += ".0";
  return s;
}

void EmitStrings(YAML::Emitter& out, const std::vector<std::string>& items) {
  out << YAML::BeginSeq;
  for (const auto& s : items) out << YAML::DoubleQuoted << s;
  out << YAML::EndSeq;
}

std::string ReadFile(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

YAML::Node LoadYamlFile(const std::filesystem::path& path) {
  const std::string text = ReadFile(path);
  try {
    return YAML::Load(text);
  } catch (const YAML::Exception& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
}

}  // namespace

AppConfig ParseConfig(std::string_view yaml,
                      const std::vector<std::string>& overrides) {
  YAML::Node root;
  try {
    root = YAML::Load(std::string(yaml));
  } catch (const YAML::Exception& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  if (!root || root.IsNull()) root = YAML::Node(YAML::NodeType::Map);
  if (!root.IsMap()) throw ConfigError("config: expected a mapping");
  for (const auto& o : overrides) ApplyOverride(root, o);
  return FromNode(root);
}

AppConfig LoadConfig(const std::filesystem::path& path,
                     const std::vector<std::string>& overrides) {
  const std::string text = ReadFile(path);
  try {
    return ParseConfig(text, overrides);
  } catch (const ConfigError& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
}

AppConfig DefaultConfig(const std::vector<std::string>& overrides) {
  return ParseConfig("", overrides);
}

std::string ToYaml(const AppConfig& c) {
  YAML::Emitter out;
  out << YAML::BeginMap;
  out << YAML::Key << "seed" << YAML::Value << c.seed;
  out << YAML::Key << "split" << YAML::Value << c.split;
  out << YAML::Key << "output_dir" << YAML::Value << YAML::DoubleQuoted
      << c.output_dir;
  out << YAML::Key << "workers" << YAML::Value << c.workers;

  out << YAML::Key << "corpus" << YAML::Value << YAML::BeginMap;
  if (c.corpus_files) {
    out << YAML::Key << "files" << YAML::Value << YAML::BeginMap;
    out << YAML::Key << "notes" << YAML::Value << YAML::DoubleQuoted
        << c.corpus_files->notes;
    out << YAML::Key << "events" << YAML::Value << YAML::DoubleQuoted
        << c.corpus_files->events;
    out << YAML::Key << "labels" << YAML::Value << YAML::DoubleQuoted
        << c.corpus_files->labels;
    out << YAML::EndMap;
  } else if (c.synthetic) {
    const CohortSpec& s = *c.synthetic;
    out << YAML::Key << "synthetic" << YAML::Value << YAML::BeginMap;
    out << YAML::Key << "n_patients" << YAML::Value << s.n_patients;
    out << YAML::Key << "case_fraction" << YAML::Value
        << Number(s.case_fraction);
    out << YAML::Key << "imaging_only_case_fraction" << YAML::Value
        << Number(s.imaging_only_case_fraction);
    out << YAML::Key << "control_suspicion_fraction" << YAML::Value
        << Number(s.control_suspicion_fraction);
    out << YAML::Key << "control_possible_mention_fraction" << YAML::Value
        << Number(s.control_possible_mention_fraction);
    out << YAML::Key << "case_code_fraction" << YAML::Value
        << Number(s.case_code_fraction);
    out << YAML::Key << "control_code_fraction" << YAML::Value
        << Number(s.control_code_fraction);
    out << YAML::Key << "mean_notes_per_patient" << YAML::Value
        << Number(s.mean_notes_per_patient);
    out << YAML::Key << "mean_note_tokens" << YAML::Value
        << s.mean_note_tokens;
    out << YAML::Key << "split" << YAML::Value
        << std::string(SplitName(s.split));
    out << YAML::EndMap;
  }
  out << YAML::EndMap;

  out << YAML::Key << "chunker" << YAML::Value << YAML::BeginMap;
  out << YAML::Key << "snippet_size" << YAML::Value << c.chunker.snippet_size;
  out << YAML::Key << "overlap" << YAML::Value << c.chunker.overlap;
  out << YAML::Key << "tokenizer" << YAML::Value
      << std::string(TokenizerName(c.chunker.tokenizer));
  out << YAML::Key << "chars_per_token" << YAML::Value
      << Number(c.chunker.chars_per_token);
  out << YAML::EndMap;

  out << YAML::Key << "patterns" << YAML::Value << YAML::BeginMap;
  out << YAML::Key << "include" << YAML::Value;
  EmitStrings(out, c.patterns.include);
  out << YAML::Key << "exclude" << YAML::Value;
  EmitStrings(out, c.patterns.exclude);
  out << YAML::Key << "include_file" << YAML::Value << YAML::DoubleQuoted
      << c.patterns.include_file;
  out << YAML::Key << "exclude_file" << YAML::Value << YAML::DoubleQuoted
      << c.patterns.exclude_file;
  out << YAML::EndMap;

  out << YAML::Key << "exclusion" << YAML::Value
      << std::string(ExclusionName(c.exclusion));

  out << YAML::Key << "prompt" << YAML::Value << YAML::BeginMap;
  out << YAML::Key << "design" << YAML::Value
      << std::string(DesignName(c.prompt.design));
  out << YAML::Key << "polarity" << YAML::Value
      << std::string(PolarityName(c.prompt.polarity));
  out << YAML::Key << "template_file" << YAML::Value << YAML::DoubleQuoted
      << c.prompt.template_file;
  out << YAML::Key << "amendments" << YAML::Value << YAML::Flow;
  EmitStrings(out, c.prompt.amendments);
  out << YAML::EndMap;

  out << YAML::Key << "aggregation" << YAML::Value << YAML::BeginMap;
  out << YAML::Key << "method" << YAML::Value
      << std::string(AggregationName(c.aggregation));
  out << YAML::Key << "token_budget" << YAML::Value << c.reduce_token_budget;
  out << YAML::EndMap;

  out << YAML::Key << "backend" << YAML::Value << YAML::BeginMap;
  out << YAML::Key << "kind" << YAML::Value
      << std::string(BackendName(c.backend));
  out << YAML::Key << "mock_rules_file" << YAML::Value << YAML::DoubleQuoted
      << c.mock_rules_file;
  out << YAML::Key << "http" << YAML::Value << YAML::BeginMap;
  out << YAML::Key << "endpoint" << YAML::Value << YAML::DoubleQuoted
      << c.http.endpoint;
  out << YAML::Key << "credential_env" << YAML::Value << YAML::DoubleQuoted
      << c.http.credential_env;
  out << YAML::Key << "timeout_seconds" << YAML::Value
      << Number(c.http.timeout_seconds);
  out << YAML::Key << "adapter" << YAML::Value << YAML::BeginMap;
  out << YAML::Key << "prompt_field" << YAML::Value << YAML::DoubleQuoted
      << c.http.adapter.prompt_field;
  out << YAML::Key << "max_tokens_field" << YAML::Value << YAML::DoubleQuoted
      << c.http.adapter.max_tokens_field;
  out << YAML::Key << "temperature_field" << YAML::Value << YAML::DoubleQuoted
      << c.http.adapter.temperature_field;
  out << YAML::Key << "response_pointer" << YAML::Value << YAML::DoubleQuoted
      << c.http.adapter.response_pointer;
  out << YAML::Key << "extra_body" << YAML::Value << YAML::DoubleQuoted
      << c.http.adapter.extra_body;
  out << YAML::EndMap;
  out << YAML::EndMap;
  out << YAML::Key << "client" << YAML::Value << YAML::BeginMap;
  out << YAML::Key << "max_concurrency" << YAML::Value
      << c.client.max_concurrency;
  out << YAML::Key << "max_attempts" << YAML::Value
      << c.client.retry.max_attempts;
  out << YAML::Key << "backoff_ms" << YAML::Value
      << static_cast<std::int64_t>(c.client.retry.backoff_base.count());
  out << YAML::Key << "requests_per_second" << YAML::Value
      << Number(c.client.rate_limit.requests_per_second);
  out << YAML::Key << "burst" << YAML::Value
      << Number(c.client.rate_limit.burst);
  out << YAML::EndMap;
  out << YAML::Key << "generation" << YAML::Value << YAML::BeginMap;
  out << YAML::Key << "max_output_tokens" << YAML::Value
      << c.generation.max_output_tokens;
  out << YAML::Key << "temperature" << YAML::Value
      << Number(c.generation.temperature);
  out << YAML::EndMap;
  out << YAML::EndMap;

  out << YAML::Key << "rules" << YAML::Value << YAML::BeginMap;
  out << YAML::Key << "file" << YAML::Value << YAML::DoubleQuoted
      << c.rules.file;
  out << YAML::Key << "min_code_count" << YAML::Value
      << c.rules.min_code_count;
  out << YAML::Key << "prefix_match" << YAML::Value << c.rules.prefix_match;
  out << YAML::EndMap;

  out << YAML::Key << "grid" << YAML::Value << YAML::BeginMap;
  std::vector<std::string> names;
  for (auto d : c.grid.prompts) names.emplace_back(DesignName(d));
  out << YAML::Key << "prompts" << YAML::Value << YAML::Flow;
  EmitStrings(out, names);
  names.clear();
  for (auto a : c.grid.aggregations) names.emplace_back(AggregationName(a));
  out << YAML::Key << "aggregations" << YAML::Value << YAML::Flow;
  EmitStrings(out, names);
  names.clear();
  for (auto e : c.grid.exclusions) names.emplace_back(ExclusionName(e));
  out << YAML::Key << "exclusions" << YAML::Value << YAML::Flow;
  EmitStrings(out, names);
  out << YAML::EndMap;

  out << YAML::EndMap;
  return std::string(out.c_str()) + "\n";
}

void ValidateConfig(const AppConfig& c) {
  if (c.corpus_files.has_value() == c.synthetic.has_value()) {
    throw ConfigError(
        "corpus: exactly one of 'files' or 'synthetic' must be given");
  }
  if (c.corpus_files) {
    const auto& f = *c.corpus_files;
    if (f.notes.empty() || f.events.empty() || f.labels.empty()) {
      throw ConfigError("corpus.files: notes, events and labels are required");
    }
  }
  if (c.synthetic) {
    try {
      ValidateCohortSpec(*c.synthetic);
    } catch (const ConfigError& e) {
      throw ConfigError(std::string("corpus.synthetic: ") + e.what());
    }
  }
  if (c.split != "all" && !ParseSplit(c.split)) {
    throw ConfigError("split: unknown value '" + c.split +
                      "' (expected one of all, train, validation, test)");
  }
  if (c.workers == 0) throw ConfigError("workers: must be at least 1");
  if (c.output_dir.empty()) throw ConfigError("output_dir: must not be empty");
  try {
    ValidateChunkerConfig(c.chunker);
  } catch (const ConfigError& e) {
    throw ConfigError(std::string("chunker: ") + e.what());
  }
  if (c.patterns.include.empty() && c.patterns.include_file.empty()) {
    throw ConfigError("patterns.include: at least one pattern is required");
  }
  if (c.exclusion == ExclusionMode::kRegex && c.patterns.exclude.empty() &&
      c.patterns.exclude_file.empty()) {
    throw ConfigError(
        "patterns.exclude: regex exclusion needs at least one exclude "
        "pattern");
  }
  for (const auto& a : c.prompt.amendments) {
    if (!AmendmentText(a)) {
      throw ConfigError("prompt.amendments: unknown amendment '" + a + "'");
    }
  }
  if (c.reduce_token_budget == 0) {
    throw ConfigError("aggregation.token_budget: must be positive");
  }
  if (c.backend == BackendKind::kHttp && c.http.endpoint.empty()) {
    throw ConfigError("backend.http.endpoint: required for the http backend");
  }
  if (c.http.timeout_seconds <= 0) {
    throw ConfigError("backend.http.timeout_seconds: must be positive");
  }
  if (c.client.max_concurrency == 0) {
    throw ConfigError("backend.client.max_concurrency: must be at least 1");
  }
  if (c.client.retry.max_attempts < 1) {
    throw ConfigError("backend.client.max_attempts: must be at least 1");
  }
  if (c.client.retry.backoff_base.count() < 0) {
    throw ConfigError("backend.client.backoff_ms: must not be negative");
  }
  if (c.client.rate_limit.requests_per_second < 0 ||
      c.client.rate_limit.burst < 1) {
    throw ConfigError(
        "backend.client: requests_per_second must be >= 0 and burst >= 1");
  }
  if (c.generation.temperature < 0) {
    throw ConfigError("backend.generation.temperature: must not be negative");
  }
  if (c.rules.min_code_count == 0) {
    throw ConfigError("rules.min_code_count: must be at least 1");
  }
  if (c.grid.prompts.empty() || c.grid.aggregations.empty() ||
      c.grid.exclusions.empty()) {
    throw ConfigError("grid: prompts, aggregations and exclusions must be "
                      "non-empty");
  }
}

std::optional<Split> SelectedSplit(const AppConfig& c) {
  if (c.split == "all") return std::nullopt;
  return ParseSplit(c.split);
}

CohortSpec EffectiveCohortSpec(const AppConfig& c) {
  CohortSpec spec = c.synthetic.value_or(CohortSpec{});
  spec.seed = c.seed;
  return spec;
}

PatternSet ResolvePatterns(const AppConfig& c) {
  PatternSet p;
  p.include_patterns = c.patterns.include_file.empty()
                           ? c.patterns.include
                           : LoadPatternFile(c.patterns.include_file);
  p.exclude_patterns = c.patterns.exclude_file.empty()
                           ? c.patterns.exclude
                           : LoadPatternFile(c.patterns.exclude_file);
  return p;
}

PromptTemplate ResolvePrompt(const AppConfig& c) {
  PromptTemplate t = MakeDesignTemplate(c.prompt.design, c.prompt.polarity);
  if (!c.prompt.template_file.empty()) {
    t.body = LoadTemplateBody(c.prompt.template_file);
  }
  t.amendments = c.prompt.amendments;
  try {
    ValidateTemplate(t);
  } catch (const ConfigError& e) {
    throw ConfigError(std::string("prompt: ") + e.what());
  }
  return t;
}

PipelineSettings ResolvePipeline(const AppConfig& c) {
  PipelineSettings s;
  s.chunker = c.chunker;
  s.patterns = ResolvePatterns(c);
  s.exclusion = c.exclusion;
  s.prompt = ResolvePrompt(c);
  s.aggregation = c.aggregation;
  s.reduce_token_budget = c.reduce_token_budget;
  s.generation = c.generation;
  return s;
}

MockConfig LoadMockRules(const std::filesystem::path& path) {
  YAML::Node root = LoadYamlFile(path);
  Reader r(root, path.string());
  MockConfig m;
  r.Get("default_response", m.default_response);
  YAML::Node rules = r.Raw("rules");
  if (rules && !rules.IsNull()) {
    if (!rules.IsSequence()) {
      throw ConfigError(r.Path("rules") + ": expected a list");
    }
    for (std::size_t i = 0; i < rules.size(); ++i) {
      Reader rule(rules[i], r.Path("rules") + "[" + std::to_string(i) + "]");
      MockRule mr;
      rule.Get("trigger", mr.trigger);
      rule.Get("response", mr.response_template);
      std::int64_t priority = 0;
      rule.Get("priority", priority);
      mr.priority = static_cast<int>(priority);
      rule.Finish();
      if (mr.trigger.empty()) {
        throw ConfigError(rule.Path("trigger") + ": required");
      }
      m.rules.push_back(std::move(mr));
    }
  }
  r.Finish();
  return m;
}

RuleSet LoadRuleFile(const std::filesystem::path& path) {
  YAML::Node root = LoadYamlFile(path);
  Reader r(root, path.string());
  RuleSet rules;
  YAML::Node dx = r.Raw("diagnostic_codes");
  if (dx && dx.IsSequence()) {
    for (std::size_t i = 0; i < dx.size(); ++i) {
      const std::string where =
          r.Path("diagnostic_codes") + "[" + std::to_string(i) + "]";
      Reader e(dx[i], where);
      std::string vocab = "ICD10";
      DiagnosticCode code;
      e.Get("vocabulary", vocab);
      e.Get("code", code.code);
      e.Get("name", code.name);
      e.Finish();
      auto v = ParseVocabulary(vocab);
      if (!v || *v == Vocabulary::kRxNorm) {
        throw ConfigError(where + ".vocabulary: expected ICD9 or ICD10");
      }
      code.vocabulary = *v;
      rules.diagnostic_codes.push_back(std::move(code));
    }
  } else if (dx && !dx.IsNull()) {
    throw ConfigError(r.Path("diagnostic_codes") + ": expected a list");
  }
  YAML::Node rx = r.Raw("medication_codes");
  if (rx && rx.IsSequence()) {
    for (std::size_t i = 0; i < rx.size(); ++i) {
      Reader e(rx[i],
               r.Path("medication_codes") + "[" + std::to_string(i) + "]");
      MedicationCode code;
      e.Get("code", code.code);
      e.Get("name", code.name);
      e.Finish();
      rules.medication_codes.push_back(std::move(code));
    }
  } else if (rx && !rx.IsNull()) {
    throw ConfigError(r.Path("medication_codes") + ": expected a list");
  }
  r.Finish();
  return rules;
}

RuleSet ResolveRules(const AppConfig& c) {
  RuleSet rules =
      c.rules.file.empty() ? DefaultPhRuleSet() : LoadRuleFile(c.rules.file);
  rules.min_code_count = c.rules.min_code_count;
  rules.prefix_match = c.rules.prefix_match;
  ValidateRuleSet(rules);
  return rules;
}

BackendConfig ResolveBackend(const AppConfig& c) {
  BackendConfig b;
  b.kind = c.backend;
  if (c.backend == BackendKind::kMock && !c.mock_rules_file.empty()) {
    b.mock = LoadMockRules(c.mock_rules_file);
  }
  b.http = c.http;
  b.client = c.client;
  b.generation = c.generation;
  return b;
}

}  // namespace phenorag::app
