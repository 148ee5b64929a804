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

#include <algorithm>
#include <array>
#include <cstdio>
#include <set>
#include <sstream>

#include "json.hpp"
#include "phenorag/error.hpp"

namespace phenorag {
namespace {

using json = nlohmann::json;

double Ratio(std::size_t num, std::size_t den) {
  return den == 0 ? 0.0 : static_cast<double>(num) / static_cast<double>(den);
}

json OptionalJson(const std::optional<std::string>& s) {
  return s ? json(*s) : json(nullptr);
}

constexpr std::array<std::string_view, 3> kAggregationOrder = {
    "llm_same_prompt", "llm_different_prompt", "max"};
constexpr std::array<std::string_view, 3> kExclusionOrder = {
    "none", "regex", "prompt_amended"};

std::size_t OrderOf(std::span<const std::string_view> order,
                    const std::string& value) {
  auto it = std::find(order.begin(), order.end(), value);
  return static_cast<std::size_t>(it - order.begin());
}

struct Grid {
  std::vector<std::pair<std::string, std::string>> columns;
  std::vector<std::string> prompts;
  std::vector<std::vector<std::optional<double>>> cells;  // [prompt][column]
  std::vector<std::optional<double>> average;
};

Grid BuildGrid(const EvalReport& report) {
  Grid g;
  std::set<std::string> prompts;
  std::vector<std::pair<std::string, std::string>> cols;
  for (const auto& r : report.rows) {
    if (!r.prompt || !r.aggregation || !r.exclusion) continue;
    prompts.insert(*r.prompt);
    std::pair<std::string, std::string> c{*r.aggregation, *r.exclusion};
    if (std::find(cols.begin(), cols.end(), c) == cols.end()) {
      cols.push_back(c);
    }
  }
  std::stable_sort(cols.begin(), cols.end(), [](const auto& a, const auto& b) {
    const auto ka = std::pair(OrderOf(kAggregationOrder, a.first),
                              OrderOf(kExclusionOrder, a.second));
    const auto kb = std::pair(OrderOf(kAggregationOrder, b.first),
                              OrderOf(kExclusionOrder, b.second));
    if (ka != kb) return ka < kb;
    return a < b;
  });
  g.columns = cols;
  g.prompts.assign(prompts.begin(), prompts.end());
  g.cells.assign(g.prompts.size(),
                 std::vector<std::optional<double>>(cols.size()));
  for (const auto& r : report.rows) {
    if (!r.prompt || !r.aggregation || !r.exclusion) continue;
    const auto pi = static_cast<std::size_t>(
        std::find(g.prompts.begin(), g.prompts.end(), *r.prompt) -
        g.prompts.begin());
    const auto ci = static_cast<std::size_t>(
        std::find(cols.begin(), cols.end(),
                  std::pair(*r.aggregation, *r.exclusion)) -
        cols.begin());
    if (!g.cells[pi][ci]) g.cells[pi][ci] = r.metrics.f1;
  }
  for (std::size_t c = 0; c < cols.size(); ++c) {
    double sum = 0;
    std::size_t n = 0;
    for (const auto& row : g.cells) {
      if (row[c]) {
        sum += *row[c];
        ++n;
      }
    }
    g.average.push_back(n == 0 ? std::nullopt
                               : std::optional<double>(sum / n));
  }
  return g;
}

std::string Fixed(double v, int digits = 2) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.*f", digits, v);
  return buf;
}

std::string Table(const std::vector<std::vector<std::string>>& rows) {
  std::vector<std::size_t> widths;
  for (const auto& r : rows) {
    widths.resize(std::max(widths.size(), r.size()));
    for (std::size_t i = 0; i < r.size(); ++i) {
      widths[i] = std::max(widths[i], r[i].size());
    }
  }
  std::ostringstream out;
  for (std::size_t ri = 0; ri < rows.size(); ++ri) {
    std::string line;
    for (std::size_t i = 0; i < rows[ri].size(); ++i) {
      if (i > 0) line += "  ";
      line += rows[ri][i];
      line.append(widths[i] - rows[ri][i].size(), ' ');
    }
    while (!line.empty() && line.back() == ' ') line.pop_back();
    out << line << '\n';
    if (ri == 0) {
      std::size_t total = 0;
      for (std::size_t w : widths) total += w;
      total += 2 * (widths.size() - 1);
      out << std::string(total, '-') << '\n';
    }
  }
  return out.str();
}

}  // namespace

Metrics ComputeMetrics(const ConfusionMatrix& cm) {
  Metrics m;
  m.precision = Ratio(cm.tp, cm.tp + cm.fp);
  m.recall = Ratio(cm.tp, cm.tp + cm.fn);
  const double denom = m.precision + m.recall;
  m.f1 = denom == 0.0 ? 0.0 : 2.0 * m.precision * m.recall / denom;
  return m;
}

ConfusionMatrix Score(const LabelMap& decisions, const LabelMap& gold) {
  ConfusionMatrix cm;
  std::vector<std::string> missing;
  for (const auto& [id, label] : gold) {
    auto it = decisions.find(id);
    if (it == decisions.end()) {
      missing.push_back(id);
      continue;
    }
    const bool predicted = it->second;
    if (predicted && label) {
      ++cm.tp;
    } else if (predicted) {
      ++cm.fp;
    } else if (label) {
      ++cm.fn;
    } else {
      ++cm.tn;
    }
  }
  if (!missing.empty()) {
    std::string msg = "no decision for " + std::to_string(missing.size()) +
                      " gold patient(s):";
    for (const auto& id : missing) msg += " " + id;
    throw DataError(msg);
  }
  return cm;
}

std::vector<NoteTypeShare> NoteTypeDistribution(
    std::span<const std::string> note_types, std::size_t top_k) {
  std::vector<NoteTypeShare> out;
  if (note_types.empty()) return out;
  std::map<std::string, std::size_t> counts;
  for (const auto& t : note_types) ++counts[t];

  std::vector<NoteTypeShare> ranked;
  std::size_t other = 0;
  for (const auto& [type, n] : counts) {
    if (type == "Other") {
      other += n;
    } else {
      ranked.push_back({type, n, 0.0});
    }
  }
  std::stable_sort(ranked.begin(), ranked.end(),
                   [](const NoteTypeShare& a, const NoteTypeShare& b) {
                     return a.count > b.count;
                   });
  for (std::size_t i = 0; i < ranked.size(); ++i) {
    if (i < top_k) {
      out.push_back(ranked[i]);
    } else {
      other += ranked[i].count;
    }
  }
  if (other > 0) out.push_back({"Other", other, 0.0});
  const double total = static_cast<double>(note_types.size());
  for (auto& s : out) s.fraction = static_cast<double>(s.count) / total;
  return out;
}

std::vector<NoteTypeShare> NoteTypeDistribution(
    std::span<const Snippet> retrieved, std::size_t top_k) {
  std::vector<std::string> types;
  types.reserve(retrieved.size());
  for (const auto& s : retrieved) types.push_back(s.note_type);
  return NoteTypeDistribution(std::span<const std::string>(types), top_k);
}

EvalReport CompareReport(const std::vector<RunSummary>& runs,
                         const LabelMap& gold, const std::string& split) {
  EvalReport report;
  report.split = split;
  bool have_types = false;
  for (const auto& run : runs) {
    if (run.split != "all" && run.split != split) {
      throw DataError("run " + run.model + (run.prompt ? "/" + *run.prompt : "") +
                      " was produced for split '" + run.split +
                      "', not '" + split + "'");
    }
    ReportRow row;
    row.model = run.model;
    row.prompt = run.prompt;
    row.aggregation = run.aggregation;
    row.exclusion = run.exclusion;
    row.confusion = Score(run.decisions, gold);
    row.metrics = ComputeMetrics(row.confusion);
    report.rows.push_back(std::move(row));

    if (!have_types && run.model == "llm") {
      have_types = true;
      std::vector<std::string> types;
      for (const auto& [id, label] : gold) {
        auto it = run.retrieved_note_types.find(id);
        if (it == run.retrieved_note_types.end()) continue;
        types.insert(types.end(), it->second.begin(), it->second.end());
      }
      report.note_types =
          NoteTypeDistribution(std::span<const std::string>(types));
    }
  }
  return report;
}

std::string ReportToJson(const EvalReport& report) {
  json rows = json::array();
  for (const auto& r : report.rows) {
    rows.push_back({{"model", r.model},
                    {"prompt", OptionalJson(r.prompt)},
                    {"aggregation", OptionalJson(r.aggregation)},
                    {"exclusion", OptionalJson(r.exclusion)},
                    {"tp", r.confusion.tp},
                    {"fp", r.confusion.fp},
                    {"fn", r.confusion.fn},
                    {"tn", r.confusion.tn},
                    {"precision", r.metrics.precision},
                    {"recall", r.metrics.recall},
                    {"f1", r.metrics.f1}});
  }
  const Grid g = BuildGrid(report);
  json columns = json::array();
  for (const auto& [agg, excl] : g.columns) {
    columns.push_back({{"aggregation", agg}, {"exclusion", excl}});
  }
  json grid_rows = json::array();
  for (std::size_t p = 0; p < g.prompts.size(); ++p) {
    json f1 = json::array();
    for (const auto& c : g.cells[p]) f1.push_back(c ? json(*c) : json(nullptr));
    grid_rows.push_back({{"prompt", g.prompts[p]}, {"f1", std::move(f1)}});
  }
  json average = json::array();
  for (const auto& a : g.average) average.push_back(a ? json(*a) : json(nullptr));

  json dist = json::array();
  for (const auto& s : report.note_types) {
    dist.push_back({{"note_type", s.note_type},
                    {"count", s.count},
                    {"fraction", s.fraction}});
  }
  json obj = {{"split", report.split},
              {"rows", std::move(rows)},
              {"grid",
               {{"columns", std::move(columns)},
                {"rows", std::move(grid_rows)},
                {"average", std::move(average)}}},
              {"note_type_distribution", std::move(dist)}};
  return obj.dump(2) + "\n";
}

std::string RenderReport(const EvalReport& report) {
  std::ostringstream out;
  out << "Split: " << report.split << "\n\n";
  std::vector<std::vector<std::string>> table = {
      {"Model", "Prompt", "Aggregation", "Exclusion", "Precision", "Recall",
       "F1", "TP", "FP", "FN", "TN"}};
  for (const auto& r : report.rows) {
    table.push_back({r.model, r.prompt.value_or("--"),
                     r.aggregation.value_or("--"), r.exclusion.value_or("--"),
                     Fixed(r.metrics.precision), Fixed(r.metrics.recall),
                     Fixed(r.metrics.f1), std::to_string(r.confusion.tp),
                     std::to_string(r.confusion.fp),
                     std::to_string(r.confusion.fn),
                     std::to_string(r.confusion.tn)});
  }
  out << Table(table);

  const Grid g = BuildGrid(report);
  if (!g.columns.empty()) {
    out << "\nF1 by prompt and (aggregation / exclusion)\n";
    std::vector<std::vector<std::string>> grid = {{"Prompt"}};
    for (const auto& [agg, excl] : g.columns) {
      grid[0].push_back(agg + "/" + excl);
    }
    for (std::size_t p = 0; p < g.prompts.size(); ++p) {
      std::vector<std::string> row = {g.prompts[p]};
      for (const auto& c : g.cells[p]) row.push_back(c ? Fixed(*c) : "--");
      grid.push_back(std::move(row));
    }
    std::vector<std::string> avg = {"Average"};
    for (const auto& a : g.average) avg.push_back(a ? Fixed(*a) : "--");
    grid.push_back(std::move(avg));
    out << Table(grid);
  }

  if (!report.note_types.empty()) {
    out << "\nRetrieved snippets by note type\n";
    std::vector<std::vector<std::string>> dist = {
        {"Note Type", "Snippets", "Frequency"}};
    for (const auto& s : report.note_types) {
      dist.push_back({s.note_type, std::to_string(s.count),
                      Fixed(100.0 * s.fraction) + "%"});
    }
    out << Table(dist);
  }
  return out.str();
}

}  // namespace phenorag
