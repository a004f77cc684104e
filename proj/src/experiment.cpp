// Copyright 2026 The asrfair Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "asrfair/experiment.hpp"

#include <algorithm>
#include <fstream>
#include <istream>
#include <sstream>

#include "asrfair/delimited.hpp"
#include "asrfair/error.hpp"
#include "json.hpp"

namespace asrfair {
namespace {

using nlohmann::json;

const Composition kClpOnly = {Category::kMild, Category::kModerate,
                              Category::kSevere};

// Row-label order: severities first, Normal last ("Mild+Moderate+Normal").
constexpr std::array<Category, 4> kLabelOrder = {
    Category::kMild, Category::kModerate, Category::kSevere, Category::kNormal};

std::string long_name(Category c) {
  switch (c) {
    case Category::kNormal: return "Normal";
    case Category::kMild: return "Mild";
    case Category::kModerate: return "Moderate";
    case Category::kSevere: return "Severe";
  }
  return "";
}

std::string short_name(Category c) {
  switch (c) {
    case Category::kNormal: return "No";
    case Category::kMild: return "Mi";
    case Category::kModerate: return "Mo";
    case Category::kSevere: return "Se";
  }
  return "";
}

std::string label_with(const Composition& composition,
                       std::string (*name)(Category)) {
  if (composition == kClpOnly) return "CLP";
  std::string out;
  for (const Category c : kLabelOrder) {
    if (!composition.contains(c)) continue;
    if (!out.empty()) out += '+';
    out += name(c);
  }
  return out;
}

}  // namespace

Composition parse_composition(std::string_view text) {
  const std::string lowered = to_lower_ascii(trim(text));
  if (lowered == "all") return {kAllCategories.begin(), kAllCategories.end()};
  Composition out;
  std::size_t start = 0;
  while (start <= lowered.size()) {
    const std::size_t end = lowered.find_first_of("+,", start);
    const std::string_view item = trim(std::string_view(lowered).substr(
        start, end == std::string::npos ? std::string::npos : end - start));
    if (item == "clp") {
      out.insert(kClpOnly.begin(), kClpOnly.end());
    } else if (const auto c = parse_category(item)) {
      out.insert(*c);
    } else if (!item.empty()) {
      throw Error(ErrorKind::kParse,
                  "unknown composition category '" + std::string(item) + "'");
    }
    if (end == std::string::npos) break;
    start = end + 1;
  }
  if (out.empty()) throw Error(ErrorKind::kParse, "empty composition");
  return out;
}

std::string composition_label(const Composition& composition) {
  return label_with(composition, long_name);
}

std::string composition_short_label(const Composition& composition) {
  return label_with(composition, short_name);
}

void validate_plan(const ExperimentPlan& plan) {
  if (plan.train_composition.empty()) {
    throw Error(ErrorKind::kInvalidArgument,
                "plan '" + plan.plan_id + "': empty train composition");
  }
  if (plan.weights.empty()) {
    throw Error(ErrorKind::kInvalidArgument,
                "plan '" + plan.plan_id + "': empty weight list");
  }
}

namespace {

std::vector<FairnessWeights> weights_from_json(const json& node,
                                               const std::string& plan_id) {
  std::vector<FairnessWeights> out;
  if (node.is_string()) return parse_weight_list(node.get<std::string>());
  if (!node.is_array()) {
    throw Error(ErrorKind::kParse, "plan '" + plan_id + "': bad weights");
  }
  for (const auto& w : node) {
    if (w.is_string()) {
      const auto parsed = parse_weight_list(w.get<std::string>());
      out.insert(out.end(), parsed.begin(), parsed.end());
    } else if (w.is_array() && w.size() == 2 && w[0].is_number() &&
               w[1].is_number()) {
      out.push_back({w[0].get<double>(), w[1].get<double>()});
    } else if (w.is_object() && w.contains("alpha") && w.contains("beta")) {
      out.push_back({w["alpha"].get<double>(), w["beta"].get<double>()});
    } else {
      throw Error(ErrorKind::kParse,
                  "plan '" + plan_id + "': bad weight entry " + w.dump());
    }
  }
  return out;
}

ExperimentPlan plan_from_json(const json& node,
                              const std::filesystem::path& base_dir) {
  if (!node.is_object()) throw Error(ErrorKind::kParse, "plan must be an object");
  ExperimentPlan plan;
  plan.plan_id = node.value("plan_id", std::string());
  if (plan.plan_id.empty()) throw Error(ErrorKind::kParse, "plan without plan_id");
  plan.model_label = node.value("model_label", std::string());
  const auto comp = node.find("composition");
  if (comp == node.end()) {
    throw Error(ErrorKind::kParse, "plan '" + plan.plan_id + "': no composition");
  }
  if (comp->is_string()) {
    plan.train_composition = parse_composition(comp->get<std::string>());
  } else if (comp->is_array()) {
    for (const auto& item : *comp) {
      if (!item.is_string()) {
        throw Error(ErrorKind::kParse,
                    "plan '" + plan.plan_id + "': composition holds strings");
      }
      const auto part = parse_composition(item.get<std::string>());
      plan.train_composition.insert(part.begin(), part.end());
    }
  }
  if (const auto w = node.find("weights"); w != node.end()) {
    plan.weights = weights_from_json(*w, plan.plan_id);
  } else {
    plan.weights = {{0.5, 0.5}};
  }
  if (const auto h = node.find("hypotheses"); h != node.end() && h->is_string()) {
    std::filesystem::path p = h->get<std::string>();
    plan.hypotheses = p.is_absolute() ? p : base_dir / p;
  }
  validate_plan(plan);
  return plan;
}

}  // namespace

std::vector<ExperimentPlan> parse_plans(std::istream& in,
                                        const std::filesystem::path& base_dir) {
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw Error(ErrorKind::kParse, std::string("plan file: ") + e.what());
  }
  if (doc.is_object() && doc.contains("plans")) doc = doc["plans"];
  std::vector<ExperimentPlan> plans;
  if (doc.is_array()) {
    for (const auto& node : doc) plans.push_back(plan_from_json(node, base_dir));
  } else {
    plans.push_back(plan_from_json(doc, base_dir));
  }
  if (plans.empty()) throw Error(ErrorKind::kParse, "plan file lists no plans");
  return plans;
}

std::vector<ExperimentPlan> load_plans(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::kIo, "cannot open plan '" + path.string() + "'");
  return parse_plans(in, path.parent_path());
}

std::optional<double> ResultRow::w_severity(Severity s) const {
  switch (s) {
    case Severity::kNone: return w_normal;
    case Severity::kMild: return w_mild;
    case Severity::kModerate: return w_moderate;
    case Severity::kSevere: return w_severe;
  }
  return std::nullopt;
}

std::optional<double> ResultRow::pooled() const {
  if (!w_normal || !w_clp) return std::nullopt;
  return macro_pooled_wer(*w_normal, *w_clp);
}

bool ResultRow::has_weights(FairnessWeights w) const {
  return std::find(weights.begin(), weights.end(), w) != weights.end();
}

std::optional<double> ResultRow::fs(FairnessWeights w) const {
  if (!w_normal || !w_clp || !has_weights(w)) return std::nullopt;
  return fairness_score(*w_normal, *w_clp, w).score;
}

ResultRow run_experiment(const ExperimentPlan& plan,
                         const CorpusManifest& manifest,
                         const HypothesisSet& hypotheses,
                         const ScoreOptions& options) {
  validate_plan(plan);
  const auto eval = select_partition(manifest, Partition::kEval);
  if (eval.empty()) {
    throw Error(ErrorKind::kInvalidArgument, "empty eval partition");
  }
  const GroupErrorReport report = score_testset(eval, hypotheses, options);
  auto severity_rate = [&](Severity s) -> std::optional<double> {
    const auto it = report.by_severity.find(s);
    return it == report.by_severity.end() ? std::nullopt
                                          : it->second.error_percent;
  };
  ResultRow row;
  row.plan_id = plan.plan_id;
  row.model_label = plan.model_label;
  row.train_composition = plan.train_composition;
  row.w_normal = report.w_normal();
  row.w_mild = severity_rate(Severity::kMild);
  row.w_moderate = severity_rate(Severity::kModerate);
  row.w_severe = severity_rate(Severity::kSevere);
  row.w_clp = report.w_clp();
  row.pooled_micro = report.pooled_micro();
  row.weights = plan.weights;
  row.n_missing_hypotheses = report.overall.n_missing_hypotheses;
  return row;
}

Improvement compare_experiments(const ResultRow& baseline,
                                const ResultRow& candidate,
                                FairnessWeights weights) {
  for (const ResultRow* row : {&baseline, &candidate}) {
    if (!row->has_weights(weights)) {
      throw Error(ErrorKind::kInvalidArgument,
                  "row '" + row->plan_id + "' lacks weight pair " +
                      format_exact(weights.alpha) + ":" +
                      format_exact(weights.beta));
    }
    if (!row->pooled()) {
      throw Error(ErrorKind::kInvalidArgument,
                  "row '" + row->plan_id + "' lacks a group error rate");
    }
  }
  Improvement out;
  out.weights = weights;
  out.pooled_baseline = *baseline.pooled();
  out.pooled_candidate = *candidate.pooled();
  out.pooled_delta = out.pooled_candidate - out.pooled_baseline;
  out.fs_baseline = *baseline.fs(weights);
  out.fs_candidate = *candidate.fs(weights);
  out.fs_delta = out.fs_candidate - out.fs_baseline;
  out.relative_fairness_improvement =
      relative_fairness_improvement(out.fs_baseline, out.fs_candidate);
  return out;
}

namespace {

std::vector<FairnessWeights> weight_columns(const ResultTable& table) {
  std::vector<FairnessWeights> out;
  for (const auto& row : table.rows) {
    for (const auto& w : row.weights) {
      if (std::find(out.begin(), out.end(), w) == out.end()) out.push_back(w);
    }
  }
  return out;
}

std::vector<std::optional<double>> row_values(
    const ResultRow& row, const std::vector<FairnessWeights>& weights) {
  std::vector<std::optional<double>> v = {row.w_normal, row.w_mild,
                                          row.w_moderate, row.w_severe,
                                          row.w_clp, row.pooled()};
  for (const auto& w : weights) v.push_back(row.fs(w));
  return v;
}

std::string cell(const std::optional<double>& v) {
  return v ? format_fixed(*v, 2) : "-";
}

std::string weight_tag(FairnessWeights w) {
  return "fs_a" + format_exact(w.alpha) + "_b" + format_exact(w.beta);
}

}  // namespace

std::string emit_report(const ResultTable& table, ReportFormat format) {
  const auto weights = weight_columns(table);
  std::ostringstream out;
  if (format == ReportFormat::kMarkdownTable) {
    out << "| Train | Model | Normal | Mild | Moderate | Severe | CLP | Pooled WER |";
    for (const auto& w : weights) {
      out << " FS (α=" << format_exact(w.alpha) << ", β=" << format_exact(w.beta)
          << ") |";
    }
    out << "\n|---|---|";
    for (std::size_t i = 0; i < 6 + weights.size(); ++i) out << "---:|";
    out << '\n';
    for (const auto& row : table.rows) {
      out << "| " << composition_label(row.train_composition) << " | "
          << row.model_label << " |";
      for (const auto& v : row_values(row, weights)) out << ' ' << cell(v) << " |";
      out << '\n';
    }
    return out.str();
  }

  Row header = {"plan_id", "train", "model", "normal", "mild", "moderate",
                "severe", "clp", "pooled"};
  for (const auto& w : weights) header.push_back(weight_tag(w));
  const std::size_t n_values = header.size() - 3;
  for (std::size_t i = 0; i < n_values; ++i) {
    header.push_back(header[3 + i] + "_full");
  }
  write_row(out, header);
  for (const auto& row : table.rows) {
    const auto values = row_values(row, weights);
    Row r = {row.plan_id, composition_label(row.train_composition),
             row.model_label};
    for (const auto& v : values) r.push_back(v ? format_fixed(*v, 2) : "");
    for (const auto& v : values) r.push_back(v ? format_exact(*v) : "");
    write_row(out, r);
  }
  return out.str();
}

namespace {

std::string xml_escape(std::string_view text) {
  std::string out;
  for (const char c : text) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out.push_back(c);
    }
  }
  return out;
}

template <typename T>
std::size_t index_of(std::vector<T>& items, const T& item) {
  const auto it = std::find(items.begin(), items.end(), item);
  if (it != items.end()) return static_cast<std::size_t>(it - items.begin());
  items.push_back(item);
  return items.size() - 1;
}

constexpr std::array<const char*, 6> kPalette = {
    "#1f77b4", "#d62728", "#ffbf00", "#2ca02c", "#9467bd", "#8c564b"};

}  // namespace

std::string emit_fs_chart(const ResultTable& table, FairnessWeights weights) {
  struct Bar {
    std::size_t group;
    std::size_t model;
    double fs;
  };
  std::vector<Composition> groups;
  std::vector<std::string> models;
  std::vector<Bar> bars;
  double extent = 0.0;
  for (const auto& row : table.rows) {
    const auto fs = row.fs(weights);
    if (!fs) continue;
    bars.push_back({index_of(groups, row.train_composition),
                    index_of(models, row.model_label), *fs});
    extent = std::max(extent, -*fs);
  }
  if (extent <= 0.0) extent = 1.0;

  const double left = 70.0;
  const double top = 50.0;
  const double plot_height = 240.0;
  const double bar_width = 24.0;
  const double group_gap = 30.0;
  const double group_width =
      static_cast<double>(std::max<std::size_t>(models.size(), 1)) * bar_width;
  const double plot_width =
      static_cast<double>(std::max<std::size_t>(groups.size(), 1)) *
          (group_width + group_gap) + group_gap;
  const double width = left + plot_width + 140.0;
  const double height = top + plot_height + 70.0;
  auto px = [](double v) { return format_fixed(v, 2); };

  std::ostringstream svg;
  svg << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
      << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << px(width)
      << "\" height=\"" << px(height) << "\" viewBox=\"0 0 " << px(width) << ' '
      << px(height) << "\" font-family=\"sans-serif\" font-size=\"12\">\n"
      << "<title>FS (alpha=" << format_exact(weights.alpha)
      << ", beta=" << format_exact(weights.beta) << ")</title>\n"
      << "<rect x=\"0\" y=\"0\" width=\"" << px(width) << "\" height=\""
      << px(height) << "\" fill=\"#ffffff\"/>\n";

  // FS <= 0, so bars hang down from the zero baseline at the top of the plot.
  svg << "<line class=\"axis\" x1=\"" << px(left) << "\" y1=\"" << px(top)
      << "\" x2=\"" << px(left) << "\" y2=\"" << px(top + plot_height)
      << "\" stroke=\"#000000\"/>\n"
      << "<line class=\"baseline\" x1=\"" << px(left) << "\" y1=\"" << px(top)
      << "\" x2=\"" << px(left + plot_width) << "\" y2=\"" << px(top)
      << "\" stroke=\"#000000\"/>\n";
  for (int tick = 0; tick <= 4; ++tick) {
    const double value = -extent * tick / 4.0;
    const double y = top + plot_height * tick / 4.0;
    svg << "<line x1=\"" << px(left - 5) << "\" y1=\"" << px(y) << "\" x2=\""
        << px(left) << "\" y2=\"" << px(y) << "\" stroke=\"#000000\"/>\n"
        << "<text x=\"" << px(left - 8) << "\" y=\"" << px(y + 4)
        << "\" text-anchor=\"end\">" << format_fixed(value, 2) << "</text>\n";
  }
  svg << "<text class=\"axis-label\" x=\"18\" y=\"" << px(top + plot_height / 2)
      << "\" text-anchor=\"middle\" transform=\"rotate(-90 18 "
      << px(top + plot_height / 2) << ")\">FS</text>\n";

  for (const auto& bar : bars) {
    const double x = left + group_gap +
                     static_cast<double>(bar.group) * (group_width + group_gap) +
                     static_cast<double>(bar.model) * bar_width;
    const double h = plot_height * (-bar.fs) / extent;
    svg << "<rect class=\"bar\" data-model=\"" << xml_escape(models[bar.model])
        << "\" data-composition=\""
        << xml_escape(composition_short_label(groups[bar.group]))
        << "\" data-fs=\"" << format_fixed(bar.fs, 2) << "\" x=\"" << px(x)
        << "\" y=\"" << px(top) << "\" width=\"" << px(bar_width - 2)
        << "\" height=\"" << px(h) << "\" fill=\""
        << kPalette[bar.model % kPalette.size()] << "\"/>\n";
  }
  for (std::size_t g = 0; g < groups.size(); ++g) {
    const double cx = left + group_gap +
                      static_cast<double>(g) * (group_width + group_gap) +
                      group_width / 2;
    svg << "<text class=\"group-label\" x=\"" << px(cx) << "\" y=\""
        << px(top + plot_height + 20) << "\" text-anchor=\"middle\">"
        << xml_escape(composition_short_label(groups[g])) << "</text>\n";
  }
  for (std::size_t m = 0; m < models.size(); ++m) {
    const double y = top + 18.0 * static_cast<double>(m);
    svg << "<rect x=\"" << px(left + plot_width + 20) << "\" y=\"" << px(y)
        << "\" width=\"12\" height=\"12\" fill=\""
        << kPalette[m % kPalette.size()] << "\"/>\n"
        << "<text class=\"legend\" x=\"" << px(left + plot_width + 38)
        << "\" y=\"" << px(y + 10) << "\">" << xml_escape(models[m])
        << "</text>\n";
  }
  svg << "</svg>\n";
  return svg.str();
}

ResultTable load_result_rows(std::istream& in,
                             const std::vector<FairnessWeights>& weights) {
  DelimitedReader reader(in);
  Row row;
  const Row expected = {"plan_id", "model_label", "composition", "normal",
                        "mild",    "moderate",    "severe",      "clp"};
  if (!reader.next(row)) return {};
  for (auto& f : row) f = to_lower_ascii(trim(f));
  if (row != expected) {
    throw Error(ErrorKind::kParse,
                "row 1: expected header '" + join(expected, ",") + "'");
  }
  ResultTable table;
  while (reader.next(row)) {
    if (row.size() == 1 && trim(row[0]).empty()) continue;
    if (row.size() != expected.size()) {
      throw Error(ErrorKind::kParse, "row " + std::to_string(reader.line()) +
                                         ": expected 8 fields");
    }
    auto value = [&](std::size_t i) -> std::optional<double> {
      if (trim(row[i]).empty() || trim(row[i]) == "-") return std::nullopt;
      const auto v = parse_number(row[i]);
      if (!v || *v < 0.0) {
        throw Error(ErrorKind::kParse, "row " + std::to_string(reader.line()) +
                                           ": bad rate '" + row[i] + "'");
      }
      return v;
    };
    ResultRow r;
    r.plan_id = std::string(trim(row[0]));
    r.model_label = std::string(trim(row[1]));
    r.train_composition = parse_composition(row[2]);
    r.w_normal = value(3);
    r.w_mild = value(4);
    r.w_moderate = value(5);
    r.w_severe = value(6);
    r.w_clp = value(7);
    r.weights = weights;
    table.rows.push_back(std::move(r));
  }
  return table;
}

}  // namespace asrfair
