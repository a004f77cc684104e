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

#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "asrfair/corpus.hpp"
#include "asrfair/error_metrics.hpp"
#include "asrfair/fairness.hpp"
#include "asrfair/hypotheses.hpp"

namespace asrfair {

using Composition = std::set<Category>;

// "Mild+Moderate+Normal", "mild,normal", "CLP" (all three severities) or
// "all". Throws kParse on unknown names or an empty composition.
Composition parse_composition(std::string_view text);
// Long label as used for table rows: "Normal", "CLP", "Mild+Normal", ...
std::string composition_label(const Composition& composition);
// Short label as used on the chart axis: "No", "CLP", "Mi+No", ...
std::string composition_short_label(const Composition& composition);

struct ExperimentPlan {
  std::string plan_id;
  // Opaque label of the external system ("GMM-HMM", "Whisper", ...).
  std::string model_label;
  // Provenance only: the toolkit does not train models.
  Composition train_composition;
  std::vector<FairnessWeights> weights;
  // Hypotheses of the system trained on this composition, when the plan is
  // loaded from a file. Relative paths are resolved against the plan file.
  std::optional<std::filesystem::path> hypotheses;
};

// Throws kInvalidArgument for an empty composition or weight list.
void validate_plan(const ExperimentPlan& plan);

// Accepts a single plan object, an array of plans, or {"plans": [...]}.
std::vector<ExperimentPlan> load_plans(const std::filesystem::path& path);
std::vector<ExperimentPlan> parse_plans(std::istream& in,
                                        const std::filesystem::path& base_dir);

// One row of a train-composition result table. Pooled WER and FS are always
// derived from the stored group rates, never stored.
struct ResultRow {
  std::string plan_id;
  std::string model_label;
  Composition train_composition;
  std::optional<double> w_normal;
  std::optional<double> w_mild;
  std::optional<double> w_moderate;
  std::optional<double> w_severe;
  std::optional<double> w_clp;  // CLP total (all severities pooled)
  std::optional<double> pooled_micro;
  std::vector<FairnessWeights> weights;
  std::size_t n_missing_hypotheses = 0;

  std::optional<double> w_severity(Severity s) const;
  std::optional<double> pooled() const;
  // Empty when either group rate is unavailable or the pair is not listed.
  std::optional<double> fs(FairnessWeights w) const;
  bool has_weights(FairnessWeights w) const;
};

struct ResultTable {
  std::vector<ResultRow> rows;
};

// Scores the eval partition of the manifest. Throws kInvalidArgument when
// the eval partition is empty or the plan is invalid.
ResultRow run_experiment(const ExperimentPlan& plan,
                         const CorpusManifest& manifest,
                         const HypothesisSet& hypotheses,
                         const ScoreOptions& options = {});

struct Improvement {
  FairnessWeights weights;
  double pooled_baseline = 0.0;
  double pooled_candidate = 0.0;
  double pooled_delta = 0.0;  // candidate - baseline
  double fs_baseline = 0.0;
  double fs_candidate = 0.0;
  double fs_delta = 0.0;                     // candidate - baseline
  double relative_fairness_improvement = 0.0;  // percent
};

// Throws kInvalidArgument when a row lacks the weight pair or its group
// rates.
Improvement compare_experiments(const ResultRow& baseline,
                                const ResultRow& candidate,
                                FairnessWeights weights);

enum class ReportFormat { kDelimited, kMarkdownTable };

// Columns: Train | Model | Normal | Mild | Moderate | Severe | CLP | Pooled
// WER | FS per weight pair (union over rows, first-seen order). Values are
// rendered to 2 decimals; the delimited form appends full-precision columns.
std::string emit_report(const ResultTable& table, ReportFormat format);

// Standalone SVG: grouped bars of FS per train composition, one bar per
// model label, linear scale with bar length proportional to |FS|.
std::string emit_fs_chart(const ResultTable& table, FairnessWeights weights);

// plan_id,model_label,composition,normal,mild,moderate,severe,clp with
// empty cells for unavailable rates; weights are attached to every row.
ResultTable load_result_rows(std::istream& in,
                             const std::vector<FairnessWeights>& weights);

}  // namespace asrfair
