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

#include <gtest/gtest.h>

#include <fstream>
#include <regex>
#include <sstream>

#include "asrfair/error.hpp"
#include "fixtures.hpp"

namespace asrfair {
namespace {

constexpr FairnessWeights kEven{0.5, 0.5};

ExperimentPlan plan(std::string id, std::string model, std::string comp) {
  ExperimentPlan p;
  p.plan_id = std::move(id);
  p.model_label = std::move(model);
  p.train_composition = parse_composition(comp);
  p.weights = {kEven};
  return p;
}

CorpusManifest eval_manifest(testing::CategoryCounts counts, std::size_t words) {
  auto m = testing::make_manifest(counts, words);
  for (auto& r : m.records) r.partition = Partition::kEval;
  return m;
}

// Hypotheses with exactly `errors` substituted tokens spread over the
// records of one group.
void corrupt_group(const CorpusManifest& m, Group g, std::size_t errors,
                   HypothesisSet& set) {
  std::size_t n = 0;
  for (const auto& r : m.records) n += r.group == g;
  std::size_t index = 0;
  for (const auto& r : m.records) {
    if (r.group != g) continue;
    const std::size_t k = errors / n + (index++ < errors % n ? 1 : 0);
    auto hyp = r.reference_words;
    for (std::size_t i = 0; i < k; ++i) hyp[i] = "zz" + std::to_string(i);
    set.entries[r.utterance_id] = hyp;
  }
}

ResultRow row(std::string model, std::string comp, double wn, double wc) {
  ResultRow r;
  r.plan_id = model + "_" + comp;
  r.model_label = std::move(model);
  r.train_composition = parse_composition(comp);
  r.w_normal = wn;
  r.w_clp = wc;
  r.weights = {kEven};
  return r;
}

TEST(Composition, ParseAndLabels) {
  EXPECT_EQ(parse_composition("Normal"), Composition{Category::kNormal});
  EXPECT_EQ(parse_composition("CLP"),
            (Composition{Category::kMild, Category::kModerate, Category::kSevere}));
  EXPECT_EQ(parse_composition("mild,normal"), parse_composition("Mild+Normal"));
  EXPECT_EQ(parse_composition("Mi+Mo+Se+No").size(), 4u);
  EXPECT_EQ(parse_composition("all").size(), 4u);
  EXPECT_THROW(parse_composition("Loud"), Error);
  EXPECT_THROW(parse_composition(""), Error);

  EXPECT_EQ(composition_label(parse_composition("normal,moderate,mild")),
            "Mild+Moderate+Normal");
  EXPECT_EQ(composition_label(parse_composition("clp")), "CLP");
  EXPECT_EQ(composition_short_label(parse_composition("all")), "Mi+Mo+Se+No");
  EXPECT_EQ(composition_short_label(parse_composition("normal")), "No");
}

TEST(Plans, ParseForms) {
  std::istringstream single(
      R"({"plan_id": "p1", "model_label": "Whisper", "composition": "Mild+Normal",
          "weights": ["0.5:0.5", [1, 0], {"alpha": 0.2, "beta": 0.8}],
          "hypotheses": "hyps/p1.csv"})");
  const auto plans = parse_plans(single, "/data/run");
  ASSERT_EQ(plans.size(), 1u);
  EXPECT_EQ(plans[0].model_label, "Whisper");
  EXPECT_EQ(plans[0].weights,
            (std::vector<FairnessWeights>{{0.5, 0.5}, {1.0, 0.0}, {0.2, 0.8}}));
  EXPECT_EQ(*plans[0].hypotheses, std::filesystem::path("/data/run/hyps/p1.csv"));

  std::istringstream wrapped(
      R"({"plans": [{"plan_id": "a", "composition": ["normal"]},
                    {"plan_id": "b", "composition": "CLP"}]})");
  const auto many = parse_plans(wrapped, ".");
  ASSERT_EQ(many.size(), 2u);
  EXPECT_EQ(many[0].weights, std::vector<FairnessWeights>{kEven});
  EXPECT_FALSE(many[1].hypotheses.has_value());

  std::istringstream broken(R"([{"composition": "normal"}])");
  EXPECT_THROW(parse_plans(broken, "."), Error);
}

TEST(RunExperiment, PerfectHypotheses) {
  const auto m = eval_manifest({20, 10, 10, 10}, 5);
  HypothesisSet set;
  for (const auto& r : m.records) set.entries[r.utterance_id] = r.reference_words;
  const auto r = run_experiment(plan("p", "GMM", "normal"), m, set);
  EXPECT_EQ(r.w_normal, 0.0);
  EXPECT_EQ(r.w_clp, 0.0);
  EXPECT_EQ(r.pooled(), 0.0);
  EXPECT_EQ(r.fs(kEven), 0.0);
  EXPECT_FALSE(std::signbit(*r.fs(kEven)));
}

TEST(RunExperiment, EngineeredRatesReproducePublishedRow) {
  const auto m = eval_manifest({100, 40, 30, 30}, 100);
  HypothesisSet set;
  corrupt_group(m, Group::kNormal, 1903, set);
  corrupt_group(m, Group::kClp, 6615, set);
  const auto r = run_experiment(plan("p", "GMM", "normal"), m, set);
  EXPECT_NEAR(*r.w_normal, 19.03, 1e-9);
  EXPECT_NEAR(*r.w_clp, 66.15, 1e-9);
  EXPECT_NEAR(*r.pooled(), 42.59, 0.01);
  EXPECT_NEAR(*r.fs(kEven), -44.86, 0.02);
  EXPECT_FALSE(r.fs({1.0, 0.0}).has_value());
}

TEST(RunExperiment, OnlyEvalPartitionIsScored) {
  auto m = eval_manifest({10, 10, 0, 0}, 4);
  HypothesisSet set;
  for (auto& r : m.records) set.entries[r.utterance_id] = r.reference_words;
  m.records[0].partition = Partition::kTrain;
  set.entries[m.records[0].utterance_id] = {};
  EXPECT_EQ(run_experiment(plan("p", "M", "normal"), m, set).w_normal, 0.0);

  for (auto& r : m.records) r.partition = Partition::kDev;
  EXPECT_THROW(run_experiment(plan("p", "M", "normal"), m, set), Error);
}

TEST(RunExperiment, DoesNotMutateInputs) {
  const auto m = eval_manifest({10, 10, 0, 0}, 4);
  HypothesisSet set;
  corrupt_group(m, Group::kClp, 7, set);
  const auto m_copy = m;
  const auto set_copy = set;
  const auto a = run_experiment(plan("p", "M", "normal"), m, set);
  const auto b = run_experiment(plan("p", "M", "normal"), m, set);
  EXPECT_EQ(m, m_copy);
  EXPECT_EQ(set, set_copy);
  EXPECT_EQ(emit_report({{a}}, ReportFormat::kDelimited),
            emit_report({{b}}, ReportFormat::kDelimited));
  EXPECT_EQ(a.n_missing_hypotheses, 10u);
}

TEST(Compare, PublishedImprovements) {
  const auto base = row("GMM", "normal", 19.03, 66.15);
  const auto cand = row("GMM", "Mi+No", 17.50, 51.20);
  const auto imp = compare_experiments(base, cand, kEven);
  EXPECT_NEAR(imp.fs_baseline, -44.86, 0.01);
  EXPECT_NEAR(imp.fs_candidate, *cand.fs(kEven), 1e-12);
  EXPECT_NEAR(imp.relative_fairness_improvement,
              100.0 * (44.86 - -*cand.fs(kEven)) / 44.86, 0.05);
  EXPECT_NEAR(imp.pooled_delta, *cand.pooled() - *base.pooled(), 1e-12);

  const auto same = compare_experiments(base, base, kEven);
  EXPECT_EQ(same.relative_fairness_improvement, 0.0);
  EXPECT_EQ(same.fs_delta, 0.0);
  EXPECT_THROW(compare_experiments(base, cand, {1.0, 0.0}), Error);
}

TEST(Report, MarkdownSingleRow) {
  const std::string md = emit_report({{row("XLS-R", "normal", 2.39, 42.89)}},
                                     ReportFormat::kMarkdownTable);
  EXPECT_EQ(md,
            "| Train | Model | Normal | Mild | Moderate | Severe | CLP | Pooled WER |"
            " FS (α=0.5, β=0.5) |\n"
            "|---|---|---:|---:|---:|---:|---:|---:|---:|\n"
            "| Normal | XLS-R | 2.39 | - | - | - | 42.89 | 22.64 | -31.57 |\n");
}

TEST(Report, DelimitedCarriesFullPrecision) {
  const std::string csv =
      emit_report({{row("Whisper", "clp", 1.0 / 3.0, 10.0)}}, ReportFormat::kDelimited);
  std::istringstream in(csv);
  std::string header, line;
  std::getline(in, header);
  std::getline(in, line);
  EXPECT_EQ(header,
            "plan_id,train,model,normal,mild,moderate,severe,clp,pooled,fs_a0.5_b0.5,"
            "normal_full,mild_full,moderate_full,severe_full,clp_full,pooled_full,"
            "fs_a0.5_b0.5_full");
  EXPECT_NE(line.find(",CLP,Whisper,0.33,,,,10.00,5.17,"), std::string::npos) << line;
  EXPECT_NE(line.find("0.3333333333333333"), std::string::npos) << line;
}

TEST(Report, Deterministic) {
  ResultTable t{{row("A", "normal", 5.0, 40.0), row("B", "clp", 7.5, 30.25)}};
  EXPECT_EQ(emit_report(t, ReportFormat::kMarkdownTable),
            emit_report(t, ReportFormat::kMarkdownTable));
  EXPECT_EQ(emit_fs_chart(t, kEven), emit_fs_chart(t, kEven));
}

double attr(const std::string& element, const std::string& name) {
  const std::regex re(" " + name + "=\"([-0-9.]+)\"");
  std::smatch m;
  EXPECT_TRUE(std::regex_search(element, m, re)) << element;
  return std::stod(m[1]);
}

std::vector<std::string> bars(const std::string& svg) {
  std::vector<std::string> out;
  std::istringstream in(svg);
  for (std::string line; std::getline(in, line);) {
    if (line.find("class=\"bar\"") != std::string::npos) out.push_back(line);
  }
  return out;
}

TEST(Chart, SingleBarAndProportionalHeights) {
  const auto one = bars(emit_fs_chart({{row("M", "normal", 10.0, 30.0)}}, kEven));
  ASSERT_EQ(one.size(), 1u);
  EXPECT_NE(one[0].find("data-fs=\"-20.00\""), std::string::npos);

  const auto two = bars(emit_fs_chart(
      {{row("M", "normal", 10.0, 30.0), row("M", "clp", 5.0, 15.0)}}, kEven));
  ASSERT_EQ(two.size(), 2u);
  EXPECT_NEAR(attr(two[0], "height") / attr(two[1], "height"), 2.0, 1e-3);
  EXPECT_EQ(attr(two[0], "y"), attr(two[1], "y"));
}

TEST(Chart, GroupsByCompositionAndModel) {
  ResultTable t;
  const std::vector<std::string> comps = {"normal", "clp", "Mi+No", "Mi+Mo+No", "all"};
  for (const auto& c : comps) {
    for (const std::string model : {"GMM", "XLS-R", "Whisper"}) {
      t.rows.push_back(row(model, c, 5.0, 20.0));
    }
  }
  const std::string svg = emit_fs_chart(t, kEven);
  EXPECT_EQ(bars(svg).size(), 15u);
  for (const auto* label : {">No<", ">CLP<", ">Mi+No<", ">Mi+Mo+No<", ">Mi+Mo+Se+No<"}) {
    EXPECT_NE(svg.find(label), std::string::npos) << label;
  }
  EXPECT_NE(svg.find(">FS</text>"), std::string::npos);
  EXPECT_NE(svg.find("class=\"legend\""), std::string::npos);
}

TEST(ResultRows, LoadTable) {
  std::istringstream in(
      "plan_id,model_label,composition,normal,mild,moderate,severe,clp\n"
      "a,GMM,Normal,19.03,,,,66.15\n"
      "b,Whisper,Mild+Normal,3.5,-,4,5,6\n");
  const auto t = load_result_rows(in, {kEven});
  ASSERT_EQ(t.rows.size(), 2u);
  EXPECT_NEAR(*t.rows[0].fs(kEven), -44.86, 0.01);
  EXPECT_FALSE(t.rows[1].w_mild.has_value());
  std::istringstream bad("plan_id,model\n");
  EXPECT_THROW(load_result_rows(bad, {kEven}), Error);
}

}  // namespace
}  // namespace asrfair
