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

#include <gtest/gtest.h>
#include <sys/wait.h>

#include <cstdlib>
#include <fstream>
#include <sstream>

#include "asrfair/audio.hpp"
#include "asrfair/corpus.hpp"
#include "asrfair/hypotheses.hpp"
#include "fixtures.hpp"

namespace asrfair {
namespace {

namespace fs = std::filesystem;

struct RunResult {
  int status = -1;
  std::string out;
  std::string err;
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

// Runs the CLI with the given argument string; env is prefixed verbatim.
RunResult run(const std::string& args, const std::string& env = "") {
  static const fs::path dir = testing::scratch_dir("cli_io");
  const auto out = dir / "stdout.txt";
  const auto err = dir / "stderr.txt";
  const std::string cmd = env + " \"" ASRFAIR_CLI_PATH "\" " + args + " >\"" +
                          out.string() + "\" 2>\"" + err.string() + "\"";
  const int raw = std::system(cmd.c_str());
  RunResult r;
  r.status = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
  r.out = slurp(out);
  r.err = slurp(err);
  return r;
}

fs::path write_manifest_file(const fs::path& dir, const CorpusManifest& m,
                             const std::string& name = "manifest.csv") {
  std::ofstream out(dir / name, std::ios::binary);
  write_manifest(out, m, ManifestFormat::kDelimitedRows);
  return dir / name;
}

TEST(Cli, VersionAndHelp) {
  const auto v = run("--version");
  EXPECT_EQ(v.status, 0);
  EXPECT_NE(v.out.find("manifest schema 1"), std::string::npos);
  const auto h = run("dtw --help");
  EXPECT_EQ(h.status, 0);
  for (const auto* flag : {"--normal-dir", "--graded-dir", "--severity-map", "--window-ms",
                           "--hop-ms", "--fft-points", "--metric", "--vad-threshold"}) {
    EXPECT_NE(h.out.find(flag), std::string::npos) << flag;
  }
  EXPECT_EQ(run("").status, 2);
  EXPECT_EQ(run("fairness --wn 3").status, 2);
}

TEST(Cli, ValidateExitCodes) {
  const auto dir = testing::scratch_dir("cli_validate");
  const auto good = write_manifest_file(dir, testing::make_manifest({5, 2, 2, 1}));
  const auto r = run("validate " + good.string());
  EXPECT_EQ(r.status, 0) << r.err;
  EXPECT_NE(r.out.find("records: 10"), std::string::npos);

  auto dup = testing::make_manifest({3, 1, 0, 0});
  dup.records[1].utterance_id = dup.records[0].utterance_id;
  const auto bad = write_manifest_file(dir, dup, "dup.csv");
  const auto d = run("validate " + bad.string());
  EXPECT_EQ(d.status, 1);
  EXPECT_NE(d.out.find("duplicate"), std::string::npos);

  EXPECT_EQ(run("validate " + (dir / "missing.csv").string()).status, 2);
}

TEST(Cli, FairnessSweep) {
  const auto a = run("fairness --wn 93.00 --wc 98.94 --weights 0.5:0.5");
  EXPECT_EQ(a.status, 0);
  EXPECT_NE(a.out.find(",-50.95\n"), std::string::npos) << a.out;
  const auto b = run("fairness --wn 5 --wc 5 --weights 1:0");
  EXPECT_NE(b.out.find(",-5.00\n"), std::string::npos) << b.out;
  const auto c = run("fairness --wn 2.39 --wc 42.89 --weights 0.5:0.5,0.1:0.9,0.9:0.1");
  EXPECT_EQ(c.out,
            "alpha,beta,error_normal,error_clp,average,disparity,fs\n"
            "0.5,0.5,2.39,42.89,22.64,40.50,-31.57\n"
            "0.1,0.9,2.39,42.89,22.64,40.50,-38.71\n"
            "0.9,0.1,2.39,42.89,22.64,40.50,-24.43\n");
  EXPECT_EQ(run("fairness --wn 5 --wc 5 --weights 1-0").status, 2);
  EXPECT_EQ(run("fairness --wn -5 --wc 5").status, 1);
}

TEST(Cli, ScoreDocument) {
  const auto dir = testing::scratch_dir("cli_score");
  const auto m = testing::make_manifest({4, 2, 1, 1}, 5);
  const auto manifest = write_manifest_file(dir, m);
  HypothesisSet perfect;
  for (const auto& r : m.records) perfect.entries[r.utterance_id] = r.reference_words;
  {
    std::ofstream out(dir / "perfect.csv");
    write_hypotheses(out, perfect);
  }
  const auto r = run("score " + manifest.string() + " " + (dir / "perfect.csv").string());
  ASSERT_EQ(r.status, 0) << r.err;
  EXPECT_NE(r.out.find("\"error_percent\": 0.0"), std::string::npos) << r.out;
  EXPECT_EQ(r.out.find("\"error_percent\": null"), std::string::npos);

  // Phoneme scoring without phoneme references.
  const auto p = run("score " + manifest.string() + " " + (dir / "perfect.csv").string() +
                     " --level phoneme");
  EXPECT_EQ(p.status, 1);
  EXPECT_NE(p.err.find("PER unavailable"), std::string::npos) << p.err;

  // One deletion in a Normal utterance of 5 words among 20 Normal tokens.
  auto one_off = perfect;
  one_off.entries[m.records[0].utterance_id].pop_back();
  {
    std::ofstream out(dir / "one_off.csv");
    write_hypotheses(out, one_off);
  }
  const auto q = run("score " + manifest.string() + " " + (dir / "one_off.csv").string() +
                     " --jobs 3");
  ASSERT_EQ(q.status, 0) << q.err;
  EXPECT_NE(q.out.find("\"error_percent\": 5.0"), std::string::npos) << q.out;
  EXPECT_NE(q.out.find("\"pooled_macro\": 2.5"), std::string::npos) << q.out;
}

TEST(Cli, SplitAndSeedPrecedence) {
  const auto dir = testing::scratch_dir("cli_split");
  const auto manifest = write_manifest_file(dir, testing::make_manifest({30, 10, 10, 10}));
  const auto a = run("split " + manifest.string() + " --seed 5");
  const auto b = run("split " + manifest.string(), "ASRFAIR_SEED=5");
  const auto c = run("split " + manifest.string() + " --seed 5", "ASRFAIR_SEED=6");
  const auto d = run("split " + manifest.string(), "ASRFAIR_SEED=6");
  ASSERT_EQ(a.status, 0) << a.err;
  EXPECT_EQ(a.out, b.out);
  EXPECT_EQ(a.out, c.out);
  EXPECT_NE(a.out, d.out);
  EXPECT_NE(a.err.find("eval: 12"), std::string::npos) << a.err;

  std::ofstream(dir / "cfg.ini") << "[split]\nseed=5\n";
  const auto e = run("--config " + (dir / "cfg.ini").string() + " split " + manifest.string(),
                     "ASRFAIR_SEED=6");
  EXPECT_EQ(e.out, a.out);
}

TEST(Cli, SimulateIsDeterministic) {
  const auto dir = testing::scratch_dir("cli_simulate");
  const auto m = testing::make_manifest({10, 5, 5, 5}, 6);
  const auto manifest = write_manifest_file(dir, m);
  std::ofstream(dir / "zero.json") << R"({"seed": 1, "vocabulary": ["a", "b"]})";
  std::ofstream(dir / "noisy.json")
      << R"({"seed": 1, "vocabulary": ["a", "b", "c"], "rates": {"normal": {"sub": 0.1},
            "mild": {"sub": 0.3}, "moderate": {"del": 0.3}, "severe": {"ins": 0.3}}})";

  const auto zero = run("simulate " + manifest.string() + " --profile " +
                        (dir / "zero.json").string() + " -o " + (dir / "zero.csv").string());
  ASSERT_EQ(zero.status, 0) << zero.err;
  const auto hyps = load_hypotheses(dir / "zero.csv");
  for (const auto& r : m.records) EXPECT_EQ(*hyps.find(r.utterance_id), r.reference_words);

  const std::string noisy = "simulate " + manifest.string() + " --profile " +
                            (dir / "noisy.json").string();
  EXPECT_EQ(run(noisy + " -o " + (dir / "n1.csv").string()).status, 0);
  EXPECT_EQ(run(noisy + " -o " + (dir / "n2.csv").string()).status, 0);
  EXPECT_EQ(slurp(dir / "n1.csv"), slurp(dir / "n2.csv"));
  EXPECT_NE(run(noisy + " --seed 2").out, slurp(dir / "n1.csv"));
}

TEST(Cli, DtwStudy) {
  const auto dir = testing::scratch_dir("cli_dtw");
  fs::create_directories(dir / "normal");
  fs::create_directories(dir / "graded");
  write_wav(dir / "normal" / "a.wav", testing::vowel(120, 700, 1200, 0.4));
  write_wav(dir / "normal" / "b.wav", testing::vowel(150, 500, 1700, 0.4));
  write_wav(dir / "graded" / "a.wav", testing::vowel(120, 700, 1200, 0.4));
  write_wav(dir / "graded" / "b.wav", testing::vowel(150, 500, 1700, 0.4));
  std::ofstream(dir / "map.csv") << "file,severity\na.wav,mild\nb,mild\n";

  const auto r = run("dtw --normal-dir " + (dir / "normal").string() + " --graded-dir " +
                     (dir / "graded").string() + " --severity-map " + (dir / "map.csv").string());
  ASSERT_EQ(r.status, 0) << r.err;
  EXPECT_NE(r.out.find("mild,a,a,0.000000,0.000000"), std::string::npos) << r.out;
  EXPECT_NE(r.out.find("mild,b,b,0.000000,0.000000"), std::string::npos) << r.out;

  write_wav(dir / "graded" / "quiet.wav", testing::silence(0.3));
  const auto s = run("dtw --normal-dir " + (dir / "normal").string() + " --graded-dir " +
                     (dir / "graded").string() + " --severity-map " +
                     (dir / "map.csv").string() + " --severity severe");
  EXPECT_EQ(s.status, 0) << s.err;
  EXPECT_NE(s.out.find("skipped_utterances,1,quiet"), std::string::npos) << s.out;

  const auto u = run("dtw --normal-dir " + (dir / "normal").string() + " --graded-dir " +
                     (dir / "graded").string() + " --severity-map " + (dir / "map.csv").string());
  EXPECT_EQ(u.status, 2);  // quiet.wav has no severity
}

TEST(Cli, ReportFromTableAndPlans) {
  const auto dir = testing::scratch_dir("cli_report");
  std::ofstream(dir / "table.csv")
      << "plan_id,model_label,composition,normal,mild,moderate,severe,clp\n"
         "g1,GMM-HMM,Normal,2.39,,,,42.89\n"
         "g2,GMM-HMM,Mild+Moderate+Severe+Normal,2.22,,,,35.30\n";
  const auto r = run("report --table " + (dir / "table.csv").string() +
                     " --weights 0.5:0.5,0.1:0.9 --out-dir " + (dir / "out").string());
  ASSERT_EQ(r.status, 0) << r.err;
  const std::string md = slurp(dir / "out" / "report.md");
  EXPECT_NE(md.find("| Normal | GMM-HMM | 2.39 | - | - | - | 42.89 | 22.64 | -31.57 | -38.71 |"),
            std::string::npos) << md;
  EXPECT_NE(md.find("-25.92 | -31.65 |"), std::string::npos) << md;
  EXPECT_NE(slurp(dir / "out" / "fs_chart.svg").find("data-fs=\"-31.57\""), std::string::npos);
  EXPECT_TRUE(fs::exists(dir / "out" / "report.csv"));

  // Plans with hypotheses scored on the eval partition.
  auto m = testing::make_manifest({6, 2, 2, 2}, 4);
  for (auto& rec : m.records) rec.partition = Partition::kEval;
  const auto manifest = write_manifest_file(dir, m);
  HypothesisSet perfect;
  for (const auto& rec : m.records) perfect.entries[rec.utterance_id] = rec.reference_words;
  {
    std::ofstream out(dir / "hyp.csv");
    write_hypotheses(out, perfect);
  }
  std::ofstream(dir / "plans.json")
      << R"({"plans": [{"plan_id": "p", "model_label": "M", "composition": "normal",
             "hypotheses": "hyp.csv"}]})";
  const auto p = run("report --manifest " + manifest.string() + " --plans " +
                     (dir / "plans.json").string() + " --out-dir " + (dir / "plans").string());
  ASSERT_EQ(p.status, 0) << p.err;
  EXPECT_NE(slurp(dir / "plans" / "report.md").find("| Normal | M | 0.00 |"), std::string::npos);
  EXPECT_EQ(run("report --out-dir " + (dir / "x").string()).status, 1);
}

}  // namespace
}  // namespace asrfair
