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

// asrfair command-line entry point. One subcommand per invocation.
//
// Exit status: 0 on success, 1 when the inputs are well formed but the
// request cannot be met (validation violations, unavailable metrics, bad
// arguments), 2 on I/O, parse or usage failure.

#include <algorithm>
#include <charconv>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "asrfair/corpus.hpp"
#include "asrfair/delimited.hpp"
#include "asrfair/error.hpp"
#include "asrfair/error_metrics.hpp"
#include "asrfair/experiment.hpp"
#include "asrfair/fairness.hpp"
#include "asrfair/hypotheses.hpp"
#include "asrfair/spectral.hpp"
#include "asrfair/version.hpp"
#include "json.hpp"

namespace fs = std::filesystem;
using namespace asrfair;

namespace {

constexpr int kExitFailure = 1;
constexpr int kExitInputError = 2;

int exit_code(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kIo:
    case ErrorKind::kParse:
    case ErrorKind::kInvariant:
      return kExitInputError;
    default:
      return kExitFailure;
  }
}

std::optional<ManifestFormat> manifest_format(const std::string& name) {
  if (name.empty()) return std::nullopt;
  const auto lowered = to_lower_ascii(name);
  if (lowered == "csv" || lowered == "delimited") return ManifestFormat::kDelimitedRows;
  if (lowered == "jsonl" || lowered == "json") return ManifestFormat::kRecordPerLine;
  throw Error(ErrorKind::kInvalidArgument, "unknown manifest format '" + name + "'");
}

// --seed (or its config-file value) wins, then ASRFAIR_SEED, then fallback.
std::uint64_t resolve_seed(const CLI::Option* flag, std::uint64_t flag_value,
                           std::uint64_t fallback) {
  if (flag->count() > 0) return flag_value;
  if (const char* env = std::getenv("ASRFAIR_SEED"); env != nullptr && *env) {
    std::uint64_t v = 0;
    const std::string text(env);
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (ec != std::errc() || ptr != text.data() + text.size()) {
      throw Error(ErrorKind::kInvalidArgument, "ASRFAIR_SEED must be an unsigned integer");
    }
    return v;
  }
  return fallback;
}

// Writes to the file when a path is given, else to standard output.
template <typename Fn>
void emit(const std::string& path, Fn&& write) {
  if (path.empty() || path == "-") {
    write(std::cout);
    std::cout.flush();
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::kIo, "cannot write '" + path + "'");
  write(out);
  if (!out) throw Error(ErrorKind::kIo, "write failed for '" + path + "'");
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::kIo, "cannot write '" + path.string() + "'");
  out << text;
}

nlohmann::ordered_json rate_json(const ErrorRateReport& r) {
  nlohmann::ordered_json j;
  j["error_percent"] = r.error_percent ? nlohmann::ordered_json(*r.error_percent)
                                       : nlohmann::ordered_json(nullptr);
  j["substitutions"] = r.components.substitutions;
  j["deletions"] = r.components.deletions;
  j["insertions"] = r.components.insertions;
  j["hits"] = r.components.hits;
  j["reference_tokens"] = r.components.ref_len;
  j["n_utterances"] = r.n_utterances;
  j["n_missing_hypotheses"] = r.n_missing_hypotheses;
  return j;
}

nlohmann::ordered_json optional_json(const std::optional<double>& v) {
  return v ? nlohmann::ordered_json(*v) : nlohmann::ordered_json(nullptr);
}

// Severity map rows: file,severity. The header row is optional; files may
// be named with or without the .wav extension.
std::map<std::string, Severity> load_severity_map(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::kIo, "cannot open severity map '" + path.string() + "'");
  DelimitedReader reader(in);
  Row row;
  std::map<std::string, Severity> out;
  while (reader.next(row)) {
    if (row.size() == 1 && trim(row[0]).empty()) continue;
    if (row.size() != 2) {
      throw Error(ErrorKind::kParse, "severity map row " + std::to_string(reader.line()) +
                                         ": expected file,severity");
    }
    const std::string file(trim(row[0]));
    if (reader.line() == 1 && to_lower_ascii(file) == "file") continue;
    const auto severity = parse_severity(trim(row[1]));
    if (!severity || *severity == Severity::kNone) {
      throw Error(ErrorKind::kParse, "severity map row " + std::to_string(reader.line()) +
                                         ": bad severity '" + row[1] + "'");
    }
    out[fs::path(file).stem().string()] = *severity;
  }
  return out;
}

std::vector<LabeledAudio> load_wav_dir(const fs::path& dir) {
  if (!fs::is_directory(dir)) {
    throw Error(ErrorKind::kIo, "not a directory: '" + dir.string() + "'");
  }
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (entry.is_regular_file() && to_lower_ascii(entry.path().extension().string()) == ".wav") {
      files.push_back(entry.path());
    }
  }
  std::sort(files.begin(), files.end());
  std::vector<LabeledAudio> out;
  for (const auto& f : files) out.push_back({f.stem().string(), read_wav(f)});
  return out;
}

WindowFunction parse_window(const std::string& name) {
  const auto n = to_lower_ascii(name);
  if (n == "hamming") return WindowFunction::kHamming;
  if (n == "hann") return WindowFunction::kHann;
  if (n == "rect" || n == "rectangular") return WindowFunction::kRectangular;
  throw Error(ErrorKind::kInvalidArgument, "unknown window '" + name + "'");
}

FairnessWeights single_weight(const std::string& text) {
  const auto list = parse_weight_list(text);
  if (list.size() != 1) {
    throw Error(ErrorKind::kInvalidArgument, "expected one weight pair, got '" + text + "'");
  }
  return list.front();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Fairness-aware ASR evaluation toolkit"};
  app.set_version_flag("--version", std::string("asrfair ") + kVersion +
                                        " (manifest schema " +
                                        std::to_string(kManifestSchemaVersion) +
                                        ", hypothesis schema " +
                                        std::to_string(kHypothesisSchemaVersion) + ")");
  app.set_config("--config", "", "TOML/INI file supplying defaults for any flag");
  app.require_subcommand(1);
  app.fallthrough();
  unsigned jobs = 0;
  app.add_option("--jobs,-j", jobs, "Worker threads (0 = all cores)");

  // validate
  auto* validate = app.add_subcommand("validate", "Check a manifest and print its counts");
  std::string v_manifest, v_format;
  validate->add_option("manifest", v_manifest, "Manifest path")->required();
  validate->add_option("--format", v_format, "csv or jsonl (default: by extension)");

  // split
  auto* split = app.add_subcommand("split", "Assign train/dev/eval partitions");
  std::string s_manifest, s_format, s_out, s_out_format;
  SplitSpec s_spec;
  std::uint64_t s_seed = 0;
  split->add_option("manifest", s_manifest, "Manifest path")->required();
  split->add_option("--format", s_format, "Input format: csv or jsonl");
  split->add_option("--out,-o", s_out, "Output manifest (default: stdout)");
  split->add_option("--out-format", s_out_format, "Output format (default: input format)");
  split->add_option("--test", s_spec.test_fraction, "Eval fraction of the corpus")
      ->capture_default_str();
  split->add_option("--dev", s_spec.dev_fraction_of_train, "Dev fraction of the remainder")
      ->capture_default_str();
  auto* s_seed_opt = split->add_option("--seed", s_seed, "Shuffle seed (env ASRFAIR_SEED)");
  split->add_flag("--speaker-disjoint", s_spec.speaker_disjoint,
                  "Keep each speaker in one partition");

  // score
  auto* score = app.add_subcommand("score", "Per-group and per-severity error rates");
  std::string c_manifest, c_hyps, c_format, c_level = "word", c_missing = "exclude",
                                              c_partition = "all", c_out;
  bool c_no_normalize = false;
  score->add_option("manifest", c_manifest, "Manifest path")->required();
  score->add_option("hypotheses", c_hyps, "Hypothesis file or directory")->required();
  score->add_option("--format", c_format, "Manifest format: csv or jsonl");
  score->add_option("--level", c_level, "word or phoneme")
      ->check(CLI::IsMember({"word", "phoneme"}))
      ->capture_default_str();
  score->add_option("--missing", c_missing, "exclude or empty")
      ->check(CLI::IsMember({"exclude", "empty"}))
      ->capture_default_str();
  score->add_option("--partition", c_partition, "all, train, dev or eval")
      ->check(CLI::IsMember({"all", "train", "dev", "eval"}))
      ->capture_default_str();
  score->add_flag("--no-normalize", c_no_normalize, "Compare tokens verbatim");
  score->add_option("--out,-o", c_out, "Output path (default: stdout)");

  // fairness
  auto* fairness = app.add_subcommand("fairness", "Fairness score sweep for two group rates");
  double f_wn = 0.0, f_wc = 0.0;
  std::string f_weights = "0.5:0.5", f_out;
  fairness->add_option("--wn", f_wn, "Normal-group error rate (percent)")->required();
  fairness->add_option("--wc", f_wc, "CLP-group error rate (percent)")->required();
  fairness->add_option("--weights", f_weights, "alpha:beta pairs, comma separated")
      ->capture_default_str();
  fairness->add_option("--out,-o", f_out, "Output path (default: stdout)");

  // dtw
  auto* dtw = app.add_subcommand("dtw", "DTW distances between normal and graded recordings");
  std::string d_normal, d_graded, d_map, d_severity, d_out, d_window = "hamming",
                                                     d_metric = "euclidean", d_scale = "log";
  FrameSpec d_spec;
  double d_threshold = kDefaultVadThreshold;
  dtw->add_option("--normal-dir", d_normal, "Directory of normal .wav files")->required();
  dtw->add_option("--graded-dir", d_graded, "Directory of graded .wav files")->required();
  dtw->add_option("--severity-map", d_map, "CSV file,severity for the graded files");
  dtw->add_option("--severity", d_severity, "Severity for graded files missing from the map");
  dtw->add_option("--window-ms", d_spec.window_ms, "Analysis window")->capture_default_str();
  dtw->add_option("--hop-ms", d_spec.hop_ms, "Frame hop")->capture_default_str();
  dtw->add_option("--fft-points", d_spec.fft_points, "Transform length")
      ->capture_default_str();
  dtw->add_option("--window", d_window, "hamming, hann or rect")->capture_default_str();
  dtw->add_option("--metric", d_metric, "euclidean or cosine")
      ->check(CLI::IsMember({"euclidean", "cosine"}))
      ->capture_default_str();
  dtw->add_option("--scale", d_scale, "log or linear magnitudes")
      ->check(CLI::IsMember({"log", "linear"}))
      ->capture_default_str();
  dtw->add_option("--vad-threshold", d_threshold, "Fraction of mean frame energy")
      ->capture_default_str();
  dtw->add_option("--out,-o", d_out, "Output path (default: stdout)");

  // simulate
  auto* simulate = app.add_subcommand("simulate", "Corrupt references into hypotheses");
  std::string m_manifest, m_format, m_profile, m_out;
  std::uint64_t m_seed = 0;
  simulate->add_option("manifest", m_manifest, "Manifest path")->required();
  simulate->add_option("--format", m_format, "Manifest format: csv or jsonl");
  simulate->add_option("--profile", m_profile, "Corruption profile (JSON)")->required();
  auto* m_seed_opt =
      simulate->add_option("--seed", m_seed, "Overrides the profile seed (env ASRFAIR_SEED)");
  simulate->add_option("--out,-o", m_out, "Output path (default: stdout)");

  // report
  auto* report = app.add_subcommand("report", "Result table, markdown and FS chart");
  std::string r_manifest, r_format, r_plans, r_table, r_out_dir = ".", r_weights = "0.5:0.5",
                                                    r_chart_weights;
  report->add_option("--manifest", r_manifest, "Partitioned manifest (with --plans)");
  report->add_option("--format", r_format, "Manifest format: csv or jsonl");
  report->add_option("--plans", r_plans, "Plan file (JSON)");
  report->add_option("--table", r_table, "Precomputed group rates (CSV)");
  report->add_option("--weights", r_weights, "Weight pairs for --table rows")
      ->capture_default_str();
  report->add_option("--chart-weights", r_chart_weights,
                     "Weight pair for the chart (default: first listed)");
  report->add_option("--out-dir", r_out_dir, "Directory for report.csv, report.md, fs_chart.svg")
      ->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitInputError;
  }

  try {
    if (*validate) {
      const auto manifest =
          load_manifest(v_manifest, manifest_format(v_format), LoadOptions{.strict = false});
      const auto rep = validate_manifest(manifest);
      print_validation_report(std::cout, rep);
      return rep.ok() ? 0 : kExitFailure;
    }

    if (*split) {
      const auto in_format = manifest_format(s_format).value_or(infer_manifest_format(s_manifest));
      const auto manifest = load_manifest(s_manifest, in_format);
      s_spec.seed = resolve_seed(s_seed_opt, s_seed, 0);
      const auto out = split_corpus(manifest, s_spec);
      const auto out_format = manifest_format(s_out_format).value_or(in_format);
      emit(s_out, [&](std::ostream& os) { write_manifest(os, out, out_format); });
      const auto rep = validate_manifest(out);
      for (const auto& [partition, n] : rep.by_partition) {
        std::cerr << (partition ? to_string(*partition) : "unassigned") << ": " << n << '\n';
      }
      return 0;
    }

    if (*score) {
      const auto manifest = load_manifest(c_manifest, manifest_format(c_format));
      const auto hyps = load_hypotheses(fs::path(c_hyps));
      ScoreOptions opts;
      opts.level = c_level == "phoneme" ? TokenLevel::kPhoneme : TokenLevel::kWord;
      opts.missing = c_missing == "empty" ? MissingPolicy::kScoreAsEmpty : MissingPolicy::kExclude;
      opts.normalize = !c_no_normalize;
      opts.jobs = jobs;
      std::vector<UtteranceRecord> records =
          c_partition == "all" ? manifest.records
                               : select_partition(manifest, *parse_partition(c_partition));
      const auto result = score_testset(records, hyps, opts);
      nlohmann::ordered_json doc;
      doc["level"] = c_level;
      doc["missing_policy"] = c_missing;
      doc["partition"] = c_partition;
      doc["overall"] = rate_json(result.overall);
      for (const auto& [g, r] : result.by_group) doc["groups"][std::string(to_string(g))] = rate_json(r);
      for (const auto& [s, r] : result.by_severity) {
        doc["severities"][std::string(to_string(s))] = rate_json(r);
      }
      doc["pooled_macro"] = optional_json(result.pooled_macro());
      doc["n_unmatched_hypotheses"] = result.n_unmatched_hypotheses;
      emit(c_out, [&](std::ostream& os) { os << doc.dump(2) << '\n'; });
      return 0;
    }

    if (*fairness) {
      const auto weights = parse_weight_list(f_weights);
      const auto sweep = fairness_sweep(f_wn, f_wc, weights);
      emit(f_out, [&](std::ostream& os) { write_sweep(os, sweep); });
      return 0;
    }

    if (*dtw) {
      if (d_map.empty() && d_severity.empty()) {
        throw Error(ErrorKind::kInvalidArgument, "dtw needs --severity-map or --severity");
      }
      std::map<std::string, Severity> severity_of;
      if (!d_map.empty()) severity_of = load_severity_map(d_map);
      std::optional<Severity> fallback;
      if (!d_severity.empty()) {
        fallback = parse_severity(d_severity);
        if (!fallback || *fallback == Severity::kNone) {
          throw Error(ErrorKind::kInvalidArgument, "bad --severity '" + d_severity + "'");
        }
      }
      const auto normal = load_wav_dir(d_normal);
      std::map<Severity, std::vector<LabeledAudio>> graded;
      for (auto& u : load_wav_dir(d_graded)) {
        const auto it = severity_of.find(u.id);
        if (it == severity_of.end() && !fallback) {
          throw Error(ErrorKind::kParse, "no severity for graded file '" + u.id + "'");
        }
        graded[it == severity_of.end() ? *fallback : it->second].push_back(std::move(u));
      }
      StudyOptions opts;
      d_spec.window = parse_window(d_window);
      opts.spec = d_spec;
      opts.metric = d_metric == "cosine" ? LocalMetric::kCosine : LocalMetric::kEuclidean;
      opts.scale = d_scale == "linear" ? FeatureScale::kMagnitude : FeatureScale::kLogMagnitude;
      opts.threshold_fraction = d_threshold;
      opts.jobs = jobs;
      const auto study = severity_distance_study(normal, graded, opts);
      emit(d_out, [&](std::ostream& os) { write_distance_study(os, study); });
      if (!study.skipped_ids.empty()) {
        std::cerr << "skipped " << study.skipped_ids.size()
                  << " utterance(s) without voiced frames\n";
      }
      return 0;
    }

    if (*simulate) {
      const auto manifest = load_manifest(m_manifest, manifest_format(m_format));
      std::ifstream pin(m_profile, std::ios::binary);
      if (!pin) throw Error(ErrorKind::kIo, "cannot open profile '" + m_profile + "'");
      auto profile = parse_profile_json(pin);
      profile.seed = resolve_seed(m_seed_opt, m_seed, profile.seed);
      const auto hyps = simulate_hypotheses(manifest.records, profile);
      emit(m_out, [&](std::ostream& os) { write_hypotheses(os, hyps); });
      return 0;
    }

    if (*report) {
      ResultTable table;
      if (!r_table.empty()) {
        std::ifstream tin(r_table, std::ios::binary);
        if (!tin) throw Error(ErrorKind::kIo, "cannot open table '" + r_table + "'");
        table = load_result_rows(tin, parse_weight_list(r_weights));
      } else if (!r_plans.empty() && !r_manifest.empty()) {
        const auto manifest = load_manifest(r_manifest, manifest_format(r_format));
        ScoreOptions opts;
        opts.jobs = jobs;
        for (const auto& plan : load_plans(r_plans)) {
          if (!plan.hypotheses) {
            throw Error(ErrorKind::kInvalidArgument,
                        "plan '" + plan.plan_id + "' names no hypotheses");
          }
          table.rows.push_back(
              run_experiment(plan, manifest, load_hypotheses(*plan.hypotheses), opts));
        }
      } else {
        throw Error(ErrorKind::kInvalidArgument, "report needs --table or --manifest with --plans");
      }
      if (table.rows.empty()) throw Error(ErrorKind::kInvalidArgument, "no result rows");
      const FairnessWeights chart_weights =
          r_chart_weights.empty()
              ? (table.rows.front().weights.empty() ? FairnessWeights{}
                                                    : table.rows.front().weights.front())
              : single_weight(r_chart_weights);
      const fs::path dir(r_out_dir);
      std::error_code ec;
      fs::create_directories(dir, ec);
      if (ec) throw Error(ErrorKind::kIo, "cannot create '" + dir.string() + "'");
      write_text(dir / "report.csv", emit_report(table, ReportFormat::kDelimited));
      write_text(dir / "report.md", emit_report(table, ReportFormat::kMarkdownTable));
      write_text(dir / "fs_chart.svg", emit_fs_chart(table, chart_weights));
      std::cout << emit_report(table, ReportFormat::kMarkdownTable);
      return 0;
    }
  } catch (const Error& e) {
    std::cerr << "asrfair: " << e.what() << '\n';
    return exit_code(e.kind());
  } catch (const std::exception& e) {
    std::cerr << "asrfair: " << e.what() << '\n';
    return kExitInputError;
  }
  return 0;
}
