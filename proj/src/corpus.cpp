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

#include "asrfair/corpus.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <numeric>
#include <ostream>
#include <unordered_set>

#include "asrfair/delimited.hpp"
#include "asrfair/error.hpp"
#include "asrfair/rng.hpp"
#include "json.hpp"

namespace asrfair {
namespace {

using nlohmann::json;

const std::vector<std::string> kManifestHeader = {
    "utterance_id", "speaker_id", "dataset_id", "group",
    "severity",     "words",      "phonemes",   "audio_path"};
constexpr std::string_view kPartitionColumn = "partition";

std::string row_prefix(std::size_t line) {
  return "row " + std::to_string(line) + ": ";
}

// Invariant checks shared by strict loading and validation. Returns the
// messages for one record, given the ids already seen.
std::vector<std::string> record_violations(
    const UtteranceRecord& r, const std::string& dataset_id,
    std::unordered_set<std::string>& seen_ids) {
  std::vector<std::string> out;
  if (r.utterance_id.empty()) out.emplace_back("empty utterance_id");
  if (!seen_ids.insert(r.utterance_id).second) {
    out.push_back("duplicate utterance_id '" + r.utterance_id + "'");
  }
  if (!r.category()) out.emplace_back("severity/group mismatch");
  if (r.reference_words.empty()) out.emplace_back("empty reference");
  if (r.dataset_id != dataset_id) {
    out.push_back("dataset_id '" + r.dataset_id + "' differs from '" +
                  dataset_id + "'");
  }
  return out;
}

void add_record(CorpusManifest& manifest, UtteranceRecord record,
                std::size_t line, const LoadOptions& options,
                std::unordered_set<std::string>& seen_ids) {
  if (manifest.records.empty()) manifest.dataset_id = record.dataset_id;
  if (options.strict) {
    const auto problems =
        record_violations(record, manifest.dataset_id, seen_ids);
    if (!problems.empty()) {
      throw Error(ErrorKind::kInvariant, row_prefix(line) + problems.front());
    }
  }
  manifest.records.push_back(std::move(record));
}

std::optional<std::vector<std::string>> optional_tokens(std::string_view text) {
  auto tokens = split_whitespace(text);
  if (tokens.empty()) return std::nullopt;
  return tokens;
}

std::optional<std::string> optional_text(std::string_view text) {
  text = trim(text);
  if (text.empty()) return std::nullopt;
  return std::string(text);
}

UtteranceRecord record_from_fields(const Row& row, bool has_partition,
                                   std::size_t line) {
  UtteranceRecord r;
  r.utterance_id = std::string(trim(row[0]));
  r.speaker_id = std::string(trim(row[1]));
  r.dataset_id = std::string(trim(row[2]));
  const auto group = parse_group(row[3]);
  if (!group) {
    throw Error(ErrorKind::kParse,
                row_prefix(line) + "unknown group literal '" + row[3] + "'");
  }
  const auto severity = parse_severity(row[4]);
  if (!severity) {
    throw Error(ErrorKind::kParse,
                row_prefix(line) + "unknown severity literal '" + row[4] + "'");
  }
  r.group = *group;
  r.severity = *severity;
  r.reference_words = split_whitespace(row[5]);
  r.reference_phonemes = optional_tokens(row[6]);
  r.audio_path = optional_text(row[7]);
  if (has_partition && !trim(row[8]).empty()) {
    const auto p = parse_partition(row[8]);
    if (!p) {
      throw Error(ErrorKind::kParse, row_prefix(line) +
                                         "unknown partition literal '" +
                                         row[8] + "'");
    }
    r.partition = *p;
  }
  return r;
}

CorpusManifest load_delimited(std::istream& in, const LoadOptions& options) {
  DelimitedReader reader(in);
  Row row;
  if (!reader.next(row)) return {};
  if (!row.empty() && row[0].starts_with("\xEF\xBB\xBF")) row[0].erase(0, 3);
  for (auto& field : row) field = to_lower_ascii(trim(field));
  bool has_partition = false;
  if (row.size() == kManifestHeader.size() + 1 &&
      row.back() == kPartitionColumn) {
    has_partition = true;
    row.pop_back();
  }
  if (row != kManifestHeader) {
    throw Error(ErrorKind::kParse,
                "row 1: expected header '" + join(kManifestHeader, ",") +
                    "[,partition]'");
  }
  const std::size_t width = kManifestHeader.size() + (has_partition ? 1 : 0);

  CorpusManifest manifest;
  std::unordered_set<std::string> seen;
  while (reader.next(row)) {
    if (row.size() == 1 && trim(row[0]).empty()) continue;
    if (row.size() != width) {
      throw Error(ErrorKind::kParse,
                  row_prefix(reader.line()) + "expected " +
                      std::to_string(width) + " fields, got " +
                      std::to_string(row.size()));
    }
    add_record(manifest, record_from_fields(row, has_partition, reader.line()),
               reader.line(), options, seen);
  }
  return manifest;
}

std::string json_string(const json& obj, const char* key, std::size_t line,
                        bool required) {
  const auto it = obj.find(key);
  if (it == obj.end() || it->is_null()) {
    if (required) {
      throw Error(ErrorKind::kParse,
                  row_prefix(line) + "missing field '" + key + "'");
    }
    return {};
  }
  if (!it->is_string()) {
    throw Error(ErrorKind::kParse,
                row_prefix(line) + "field '" + key + "' must be a string");
  }
  return it->get<std::string>();
}

std::vector<std::string> json_tokens(const json& obj, const char* key,
                                     std::size_t line) {
  const auto it = obj.find(key);
  if (it == obj.end() || it->is_null()) return {};
  if (it->is_string()) return split_whitespace(it->get<std::string>());
  if (it->is_array()) {
    std::vector<std::string> tokens;
    for (const auto& t : *it) {
      if (!t.is_string()) {
        throw Error(ErrorKind::kParse, row_prefix(line) + "field '" + key +
                                           "' must hold strings");
      }
      auto parts = split_whitespace(t.get<std::string>());
      tokens.insert(tokens.end(), parts.begin(), parts.end());
    }
    return tokens;
  }
  throw Error(ErrorKind::kParse, row_prefix(line) + "field '" + key +
                                     "' must be a string or array");
}

CorpusManifest load_record_per_line(std::istream& in,
                                    const LoadOptions& options) {
  CorpusManifest manifest;
  std::unordered_set<std::string> seen;
  std::string text;
  std::size_t line = 0;
  while (std::getline(in, text)) {
    ++line;
    if (trim(text).empty()) continue;
    json obj;
    try {
      obj = json::parse(text);
    } catch (const json::parse_error& e) {
      throw Error(ErrorKind::kParse, row_prefix(line) + e.what());
    }
    if (!obj.is_object()) {
      throw Error(ErrorKind::kParse, row_prefix(line) + "expected an object");
    }
    Row fields = {json_string(obj, "utterance_id", line, true),
                  json_string(obj, "speaker_id", line, true),
                  json_string(obj, "dataset_id", line, true),
                  json_string(obj, "group", line, true),
                  json_string(obj, "severity", line, true),
                  "",
                  "",
                  json_string(obj, "audio_path", line, false),
                  json_string(obj, "partition", line, false)};
    UtteranceRecord r = record_from_fields(fields, true, line);
    r.reference_words = json_tokens(obj, "words", line);
    auto phonemes = json_tokens(obj, "phonemes", line);
    if (!phonemes.empty()) r.reference_phonemes = std::move(phonemes);
    add_record(manifest, std::move(r), line, options, seen);
  }
  return manifest;
}

}  // namespace

CorpusManifest load_manifest(std::istream& in, ManifestFormat format,
                             const LoadOptions& options) {
  return format == ManifestFormat::kDelimitedRows
             ? load_delimited(in, options)
             : load_record_per_line(in, options);
}

ManifestFormat infer_manifest_format(const std::filesystem::path& path) {
  const std::string ext = to_lower_ascii(path.extension().string());
  if (ext == ".jsonl" || ext == ".ndjson" || ext == ".json") {
    return ManifestFormat::kRecordPerLine;
  }
  return ManifestFormat::kDelimitedRows;
}

CorpusManifest load_manifest(const std::filesystem::path& path,
                             std::optional<ManifestFormat> format,
                             const LoadOptions& options) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw Error(ErrorKind::kIo, "cannot open manifest '" + path.string() + "'");
  }
  return load_manifest(in, format.value_or(infer_manifest_format(path)),
                       options);
}

void write_manifest(std::ostream& out, const CorpusManifest& manifest,
                    ManifestFormat format) {
  const bool with_partition =
      std::any_of(manifest.records.begin(), manifest.records.end(),
                  [](const UtteranceRecord& r) { return r.partition; });
  if (format == ManifestFormat::kRecordPerLine) {
    for (const auto& r : manifest.records) {
      json obj = {{"utterance_id", r.utterance_id},
                  {"speaker_id", r.speaker_id},
                  {"dataset_id", r.dataset_id},
                  {"group", to_string(r.group)},
                  {"severity", to_string(r.severity)},
                  {"words", join(r.reference_words, " ")}};
      obj["phonemes"] = r.reference_phonemes
                            ? json(join(*r.reference_phonemes, " "))
                            : json(nullptr);
      obj["audio_path"] = r.audio_path ? json(*r.audio_path) : json(nullptr);
      if (r.partition) obj["partition"] = to_string(*r.partition);
      out << obj.dump() << '\n';
    }
    return;
  }
  Row header = kManifestHeader;
  if (with_partition) header.emplace_back(kPartitionColumn);
  write_row(out, header);
  for (const auto& r : manifest.records) {
    out << quote_field(r.utterance_id) << ',' << quote_field(r.speaker_id)
        << ',' << quote_field(r.dataset_id) << ',' << to_string(r.group) << ','
        << to_string(r.severity) << ','
        << quote_always(join(r.reference_words, " ")) << ','
        << quote_always(r.reference_phonemes
                            ? join(*r.reference_phonemes, " ")
                            : std::string())
        << ',' << quote_field(r.audio_path.value_or(""));
    if (with_partition) {
      out << ',' << (r.partition ? to_string(*r.partition) : "");
    }
    out << '\n';
  }
}

std::size_t ValidationReport::count(Group g, Severity s) const {
  const auto it = by_group_severity.find({g, s});
  return it == by_group_severity.end() ? 0 : it->second;
}

std::size_t ValidationReport::count(Group g) const {
  std::size_t total = 0;
  for (const auto& [key, n] : by_group_severity) {
    if (key.first == g) total += n;
  }
  return total;
}

ValidationReport validate_manifest(const CorpusManifest& manifest) {
  ValidationReport report;
  report.record_count = manifest.records.size();
  std::unordered_set<std::string> seen;
  const std::string& dataset = manifest.records.empty()
                                   ? manifest.dataset_id
                                   : manifest.records.front().dataset_id;
  for (std::size_t i = 0; i < manifest.records.size(); ++i) {
    const auto& r = manifest.records[i];
    ++report.by_group_severity[{r.group, r.severity}];
    ++report.by_partition[r.partition];
    for (auto& message : record_violations(r, dataset, seen)) {
      report.violations.push_back({i, r.utterance_id, std::move(message)});
    }
  }
  return report;
}

void print_validation_report(std::ostream& out,
                             const ValidationReport& report) {
  out << "records: " << report.record_count << '\n';
  out << "normal: " << report.count(Group::kNormal) << '\n';
  out << "clp: " << report.count(Group::kClp) << '\n';
  for (const auto& [key, n] : report.by_group_severity) {
    out << "  " << to_string(key.first) << '/' << to_string(key.second) << ": "
        << n << '\n';
  }
  for (const auto& [partition, n] : report.by_partition) {
    out << "partition " << (partition ? to_string(*partition) : "unassigned")
        << ": " << n << '\n';
  }
  out << "violations: " << report.violations.size() << '\n';
  for (const auto& v : report.violations) {
    out << "  record " << v.record_index + 1 << " (" << v.utterance_id
        << "): " << v.message << '\n';
  }
}

namespace {

void check_fraction(double f, const char* name) {
  if (!(f >= 0.0 && f <= 1.0)) {
    throw Error(ErrorKind::kInvalidArgument,
                std::string(name) + " must lie in [0, 1]");
  }
}

template <typename T>
void seeded_shuffle(std::vector<T>& items, std::uint64_t seed) {
  PortableRng rng(seed);
  for (std::size_t i = items.size(); i > 1; --i) {
    const std::size_t j = rng.below(i);
    std::swap(items[i - 1], items[j]);
  }
}

std::size_t rounded_count(std::size_t n, double fraction) {
  return static_cast<std::size_t>(std::llround(static_cast<double>(n) * fraction));
}

// Takes the group if it moves the running count strictly closer to target.
bool improves(std::size_t current, std::size_t add, std::size_t target) {
  const auto gap = [target](std::size_t v) {
    return v > target ? v - target : target - v;
  };
  return gap(current + add) < gap(current);
}

}  // namespace

CorpusManifest split_corpus(const CorpusManifest& manifest,
                            const SplitSpec& spec) {
  check_fraction(spec.test_fraction, "test_fraction");
  check_fraction(spec.dev_fraction_of_train, "dev_fraction_of_train");

  CorpusManifest out = manifest;
  auto& records = out.records;
  const std::size_t n = records.size();

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return records[a].utterance_id < records[b].utterance_id;
  });

  const std::size_t n_eval = rounded_count(n, spec.test_fraction);
  const std::size_t n_dev = rounded_count(n - n_eval, spec.dev_fraction_of_train);

  if (!spec.speaker_disjoint) {
    seeded_shuffle(order, spec.seed);
    for (std::size_t k = 0; k < n; ++k) {
      Partition p = Partition::kTrain;
      if (k < n_eval) {
        p = Partition::kEval;
      } else if (k < n_eval + n_dev) {
        p = Partition::kDev;
      }
      records[order[k]].partition = p;
    }
    return out;
  }

  std::map<std::string, std::vector<std::size_t>> by_speaker;
  for (const std::size_t i : order) by_speaker[records[i].speaker_id].push_back(i);
  const double capacity = (1.0 - spec.test_fraction) * static_cast<double>(n);
  std::vector<std::string> speakers;
  for (const auto& [speaker, members] : by_speaker) {
    if (static_cast<double>(members.size()) > capacity) {
      throw Error(ErrorKind::kInfeasible,
                  "infeasible split: speaker '" + speaker + "' holds " +
                      std::to_string(members.size()) + " of " +
                      std::to_string(n) + " utterances");
    }
    speakers.push_back(speaker);
  }
  seeded_shuffle(speakers, spec.seed);

  std::size_t eval_count = 0;
  std::size_t dev_count = 0;
  for (const auto& speaker : speakers) {
    const auto& members = by_speaker[speaker];
    Partition p = Partition::kTrain;
    if (improves(eval_count, members.size(), n_eval)) {
      p = Partition::kEval;
      eval_count += members.size();
    } else if (improves(dev_count, members.size(), n_dev)) {
      p = Partition::kDev;
      dev_count += members.size();
    }
    for (const std::size_t i : members) records[i].partition = p;
  }
  return out;
}

std::vector<UtteranceRecord> select_training_composition(
    const CorpusManifest& manifest, const std::set<Category>& composition) {
  if (composition.empty()) {
    throw Error(ErrorKind::kInvalidArgument, "empty training composition");
  }
  std::vector<UtteranceRecord> out;
  for (const auto& r : manifest.records) {
    if (!r.partition) {
      throw Error(ErrorKind::kInvalidArgument,
                  "manifest is not partitioned (record '" + r.utterance_id +
                      "')");
    }
    const auto c = r.category();
    if (*r.partition == Partition::kTrain && c && composition.contains(*c)) {
      out.push_back(r);
    }
  }
  return out;
}

std::vector<UtteranceRecord> select_partition(const CorpusManifest& manifest,
                                              Partition partition) {
  std::vector<UtteranceRecord> out;
  for (const auto& r : manifest.records) {
    if (r.partition == partition) out.push_back(r);
  }
  return out;
}

}  // namespace asrfair
