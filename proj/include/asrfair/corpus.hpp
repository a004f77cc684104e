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

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "asrfair/types.hpp"

namespace asrfair {

struct UtteranceRecord {
  std::string utterance_id;
  std::string speaker_id;
  std::string dataset_id;
  Group group = Group::kNormal;
  Severity severity = Severity::kNone;
  std::vector<std::string> reference_words;
  std::optional<std::vector<std::string>> reference_phonemes;
  std::optional<std::string> audio_path;
  std::optional<Partition> partition;

  std::optional<Category> category() const {
    return category_of(group, severity);
  }

  bool operator==(const UtteranceRecord&) const = default;
};

struct CorpusManifest {
  std::string dataset_id;
  std::vector<UtteranceRecord> records;

  bool operator==(const CorpusManifest&) const = default;
};

enum class ManifestFormat {
  kDelimitedRows,  // CSV with the fixed header row
  kRecordPerLine,  // one JSON object per line
};

struct LoadOptions {
  // When false, rows are parsed structurally but invariant violations
  // (duplicate ids, group/severity mismatch, empty reference) are kept for
  // validate_manifest to report.
  bool strict = true;
};

CorpusManifest load_manifest(std::istream& in, ManifestFormat format,
                             const LoadOptions& options = {});
CorpusManifest load_manifest(const std::filesystem::path& path,
                             std::optional<ManifestFormat> format = std::nullopt,
                             const LoadOptions& options = {});

// .jsonl / .ndjson / .json select RecordPerLine, anything else DelimitedRows.
ManifestFormat infer_manifest_format(const std::filesystem::path& path);

// The partition column is emitted only if at least one record has one.
void write_manifest(std::ostream& out, const CorpusManifest& manifest,
                    ManifestFormat format);

struct Violation {
  std::size_t record_index = 0;
  std::string utterance_id;
  std::string message;
};

struct ValidationReport {
  std::size_t record_count = 0;
  std::map<std::pair<Group, Severity>, std::size_t> by_group_severity;
  // Records without a partition are counted under nullopt.
  std::map<std::optional<Partition>, std::size_t> by_partition;
  std::vector<Violation> violations;

  std::size_t count(Group g, Severity s) const;
  std::size_t count(Group g) const;
  bool ok() const { return violations.empty(); }
};

ValidationReport validate_manifest(const CorpusManifest& manifest);
void print_validation_report(std::ostream& out, const ValidationReport& report);

struct SplitSpec {
  double test_fraction = 0.2;
  double dev_fraction_of_train = 0.2;
  std::uint64_t seed = 0;
  bool speaker_disjoint = false;
};

// Returns a copy of the manifest with every record's partition assigned.
// Records are ordered by utterance_id before the seeded shuffle, so the
// assignment depends on the record set and the split settings, not on row order.
CorpusManifest split_corpus(const CorpusManifest& manifest,
                            const SplitSpec& spec);

// Train-partition records whose category is in the composition, in manifest
// order.
std::vector<UtteranceRecord> select_training_composition(
    const CorpusManifest& manifest, const std::set<Category>& composition);

// Records of one partition, in manifest order.
std::vector<UtteranceRecord> select_partition(const CorpusManifest& manifest,
                                              Partition partition);

}  // namespace asrfair
