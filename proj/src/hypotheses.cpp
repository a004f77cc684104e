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

#include "asrfair/hypotheses.hpp"

#include <algorithm>
#include <fstream>
#include <istream>
#include <iterator>
#include <ostream>

#include "asrfair/delimited.hpp"
#include "asrfair/error.hpp"
#include "asrfair/rng.hpp"
#include "json.hpp"

namespace asrfair {
namespace {

void insert_unique(HypothesisSet& set, std::string id,
                   std::vector<std::string> tokens, std::size_t line) {
  if (id.empty()) {
    throw Error(ErrorKind::kParse,
                "row " + std::to_string(line) + ": empty utterance_id");
  }
  if (!set.entries.emplace(id, std::move(tokens)).second) {
    throw Error(ErrorKind::kInvariant, "row " + std::to_string(line) +
                                           ": duplicate utterance_id '" + id +
                                           "'");
  }
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::kIo, "cannot open '" + path.string() + "'");
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

}  // namespace

HypothesisSet load_hypotheses(std::istream& in) {
  HypothesisSet set;
  DelimitedReader reader(in);
  Row row;
  bool first = true;
  while (reader.next(row)) {
    if (first) {
      first = false;
      if (!row.empty() && row[0].starts_with("\xEF\xBB\xBF")) row[0].erase(0, 3);
      if (row.size() == 2 && to_lower_ascii(trim(row[0])) == "utterance_id" &&
          to_lower_ascii(trim(row[1])) == "text") {
        continue;
      }
    }
    if (row.size() == 1 && trim(row[0]).empty()) continue;
    if (row.size() != 2) {
      throw Error(ErrorKind::kParse, "row " + std::to_string(reader.line()) +
                                         ": expected 2 fields, got " +
                                         std::to_string(row.size()));
    }
    insert_unique(set, std::string(trim(row[0])), split_whitespace(row[1]),
                  reader.line());
  }
  return set;
}

HypothesisSet load_hypotheses(const std::filesystem::path& path) {
  std::error_code ec;
  if (std::filesystem::is_directory(path, ec)) {
    HypothesisSet set;
    std::vector<std::filesystem::path> files;
    for (const auto& entry : std::filesystem::directory_iterator(path)) {
      if (entry.is_regular_file() && entry.path().extension() == ".txt") {
        files.push_back(entry.path());
      }
    }
    std::sort(files.begin(), files.end());
    for (std::size_t i = 0; i < files.size(); ++i) {
      insert_unique(set, files[i].stem().string(),
                    split_whitespace(read_file(files[i])), i + 1);
    }
    return set;
  }
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw Error(ErrorKind::kIo,
                "cannot open hypotheses '" + path.string() + "'");
  }
  return load_hypotheses(in);
}

void write_hypotheses(std::ostream& out, const HypothesisSet& set) {
  out << "utterance_id,text\n";
  for (const auto& [id, tokens] : set.entries) {
    out << quote_field(id) << ',' << quote_always(join(tokens, " ")) << '\n';
  }
}

void validate_profile(const CorruptionProfile& profile) {
  auto in_unit = [](double p) { return p >= 0.0 && p <= 1.0; };
  for (const auto& [severity, r] : profile.rates) {
    if (!in_unit(r.substitution) || !in_unit(r.deletion) ||
        !in_unit(r.insertion)) {
      throw Error(ErrorKind::kInvalidArgument,
                  "corruption probabilities for '" +
                      std::string(to_string(severity)) +
                      "' must lie in [0, 1]");
    }
    if (r.substitution + r.deletion > 1.0) {
      throw Error(ErrorKind::kInvalidArgument,
                  "substitution + deletion probability exceeds 1 for '" +
                      std::string(to_string(severity)) + "'");
    }
  }
  if (profile.vocabulary.empty()) {
    throw Error(ErrorKind::kInvalidArgument, "empty corruption vocabulary");
  }
}

HypothesisSet simulate_hypotheses(std::span<const UtteranceRecord> records,
                                  const CorruptionProfile& profile) {
  validate_profile(profile);
  std::vector<std::string> vocab = profile.vocabulary;
  std::sort(vocab.begin(), vocab.end());
  vocab.erase(std::unique(vocab.begin(), vocab.end()), vocab.end());

  HypothesisSet set;
  set.provenance = Provenance::kSimulated;
  for (const auto& r : records) {
    const auto rate_it = profile.rates.find(r.severity);
    const ErrorProbabilities rates =
        rate_it == profile.rates.end() ? ErrorProbabilities{} : rate_it->second;
    PortableRng rng(profile.seed ^ stable_hash(r.utterance_id));
    std::vector<std::string> hyp;
    hyp.reserve(r.reference_words.size());
    for (const auto& token : r.reference_words) {
      const double u = rng.uniform();
      if (u < rates.deletion) {
        // dropped
      } else if (u < rates.deletion + rates.substitution) {
        const bool in_vocab = std::binary_search(vocab.begin(), vocab.end(), token);
        const std::size_t choices = vocab.size() - (in_vocab ? 1 : 0);
        if (choices == 0) {
          throw Error(ErrorKind::kInvalidArgument,
                      "vocabulary offers no substitute for '" + token + "'");
        }
        std::size_t k = rng.below(choices);
        if (in_vocab) {
          const auto self = static_cast<std::size_t>(
              std::lower_bound(vocab.begin(), vocab.end(), token) - vocab.begin());
          if (k >= self) ++k;
        }
        hyp.push_back(vocab[k]);
      } else {
        hyp.push_back(token);
      }
      if (rng.uniform() < rates.insertion) {
        hyp.push_back(vocab[rng.below(vocab.size())]);
      }
    }
    set.entries.emplace(r.utterance_id, std::move(hyp));
  }
  return set;
}

namespace {

double probability(const nlohmann::json& row, const char* short_key,
                   const char* long_key) {
  for (const char* key : {short_key, long_key}) {
    const auto it = row.find(key);
    if (it != row.end()) {
      if (!it->is_number()) {
        throw Error(ErrorKind::kParse,
                    std::string("profile field '") + key + "' must be a number");
      }
      return it->get<double>();
    }
  }
  return 0.0;
}

}  // namespace

CorruptionProfile parse_profile_json(std::istream& in) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(ErrorKind::kParse, std::string("profile: ") + e.what());
  }
  if (!doc.is_object()) {
    throw Error(ErrorKind::kParse, "profile: expected an object");
  }
  CorruptionProfile profile;
  if (const auto it = doc.find("seed"); it != doc.end()) {
    if (!it->is_number_unsigned()) {
      throw Error(ErrorKind::kParse, "profile: seed must be an unsigned integer");
    }
    profile.seed = it->get<std::uint64_t>();
  }
  if (const auto it = doc.find("vocabulary"); it != doc.end()) {
    if (!it->is_array()) {
      throw Error(ErrorKind::kParse, "profile: vocabulary must be an array");
    }
    for (const auto& token : *it) {
      if (!token.is_string()) {
        throw Error(ErrorKind::kParse, "profile: vocabulary must hold strings");
      }
      profile.vocabulary.push_back(token.get<std::string>());
    }
  }
  if (const auto it = doc.find("rates"); it != doc.end()) {
    if (!it->is_object()) {
      throw Error(ErrorKind::kParse, "profile: rates must be an object");
    }
    for (const auto& [name, row] : it->items()) {
      auto severity = parse_severity(name);
      if (!severity && to_lower_ascii(name) == "normal") severity = Severity::kNone;
      if (!severity || !row.is_object()) {
        throw Error(ErrorKind::kParse, "profile: bad rates entry '" + name + "'");
      }
      profile.rates[*severity] = {probability(row, "sub", "substitution"),
                                  probability(row, "del", "deletion"),
                                  probability(row, "ins", "insertion")};
    }
  }
  return profile;
}

}  // namespace asrfair
