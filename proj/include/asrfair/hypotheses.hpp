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
#include <span>
#include <string>
#include <vector>

#include "asrfair/corpus.hpp"
#include "asrfair/types.hpp"

namespace asrfair {

enum class Provenance { kExternal, kSimulated };

// ASR output keyed by utterance id. An entry with an empty token sequence
// (the system produced empty text) is distinct from an absent entry (the
// system produced nothing at all).
struct HypothesisSet {
  std::map<std::string, std::vector<std::string>> entries;
  Provenance provenance = Provenance::kExternal;

  const std::vector<std::string>* find(const std::string& id) const {
    const auto it = entries.find(id);
    return it == entries.end() ? nullptr : &it->second;
  }
  bool operator==(const HypothesisSet&) const = default;
};

enum class HypothesisFormat {
  kDelimitedRows,  // utterance_id,text (optional header row)
  kDirectory,      // <utterance_id>.txt per utterance
};

HypothesisSet load_hypotheses(std::istream& in);
// Directories load as kDirectory, files as kDelimitedRows.
HypothesisSet load_hypotheses(const std::filesystem::path& path);
void write_hypotheses(std::ostream& out, const HypothesisSet& set);

struct ErrorProbabilities {
  double substitution = 0.0;
  double deletion = 0.0;
  double insertion = 0.0;
};

struct CorruptionProfile {
  // Keyed by severity; Normal utterances use the kNone row. Missing rows
  // mean no corruption.
  std::map<Severity, ErrorProbabilities> rates;
  std::vector<std::string> vocabulary;
  std::uint64_t seed = 0;
};

// Throws kInvalidArgument for probabilities outside [0,1], sub+del > 1 or an
// empty vocabulary.
void validate_profile(const CorruptionProfile& profile);

// Per reference token: delete with p_del, else substitute with p_sub by a
// uniform draw from the vocabulary minus the token, else keep; then insert a
// uniform vocabulary token with p_ins. Each utterance draws from its own
// stream seeded by (profile.seed, utterance_id), so output is independent of
// record order.
HypothesisSet simulate_hypotheses(std::span<const UtteranceRecord> records,
                                  const CorruptionProfile& profile);

// Profile document: {"seed": n, "vocabulary": [...], "rates": {"none":
// {"sub": p, "del": p, "ins": p}, "mild": {...}, ...}}.
CorruptionProfile parse_profile_json(std::istream& in);

}  // namespace asrfair
