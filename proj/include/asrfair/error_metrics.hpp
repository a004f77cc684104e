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

#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "asrfair/corpus.hpp"
#include "asrfair/hypotheses.hpp"
#include "asrfair/types.hpp"

namespace asrfair {

enum class EditOp { kHit, kSubstitution, kDeletion, kInsertion };

struct AlignmentStep {
  EditOp op;
  std::optional<std::string> ref_token;
  std::optional<std::string> hyp_token;

  bool operator==(const AlignmentStep&) const = default;
};

struct AlignmentOutcome {
  std::size_t substitutions = 0;
  std::size_t deletions = 0;
  std::size_t insertions = 0;
  std::size_t hits = 0;
  std::size_t ref_len = 0;
  std::vector<AlignmentStep> trace;

  std::size_t errors() const { return substitutions + deletions + insertions; }
};

// Minimal unit-cost alignment. Among equal-cost backtraces the step order is
// hit/substitution, then deletion, then insertion. Throws kInvalidArgument
// for an empty reference.
AlignmentOutcome align_tokens(std::span<const std::string> reference,
                              std::span<const std::string> hypothesis);

// 100 * (S + D + I) / ref_len; may exceed 100.
double error_rate(const AlignmentOutcome& outcome);

struct ErrorCounts {
  std::size_t substitutions = 0;
  std::size_t deletions = 0;
  std::size_t insertions = 0;
  std::size_t hits = 0;
  std::size_t ref_len = 0;

  ErrorCounts& operator+=(const ErrorCounts& other);
  ErrorCounts& operator+=(const AlignmentOutcome& outcome);
  std::size_t errors() const { return substitutions + deletions + insertions; }
  bool operator==(const ErrorCounts&) const = default;
};

struct ErrorRateReport {
  // Empty when no reference tokens were scored.
  std::optional<double> error_percent;
  ErrorCounts components;
  std::size_t n_utterances = 0;  // scored
  std::size_t n_missing_hypotheses = 0;

  bool operator==(const ErrorRateReport&) const = default;
};

enum class MissingPolicy { kExclude, kScoreAsEmpty };
enum class TokenLevel { kWord, kPhoneme };

struct ScoreOptions {
  MissingPolicy missing = MissingPolicy::kExclude;
  TokenLevel level = TokenLevel::kWord;
  // Lowercase ASCII letters and strip trailing punctuation from every token
  // of both sides; tokens left empty are dropped.
  bool normalize = true;
  unsigned jobs = 1;  // 0 = all cores
};

struct GroupErrorReport {
  std::map<Group, ErrorRateReport> by_group;
  std::map<Severity, ErrorRateReport> by_severity;
  ErrorRateReport overall;
  std::size_t n_unmatched_hypotheses = 0;

  std::optional<double> w_normal() const;
  std::optional<double> w_clp() const;
  // Unweighted mean of W_N and W_C (the tables' "Pooled WER").
  std::optional<double> pooled_macro() const;
  // Corpus-level rate over both groups.
  std::optional<double> pooled_micro() const { return overall.error_percent; }

  bool operator==(const GroupErrorReport&) const = default;
};

// Corpus-level rates per group and per severity (counts summed, then
// divided). Throws kUnavailable ("PER unavailable") when phoneme level is
// requested and a record lacks reference phonemes.
GroupErrorReport score_testset(std::span<const UtteranceRecord> references,
                               const HypothesisSet& hypotheses,
                               const ScoreOptions& options = {});

// (w_a + w_b) / 2.
double macro_pooled_wer(double w_a, double w_b);

std::vector<std::string> normalize_tokens(std::span<const std::string> tokens);

}  // namespace asrfair
