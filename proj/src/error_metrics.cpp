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

#include "asrfair/error_metrics.hpp"

#include <algorithm>
#include <cctype>
#include <cstdint>
#include <unordered_set>

#include "asrfair/delimited.hpp"
#include "asrfair/error.hpp"
#include "asrfair/parallel.hpp"

namespace asrfair {

AlignmentOutcome align_tokens(std::span<const std::string> reference,
                              std::span<const std::string> hypothesis) {
  if (reference.empty()) {
    throw Error(ErrorKind::kInvalidArgument,
                "undefined error rate denominator: empty reference");
  }
  const std::size_t n = reference.size();
  const std::size_t m = hypothesis.size();
  const std::size_t stride = m + 1;
  std::vector<std::uint32_t> cost((n + 1) * stride);
  auto at = [&](std::size_t i, std::size_t j) -> std::uint32_t& {
    return cost[i * stride + j];
  };
  for (std::size_t i = 0; i <= n; ++i) at(i, 0) = static_cast<std::uint32_t>(i);
  for (std::size_t j = 0; j <= m; ++j) at(0, j) = static_cast<std::uint32_t>(j);
  for (std::size_t i = 1; i <= n; ++i) {
    for (std::size_t j = 1; j <= m; ++j) {
      const std::uint32_t diag =
          at(i - 1, j - 1) + (reference[i - 1] == hypothesis[j - 1] ? 0u : 1u);
      at(i, j) = std::min({diag, at(i - 1, j) + 1, at(i, j - 1) + 1});
    }
  }

  AlignmentOutcome out;
  out.ref_len = n;
  std::size_t i = n;
  std::size_t j = m;
  while (i > 0 || j > 0) {
    if (i > 0 && j > 0) {
      const bool match = reference[i - 1] == hypothesis[j - 1];
      if (at(i, j) == at(i - 1, j - 1) + (match ? 0u : 1u)) {
        out.trace.push_back({match ? EditOp::kHit : EditOp::kSubstitution,
                             reference[i - 1], hypothesis[j - 1]});
        ++(match ? out.hits : out.substitutions);
        --i;
        --j;
        continue;
      }
    }
    if (i > 0 && at(i, j) == at(i - 1, j) + 1) {
      out.trace.push_back({EditOp::kDeletion, reference[i - 1], std::nullopt});
      ++out.deletions;
      --i;
    } else {
      out.trace.push_back({EditOp::kInsertion, std::nullopt, hypothesis[j - 1]});
      ++out.insertions;
      --j;
    }
  }
  std::reverse(out.trace.begin(), out.trace.end());
  return out;
}

double error_rate(const AlignmentOutcome& outcome) {
  if (outcome.ref_len == 0) {
    throw Error(ErrorKind::kInvalidArgument,
                "undefined error rate denominator: ref_len = 0");
  }
  return 100.0 * static_cast<double>(outcome.errors()) /
         static_cast<double>(outcome.ref_len);
}

ErrorCounts& ErrorCounts::operator+=(const ErrorCounts& other) {
  substitutions += other.substitutions;
  deletions += other.deletions;
  insertions += other.insertions;
  hits += other.hits;
  ref_len += other.ref_len;
  return *this;
}

ErrorCounts& ErrorCounts::operator+=(const AlignmentOutcome& outcome) {
  return *this += ErrorCounts{outcome.substitutions, outcome.deletions,
                              outcome.insertions, outcome.hits,
                              outcome.ref_len};
}

std::optional<double> GroupErrorReport::w_normal() const {
  const auto it = by_group.find(Group::kNormal);
  return it == by_group.end() ? std::nullopt : it->second.error_percent;
}

std::optional<double> GroupErrorReport::w_clp() const {
  const auto it = by_group.find(Group::kClp);
  return it == by_group.end() ? std::nullopt : it->second.error_percent;
}

std::optional<double> GroupErrorReport::pooled_macro() const {
  const auto wn = w_normal();
  const auto wc = w_clp();
  if (!wn || !wc) return std::nullopt;
  return macro_pooled_wer(*wn, *wc);
}

double macro_pooled_wer(double w_a, double w_b) { return (w_a + w_b) / 2.0; }

std::vector<std::string> normalize_tokens(std::span<const std::string> tokens) {
  std::vector<std::string> out;
  out.reserve(tokens.size());
  for (const auto& token : tokens) {
    std::string t = to_lower_ascii(token);
    while (!t.empty()) {
      const auto c = static_cast<unsigned char>(t.back());
      if (c >= 0x80 || !std::ispunct(c)) break;
      t.pop_back();
    }
    if (!t.empty()) out.push_back(std::move(t));
  }
  return out;
}

namespace {

struct UtteranceScore {
  bool missing = false;
  bool scored = false;
  ErrorCounts counts;
};

void accumulate(ErrorRateReport& report, const UtteranceScore& s) {
  if (s.missing) ++report.n_missing_hypotheses;
  if (!s.scored) return;
  ++report.n_utterances;
  report.components += s.counts;
}

void finalize(ErrorRateReport& report) {
  if (report.components.ref_len > 0) {
    report.error_percent = 100.0 *
                           static_cast<double>(report.components.errors()) /
                           static_cast<double>(report.components.ref_len);
  }
}

}  // namespace

GroupErrorReport score_testset(std::span<const UtteranceRecord> references,
                               const HypothesisSet& hypotheses,
                               const ScoreOptions& options) {
  const bool phoneme = options.level == TokenLevel::kPhoneme;
  if (phoneme) {
    for (const auto& r : references) {
      if (!r.reference_phonemes) {
        throw Error(ErrorKind::kUnavailable,
                    "PER unavailable: record '" + r.utterance_id +
                        "' has no reference phonemes");
      }
    }
  }
  // Phoneme inventories can be case-sensitive, so only words are normalized.
  const bool normalize = options.normalize && !phoneme;

  std::vector<UtteranceScore> scores(references.size());
  parallel_for(references.size(), options.jobs, [&](std::size_t i) {
    const auto& r = references[i];
    std::vector<std::string> ref =
        phoneme ? *r.reference_phonemes : r.reference_words;
    const auto* hyp = hypotheses.find(r.utterance_id);
    UtteranceScore& s = scores[i];
    s.missing = hyp == nullptr;
    if (s.missing && options.missing == MissingPolicy::kExclude) return;
    std::vector<std::string> hyp_tokens = hyp ? *hyp : std::vector<std::string>{};
    if (normalize) {
      ref = normalize_tokens(ref);
      hyp_tokens = normalize_tokens(hyp_tokens);
    }
    if (ref.empty()) {
      throw Error(ErrorKind::kInvalidArgument,
                  "undefined error rate denominator: empty reference for '" +
                      r.utterance_id + "'");
    }
    s.counts += align_tokens(ref, hyp_tokens);
    s.scored = true;
  });

  GroupErrorReport report;
  for (std::size_t i = 0; i < references.size(); ++i) {
    const auto& r = references[i];
    accumulate(report.by_group[r.group], scores[i]);
    accumulate(report.by_severity[r.severity], scores[i]);
    accumulate(report.overall, scores[i]);
  }
  for (auto& [g, rep] : report.by_group) finalize(rep);
  for (auto& [s, rep] : report.by_severity) finalize(rep);
  finalize(report.overall);

  std::unordered_set<std::string> ids;
  for (const auto& r : references) ids.insert(r.utterance_id);
  for (const auto& [id, tokens] : hypotheses.entries) {
    if (!ids.contains(id)) ++report.n_unmatched_hypotheses;
  }
  return report;
}

}  // namespace asrfair
