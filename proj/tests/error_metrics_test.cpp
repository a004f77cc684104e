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

#include <gtest/gtest.h>

#include <random>

#include "asrfair/delimited.hpp"
#include "asrfair/error.hpp"
#include "fixtures.hpp"
#include "oracles.hpp"

namespace asrfair {
namespace {

using Tokens = std::vector<std::string>;

Tokens tok(std::initializer_list<const char*> words) {
  return Tokens(words.begin(), words.end());
}

TEST(AlignTokens, Identity) {
  const auto out = align_tokens(tok({"a", "b", "c"}), tok({"a", "b", "c"}));
  EXPECT_EQ(out.substitutions, 0u);
  EXPECT_EQ(out.deletions, 0u);
  EXPECT_EQ(out.insertions, 0u);
  EXPECT_EQ(out.hits, 3u);
  EXPECT_EQ(error_rate(out), 0.0);
}

TEST(AlignTokens, SubstitutionAndInsertionAgreeWithExhaustiveSearch) {
  const Tokens ref = tok({"a", "b", "c"});
  const Tokens hyp = tok({"a", "x", "c", "d"});
  const auto [cost, splits] = testing::exhaustive_edit_search(ref, hyp);
  ASSERT_EQ(cost, 2u);
  ASSERT_EQ(splits.size(), 1u);
  const auto out = align_tokens(ref, hyp);
  EXPECT_EQ(out.substitutions, splits.begin()->subs);
  EXPECT_EQ(out.deletions, splits.begin()->dels);
  EXPECT_EQ(out.insertions, splits.begin()->ins);
  EXPECT_EQ(out.substitutions, 1u);
  EXPECT_EQ(out.insertions, 1u);
  EXPECT_NEAR(error_rate(out), 66.67, 0.005);
  const std::vector<AlignmentStep> trace = {
      {EditOp::kHit, "a", "a"},
      {EditOp::kSubstitution, "b", "x"},
      {EditOp::kHit, "c", "c"},
      {EditOp::kInsertion, std::nullopt, "d"}};
  EXPECT_EQ(out.trace, trace);
}

TEST(AlignTokens, EmptyHypothesisIsAllDeletions) {
  const auto out = align_tokens(tok({"a", "b"}), Tokens{});
  EXPECT_EQ(out.deletions, 2u);
  EXPECT_EQ(out.substitutions, 0u);
  EXPECT_EQ(out.insertions, 0u);
  EXPECT_EQ(error_rate(out), 100.0);
}

TEST(AlignTokens, EmptyReferenceIsRejected) {
  try {
    align_tokens(Tokens{}, tok({"a"}));
    FAIL();
  } catch (const Error& e) {
    EXPECT_NE(std::string(e.what()).find("undefined error rate denominator"),
              std::string::npos);
  }
  EXPECT_THROW(error_rate(AlignmentOutcome{}), Error);
}

TEST(AlignTokens, TieBreakPrefersSubstitutionOverDeletionAndInsertion) {
  // [a] vs [b]: S (cost 1) beats D+I (cost 2); [a b] vs [b a] has several
  // cost-2 paths, and the backtrace takes the substitutions.
  const auto out = align_tokens(tok({"a", "b"}), tok({"b", "a"}));
  EXPECT_EQ(out.substitutions, 2u);
  EXPECT_EQ(out.deletions + out.insertions, 0u);
}

TEST(ErrorRate, InsertionHeavyOutputExceedsHundred) {
  const auto out = align_tokens(tok({"a"}), tok({"x", "y", "z"}));
  EXPECT_DOUBLE_EQ(error_rate(out), 300.0);
}

Tokens random_tokens(std::mt19937_64& gen, std::size_t max_len, bool allow_empty) {
  const std::size_t len = gen() % (max_len + 1);
  Tokens t;
  for (std::size_t i = 0; i < len; ++i) t.push_back(std::string(1, "abcd"[gen() % 4]));
  if (t.empty() && !allow_empty) t.push_back("a");
  return t;
}

TEST(AlignTokensProperty, CostEqualsExhaustiveSearch) {
  std::mt19937_64 gen(20260101);
  for (int trial = 0; trial < 300; ++trial) {
    const Tokens ref = random_tokens(gen, 7, false);
    const Tokens hyp = random_tokens(gen, 7, true);
    const auto out = align_tokens(ref, hyp);
    const auto [cost, splits] = testing::exhaustive_edit_search(ref, hyp);
    ASSERT_EQ(out.errors(), cost);
    EXPECT_TRUE(splits.contains({cost, out.substitutions, out.deletions, out.insertions}));
    EXPECT_EQ(out.hits + out.substitutions + out.deletions, out.ref_len);
  }
}

TEST(AlignTokensProperty, SwapDuality) {
  std::mt19937_64 gen(99);
  for (int trial = 0; trial < 300; ++trial) {
    const Tokens a = random_tokens(gen, 8, false);
    const Tokens b = random_tokens(gen, 8, false);
    const auto ab = align_tokens(a, b);
    const auto ba = align_tokens(b, a);
    EXPECT_EQ(ab.errors(), ba.errors());
    // The counts of any single minimal alignment swap roles exactly; the
    // tie-break may pick different paths, so compare against the oracle set.
    const auto [cost, splits] = testing::exhaustive_edit_search(b, a);
    EXPECT_TRUE(splits.contains({cost, ab.substitutions, ab.insertions, ab.deletions}));
  }
}

TEST(AlignTokensProperty, AppendingUnmatchedTokenCostsAtMostOne) {
  std::mt19937_64 gen(5);
  for (int trial = 0; trial < 300; ++trial) {
    const Tokens ref = random_tokens(gen, 8, false);
    Tokens hyp = random_tokens(gen, 8, true);
    const auto before = align_tokens(ref, hyp).errors();
    hyp.push_back("zzz");
    const auto after = align_tokens(ref, hyp).errors();
    EXPECT_LE(after, before + 1);
    EXPECT_GE(after + 1, before);
  }
}

TEST(MacroPooledWer, PublishedCells) {
  EXPECT_NEAR(macro_pooled_wer(2.39, 42.89), 22.64, 0.01);
  EXPECT_NEAR(macro_pooled_wer(7.33, 49.57), 28.45, 0.01);
  EXPECT_DOUBLE_EQ(macro_pooled_wer(12.5, 12.5), 12.5);
}

TEST(MacroPooledWer, BoundedByInputs) {
  std::mt19937_64 gen(3);
  std::uniform_real_distribution<double> u(0.0, 150.0);
  for (int i = 0; i < 1000; ++i) {
    const double a = u(gen), b = u(gen);
    const double p = macro_pooled_wer(a, b);
    EXPECT_LE(std::min(a, b), p);
    EXPECT_LE(p, std::max(a, b));
  }
}

UtteranceRecord rec(const std::string& id, Group g, Severity s, const char* words) {
  UtteranceRecord r;
  r.utterance_id = id;
  r.speaker_id = "spk";
  r.dataset_id = "T";
  r.group = g;
  r.severity = s;
  r.reference_words = split_whitespace(words);
  return r;
}

TEST(ScoreTestset, PerfectHypothesesScoreZero) {
  const auto m = testing::make_manifest({10, 5, 5, 5}, 4);
  HypothesisSet hyps;
  for (const auto& r : m.records) hyps.entries[r.utterance_id] = r.reference_words;
  const auto report = score_testset(m.records, hyps);
  EXPECT_EQ(report.w_normal(), 0.0);
  EXPECT_EQ(report.w_clp(), 0.0);
  for (const Severity s : kClpSeverities) {
    EXPECT_EQ(report.by_severity.at(s).error_percent, 0.0);
  }
  EXPECT_EQ(report.pooled_macro(), 0.0);
  EXPECT_EQ(report.pooled_micro(), 0.0);
}

TEST(ScoreTestset, ElevenMissingOfTwoHundredNineExcluded) {
  std::vector<UtteranceRecord> refs;
  HypothesisSet hyps;
  for (int i = 0; i < 209; ++i) {
    refs.push_back(rec("c" + std::to_string(i), Group::kClp, Severity::kMild, "alpha beta"));
    if (i % 19 != 0) hyps.entries[refs.back().utterance_id] = {"alpha", "gamma"};
  }
  ASSERT_EQ(hyps.entries.size(), 198u);

  const auto excluded = score_testset(refs, hyps, {MissingPolicy::kExclude});
  const auto& clp = excluded.by_group.at(Group::kClp);
  EXPECT_EQ(clp.n_missing_hypotheses, 11u);
  EXPECT_EQ(clp.n_utterances, 198u);
  EXPECT_EQ(clp.components.ref_len, 396u);
  EXPECT_DOUBLE_EQ(*clp.error_percent, 50.0);

  const auto empty = score_testset(refs, hyps, {MissingPolicy::kScoreAsEmpty});
  const auto& clp2 = empty.by_group.at(Group::kClp);
  EXPECT_EQ(clp2.n_missing_hypotheses, 11u);
  EXPECT_EQ(clp2.n_utterances, 209u);
  EXPECT_EQ(clp2.components.deletions, 22u);
  EXPECT_DOUBLE_EQ(*clp2.error_percent, 100.0 * (198 + 22) / 418.0);
}

TEST(ScoreTestset, TwoGroupToyMatchesHandPooling) {
  const std::vector<UtteranceRecord> refs = {
      rec("n1", Group::kNormal, Severity::kNone, "a b c"),
      rec("n2", Group::kNormal, Severity::kNone, "the cat sat"),
      rec("c1", Group::kClp, Severity::kMild, "a b c d"),
      rec("c2", Group::kClp, Severity::kSevere, "x y"),
  };
  HypothesisSet hyps;
  hyps.entries = {{"n1", tok({"a", "x", "c", "d"})},
                  {"n2", tok({"the", "cat", "sat"})},
                  {"c1", tok({"a", "c", "d"})},
                  {"c2", tok({"p", "q", "r", "s"})}};
  // Oracle: per-utterance exhaustive minimal cost, pooled by hand.
  auto cost = [&](std::size_t i) {
    return testing::exhaustive_edit_search(refs[i].reference_words,
                                           hyps.entries.at(refs[i].utterance_id))
        .first;
  };
  const double normal = 100.0 * (cost(0) + cost(1)) / 6.0;
  const double clp = 100.0 * (cost(2) + cost(3)) / 6.0;
  const double mild = 100.0 * cost(2) / 4.0;
  const double severe = 100.0 * cost(3) / 2.0;

  const auto report = score_testset(refs, hyps);
  EXPECT_DOUBLE_EQ(*report.w_normal(), normal);
  EXPECT_DOUBLE_EQ(*report.w_clp(), clp);
  EXPECT_DOUBLE_EQ(*report.by_severity.at(Severity::kMild).error_percent, mild);
  EXPECT_DOUBLE_EQ(*report.by_severity.at(Severity::kSevere).error_percent, severe);
  EXPECT_FALSE(report.by_severity.contains(Severity::kModerate));
  EXPECT_DOUBLE_EQ(*report.pooled_macro(), (normal + clp) / 2.0);
  EXPECT_DOUBLE_EQ(*report.pooled_micro(), 100.0 * (cost(0) + cost(1) + cost(2) + cost(3)) / 12.0);
  EXPECT_EQ(report.by_severity.at(Severity::kSevere).components.insertions, 2u);
}

TEST(ScoreTestset, NormalizationLowercasesAndStripsPunctuation) {
  const std::vector<UtteranceRecord> refs = {
      rec("u", Group::kNormal, Severity::kNone, "Hello world")};
  HypothesisSet hyps;
  hyps.entries["u"] = tok({"hello,", "WORLD.", "!"});
  EXPECT_EQ(*score_testset(refs, hyps).w_normal(), 0.0);
  ScoreOptions raw;
  raw.normalize = false;
  EXPECT_DOUBLE_EQ(*score_testset(refs, hyps, raw).w_normal(), 150.0);
}

TEST(ScoreTestset, PhonemeLevel) {
  auto r = rec("u", Group::kClp, Severity::kModerate, "kage");
  HypothesisSet hyps;
  hyps.entries["u"] = tok({"k", "a", "g"});
  ScoreOptions phoneme;
  phoneme.level = TokenLevel::kPhoneme;
  try {
    score_testset(std::vector{r}, hyps, phoneme);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kUnavailable);
    EXPECT_NE(std::string(e.what()).find("PER unavailable"), std::string::npos);
  }
  r.reference_phonemes = tok({"k", "a", "g", "e"});
  const auto report = score_testset(std::vector{r}, hyps, phoneme);
  EXPECT_DOUBLE_EQ(*report.w_clp(), 25.0);
  EXPECT_FALSE(report.w_normal());
}

TEST(ScoreTestset, UnmatchedHypothesesAreCounted) {
  const std::vector<UtteranceRecord> refs = {rec("u", Group::kNormal, Severity::kNone, "a")};
  HypothesisSet hyps;
  hyps.entries = {{"u", tok({"a"})}, {"other", tok({"b"})}};
  EXPECT_EQ(score_testset(refs, hyps).n_unmatched_hypotheses, 1u);
}

TEST(ScoreTestset, IndependentOfOrderAndParallelism) {
  auto m = testing::make_manifest({60, 30, 30, 30}, 6);
  std::mt19937_64 gen(11);
  HypothesisSet hyps;
  for (const auto& r : m.records) {
    if (gen() % 10 == 0) continue;
    auto h = r.reference_words;
    if (gen() % 2) h[gen() % h.size()] = "zz";
    if (gen() % 3 == 0) h.push_back("extra");
    if (gen() % 4 == 0) h.erase(h.begin());
    hyps.entries[r.utterance_id] = h;
  }
  const auto serial = score_testset(m.records, hyps);
  ScoreOptions parallel;
  parallel.jobs = 8;
  EXPECT_EQ(score_testset(m.records, hyps, parallel), serial);
  std::shuffle(m.records.begin(), m.records.end(), gen);
  EXPECT_EQ(score_testset(m.records, hyps, parallel), serial);
}

}  // namespace

}  // namespace asrfair
