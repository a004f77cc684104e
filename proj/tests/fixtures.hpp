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

#include <cmath>
#include <filesystem>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "asrfair/audio.hpp"
#include "asrfair/corpus.hpp"

namespace asrfair::testing {

struct CategoryCounts {
  std::size_t normal = 0;
  std::size_t mild = 0;
  std::size_t moderate = 0;
  std::size_t severe = 0;
};

// Synthetic manifest; each utterance gets words_per_utterance tokens drawn
// from w0..w49 and speakers cycle within each category.
inline CorpusManifest make_manifest(const CategoryCounts& counts,
                                    std::size_t words_per_utterance = 3,
                                    std::size_t speakers_per_category = 5,
                                    const std::string& dataset = "SYN",
                                    std::uint64_t seed = 7) {
  std::mt19937_64 gen(seed);
  CorpusManifest m;
  m.dataset_id = dataset;
  auto add = [&](std::size_t n, Group g, Severity s, const char* tag) {
    for (std::size_t i = 0; i < n; ++i) {
      UtteranceRecord r;
      r.utterance_id = std::string(tag) + "_" + std::to_string(i);
      r.speaker_id = std::string(tag) + "_spk" +
                     std::to_string(i % speakers_per_category);
      r.dataset_id = dataset;
      r.group = g;
      r.severity = s;
      for (std::size_t w = 0; w < words_per_utterance; ++w) {
        r.reference_words.push_back("w" + std::to_string(gen() % 50));
      }
      m.records.push_back(std::move(r));
    }
  };
  add(counts.normal, Group::kNormal, Severity::kNone, "nor");
  add(counts.mild, Group::kClp, Severity::kMild, "mil");
  add(counts.moderate, Group::kClp, Severity::kModerate, "mod");
  add(counts.severe, Group::kClp, Severity::kSevere, "sev");
  return m;
}

inline AudioSignal sine(double freq, double amplitude, double seconds,
                        int rate = 16000, double phase = 0.0) {
  AudioSignal s;
  s.sample_rate = rate;
  const auto n = static_cast<std::size_t>(std::lround(seconds * rate));
  s.samples.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    s.samples[i] = amplitude * std::sin(2.0 * std::numbers::pi * freq * i / rate + phase);
  }
  return s;
}

inline AudioSignal silence(double seconds, int rate = 16000) {
  AudioSignal s;
  s.sample_rate = rate;
  s.samples.assign(static_cast<std::size_t>(std::lround(seconds * rate)), 0.0);
  return s;
}

inline AudioSignal concat(const AudioSignal& a, const AudioSignal& b) {
  AudioSignal s = a;
  s.samples.insert(s.samples.end(), b.samples.begin(), b.samples.end());
  return s;
}

// Vowel-like tone: harmonics of f0 shaped by two resonance peaks, with
// silence on both sides.
inline AudioSignal vowel(double f0, double f1, double f2, double seconds,
                         int rate = 16000) {
  AudioSignal voiced;
  voiced.sample_rate = rate;
  const auto n = static_cast<std::size_t>(std::lround(seconds * rate));
  voiced.samples.assign(n, 0.0);
  for (int h = 1; h * f0 < rate / 2.0 - 200; ++h) {
    const double f = h * f0;
    const double gain = std::exp(-std::pow((f - f1) / 150.0, 2)) +
                        0.6 * std::exp(-std::pow((f - f2) / 200.0, 2)) + 0.02;
    for (std::size_t i = 0; i < n; ++i) {
      voiced.samples[i] += gain * std::sin(2.0 * std::numbers::pi * f * i / rate);
    }
  }
  double peak = 0.0;
  for (const double v : voiced.samples) peak = std::max(peak, std::abs(v));
  for (double& v : voiced.samples) v *= 0.5 / peak;
  return concat(concat(silence(0.15, rate), voiced), silence(0.15, rate));
}

// Adds seeded white noise of the given RMS.
inline AudioSignal add_noise(AudioSignal s, double rms, std::uint64_t seed) {
  std::mt19937_64 gen(seed);
  std::normal_distribution<double> noise(0.0, rms);
  for (double& v : s.samples) v += noise(gen);
  return s;
}

// Fresh scratch directory under the system temp dir.
inline std::filesystem::path scratch_dir(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / ("asrfair_test_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

}  // namespace asrfair::testing
