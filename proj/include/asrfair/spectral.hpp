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
#include <iosfwd>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "asrfair/audio.hpp"
#include "asrfair/types.hpp"

namespace asrfair {

// Row-major matrix of frames: one row per frame.
class FrameMatrix {
 public:
  FrameMatrix() = default;
  FrameMatrix(std::size_t rows, std::size_t cols)
      : rows_(rows), cols_(cols), data_(rows * cols, 0.0) {}
  FrameMatrix(std::size_t rows, std::size_t cols, std::vector<double> data);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  bool empty() const noexcept { return rows_ == 0; }

  std::span<const double> row(std::size_t r) const {
    return {data_.data() + r * cols_, cols_};
  }
  std::span<double> row(std::size_t r) {
    return {data_.data() + r * cols_, cols_};
  }
  double& at(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  double at(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }
  const std::vector<double>& data() const noexcept { return data_; }

  bool operator==(const FrameMatrix&) const = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

enum class WindowFunction { kHamming, kHann, kRectangular };

struct FrameSpec {
  double window_ms = 20.0;
  double hop_ms = 10.0;
  std::size_t fft_points = 1024;
  WindowFunction window = WindowFunction::kHamming;

  std::size_t window_samples(int sample_rate) const;
  std::size_t hop_samples(int sample_rate) const;
  // Throws kInvalidArgument when hop > window, a duration is not positive,
  // or fft_points is smaller than the window at this rate.
  void validate(int sample_rate) const;
};

// floor((n - win) / hop) + 1 for n >= win, else 0.
std::size_t frame_count(std::size_t n_samples, std::size_t window,
                        std::size_t hop);

std::vector<double> make_window(WindowFunction fn, std::size_t length);

struct Spectrogram {
  FrameMatrix frames;  // n_frames x (fft_points / 2 + 1) magnitudes
  FrameSpec spec;
  int sample_rate = 0;
};

// Each frame is windowed, zero-padded to fft_points and transformed; rows
// hold the one-sided magnitude spectrum. Throws kInvalidArgument when the
// signal is shorter than one window.
Spectrogram compute_spectrogram(const AudioSignal& signal,
                                const FrameSpec& spec);

struct VoicedMask {
  std::vector<bool> flags;
  double threshold_fraction = 0.06;
  double mean_energy = 0.0;

  std::size_t voiced_count() const;
};

inline constexpr double kDefaultVadThreshold = 0.06;

// Frame energy is the sum of squared raw samples over the analysis window
// (same framing as compute_spectrogram). A frame is voiced iff its energy is
// strictly greater than threshold_fraction times the mean frame energy.
VoicedMask detect_voiced(const AudioSignal& signal, const FrameSpec& spec,
                         double threshold_fraction = kDefaultVadThreshold);

std::vector<double> frame_energies(const AudioSignal& signal,
                                   const FrameSpec& spec);

enum class FeatureScale {
  kLogMagnitude,  // log(1 + |X|)
  kMagnitude,
};

// Rows of the spectrogram whose mask flag is set, optionally log-compressed.
FrameMatrix voiced_frames(const Spectrogram& spectrogram,
                          const VoicedMask& mask,
                          FeatureScale scale = FeatureScale::kLogMagnitude);

enum class LocalMetric {
  kEuclidean,
  kCosine,  // 1 - cos(a, b); 0 for two zero vectors, 1 if only one is zero
};

double local_distance(std::span<const double> a, std::span<const double> b,
                      LocalMetric metric);

struct DtwResult {
  double total_cost = 0.0;
  std::size_t path_length = 0;
  double normalized_cost = 0.0;  // total_cost / path_length
};

// Accumulated cost D(i,j) = d(i,j) + min(D(i-1,j), D(i,j-1), D(i-1,j-1))
// with D(0,0) = d(0,0). path_length counts the cells on the optimal path;
// among equal-cost predecessors the diagonal is preferred, then (i-1,j),
// then (i,j-1). Throws kInvalidArgument on empty input or dimension
// mismatch.
DtwResult dtw_distance(const FrameMatrix& a, const FrameMatrix& b,
                       LocalMetric metric = LocalMetric::kEuclidean);

struct LabeledAudio {
  std::string id;
  AudioSignal signal;
};

struct StudyOptions {
  FrameSpec spec;
  LocalMetric metric = LocalMetric::kEuclidean;
  FeatureScale scale = FeatureScale::kLogMagnitude;
  double threshold_fraction = kDefaultVadThreshold;
  unsigned jobs = 1;  // 0 = all cores
};

struct PairDistance {
  Severity severity = Severity::kNone;
  std::string normal_id;
  std::string graded_id;
  double raw_cost = 0.0;
  double normalized_cost = 0.0;
  std::size_t path_length = 0;
};

struct DistanceSummary {
  std::size_t n = 0;
  double min = 0.0;
  double q1 = 0.0;
  double median = 0.0;
  double q3 = 0.0;
  double max = 0.0;
};

// Five-number summary with linearly interpolated quartiles. Throws
// kInvalidArgument on empty input.
DistanceSummary summarize(std::vector<double> values);

struct SeverityDistanceDistribution {
  // Ordered by severity, then normal input order, then graded input order.
  std::vector<PairDistance> pairs;
  // Only severities with at least one pair.
  std::map<Severity, DistanceSummary> summaries;
  // Utterances with no voiced frame (or shorter than one window), excluded.
  std::vector<std::string> skipped_ids;
};

// Cross-pair DTW distances between voiced log-spectrogram frames of every
// normal utterance and every graded utterance, summarized per severity on
// normalized cost. Throws kInvalidArgument for empty sets or mixed sample
// rates.
SeverityDistanceDistribution severity_distance_study(
    std::span<const LabeledAudio> normal,
    const std::map<Severity, std::vector<LabeledAudio>>& graded,
    const StudyOptions& options = {});

// severity,normal_id,graded_id,raw_cost,normalized_cost rows, a blank line,
// then severity,n,min,q1,median,q3,max rows and a skipped count.
void write_distance_study(std::ostream& out,
                          const SeverityDistanceDistribution& study);

}  // namespace asrfair
