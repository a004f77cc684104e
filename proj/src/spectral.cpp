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

#include "asrfair/spectral.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <mutex>
#include <numbers>
#include <optional>
#include <ostream>
#include <unordered_map>

#include "asrfair/delimited.hpp"
#include "asrfair/error.hpp"
#include "asrfair/parallel.hpp"
#include "asrfair/simd/kernels.hpp"

namespace asrfair {

FrameMatrix::FrameMatrix(std::size_t rows, std::size_t cols,
                         std::vector<double> data)
    : rows_(rows), cols_(cols), data_(std::move(data)) {
  if (data_.size() != rows * cols) {
    throw Error(ErrorKind::kInvalidArgument, "frame matrix size mismatch");
  }
}

std::size_t FrameSpec::window_samples(int sample_rate) const {
  return static_cast<std::size_t>(std::lround(window_ms * sample_rate / 1000.0));
}

std::size_t FrameSpec::hop_samples(int sample_rate) const {
  return static_cast<std::size_t>(std::lround(hop_ms * sample_rate / 1000.0));
}

void FrameSpec::validate(int sample_rate) const {
  if (sample_rate <= 0) {
    throw Error(ErrorKind::kInvalidArgument, "sample rate must be positive");
  }
  if (!(window_ms > 0.0) || !(hop_ms > 0.0)) {
    throw Error(ErrorKind::kInvalidArgument,
                "window and hop durations must be positive");
  }
  if (hop_ms > window_ms) {
    throw Error(ErrorKind::kInvalidArgument, "hop must not exceed the window");
  }
  if (window_samples(sample_rate) == 0 || hop_samples(sample_rate) == 0) {
    throw Error(ErrorKind::kInvalidArgument,
                "window or hop shorter than one sample");
  }
  if (fft_points < window_samples(sample_rate)) {
    throw Error(ErrorKind::kInvalidArgument,
                "fft_points (" + std::to_string(fft_points) +
                    ") smaller than the window (" +
                    std::to_string(window_samples(sample_rate)) + " samples)");
  }
}

std::size_t frame_count(std::size_t n_samples, std::size_t window,
                        std::size_t hop) {
  if (window == 0 || hop == 0 || n_samples < window) return 0;
  return (n_samples - window) / hop + 1;
}

std::vector<double> make_window(WindowFunction fn, std::size_t length) {
  std::vector<double> w(length, 1.0);
  if (length < 2 || fn == WindowFunction::kRectangular) return w;
  const double denom = static_cast<double>(length - 1);
  for (std::size_t n = 0; n < length; ++n) {
    const double c = std::cos(2.0 * std::numbers::pi * n / denom);
    w[n] = fn == WindowFunction::kHamming ? 0.54 - 0.46 * c : 0.5 - 0.5 * c;
  }
  return w;
}

namespace {

struct FftwFree {
  void operator()(void* p) const { fftw_free(p); }
};
using RealBuffer = std::unique_ptr<double[], FftwFree>;
using ComplexBuffer = std::unique_ptr<fftw_complex[], FftwFree>;

RealBuffer alloc_real(std::size_t n) {
  return RealBuffer(static_cast<double*>(fftw_malloc(sizeof(double) * n)));
}
ComplexBuffer alloc_complex(std::size_t n) {
  return ComplexBuffer(
      static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * n)));
}

// FFTW planning is not thread-safe; execution with new arrays is. Plans are
// created once per size under a lock and reused.
// Plans live for the whole process and are released at exit.
struct PlanCache {
  ~PlanCache() {
    for (auto& [n, plan] : plans) fftw_destroy_plan(plan);
    fftw_cleanup();
  }
  std::mutex mutex;
  std::unordered_map<std::size_t, fftw_plan> plans;
};

fftw_plan r2c_plan(std::size_t n) {
  static PlanCache cache;
  std::lock_guard lock(cache.mutex);
  auto& plans = cache.plans;
  auto it = plans.find(n);
  if (it != plans.end()) return it->second;
  RealBuffer in = alloc_real(n);
  ComplexBuffer out = alloc_complex(n / 2 + 1);
  fftw_plan plan = fftw_plan_dft_r2c_1d(static_cast<int>(n), in.get(),
                                        out.get(), FFTW_ESTIMATE);
  if (plan == nullptr) {
    throw Error(ErrorKind::kInvalidArgument, "cannot plan transform");
  }
  plans.emplace(n, plan);
  return plan;
}

void require_one_frame(const AudioSignal& signal, const FrameSpec& spec) {
  spec.validate(signal.sample_rate);
  if (signal.samples.size() < spec.window_samples(signal.sample_rate)) {
    throw Error(ErrorKind::kInvalidArgument,
                "signal shorter than one analysis window");
  }
}

}  // namespace

Spectrogram compute_spectrogram(const AudioSignal& signal,
                                const FrameSpec& spec) {
  require_one_frame(signal, spec);
  const std::size_t win = spec.window_samples(signal.sample_rate);
  const std::size_t hop = spec.hop_samples(signal.sample_rate);
  const std::size_t n_fft = spec.fft_points;
  const std::size_t bins = n_fft / 2 + 1;
  const std::size_t n_frames = frame_count(signal.samples.size(), win, hop);

  const auto window = make_window(spec.window, win);
  const auto& kernels = simd::active();
  const fftw_plan plan = r2c_plan(n_fft);
  RealBuffer in = alloc_real(n_fft);
  ComplexBuffer out = alloc_complex(bins);

  Spectrogram result{FrameMatrix(n_frames, bins), spec, signal.sample_rate};
  std::fill(in.get() + win, in.get() + n_fft, 0.0);
  for (std::size_t f = 0; f < n_frames; ++f) {
    kernels.multiply(signal.samples.data() + f * hop, window.data(), in.get(),
                     win);
    fftw_execute_dft_r2c(plan, in.get(), out.get());
    kernels.magnitude(&out[0][0], result.frames.row(f).data(), bins);
  }
  return result;
}

std::vector<double> frame_energies(const AudioSignal& signal,
                                   const FrameSpec& spec) {
  require_one_frame(signal, spec);
  const std::size_t win = spec.window_samples(signal.sample_rate);
  const std::size_t hop = spec.hop_samples(signal.sample_rate);
  const std::size_t n_frames = frame_count(signal.samples.size(), win, hop);
  const auto& kernels = simd::active();
  std::vector<double> energies(n_frames);
  for (std::size_t f = 0; f < n_frames; ++f) {
    energies[f] = kernels.sum_squares(signal.samples.data() + f * hop, win);
  }
  return energies;
}

std::size_t VoicedMask::voiced_count() const {
  return static_cast<std::size_t>(std::count(flags.begin(), flags.end(), true));
}

VoicedMask detect_voiced(const AudioSignal& signal, const FrameSpec& spec,
                         double threshold_fraction) {
  if (!(threshold_fraction >= 0.0)) {
    throw Error(ErrorKind::kInvalidArgument,
                "VAD threshold fraction must be non-negative");
  }
  const auto energies = frame_energies(signal, spec);
  VoicedMask mask;
  mask.threshold_fraction = threshold_fraction;
  double total = 0.0;
  for (const double e : energies) total += e;
  mask.mean_energy = total / static_cast<double>(energies.size());
  const double threshold = threshold_fraction * mask.mean_energy;
  mask.flags.reserve(energies.size());
  for (const double e : energies) mask.flags.push_back(e > threshold);
  return mask;
}

FrameMatrix voiced_frames(const Spectrogram& spectrogram,
                          const VoicedMask& mask, FeatureScale scale) {
  const auto& frames = spectrogram.frames;
  if (mask.flags.size() != frames.rows()) {
    throw Error(ErrorKind::kInvalidArgument,
                "voiced mask length differs from frame count");
  }
  FrameMatrix out(mask.voiced_count(), frames.cols());
  std::size_t r = 0;
  for (std::size_t f = 0; f < frames.rows(); ++f) {
    if (!mask.flags[f]) continue;
    const auto src = frames.row(f);
    auto dst = out.row(r++);
    if (scale == FeatureScale::kLogMagnitude) {
      std::transform(src.begin(), src.end(), dst.begin(),
                     [](double m) { return std::log1p(m); });
    } else {
      std::copy(src.begin(), src.end(), dst.begin());
    }
  }
  return out;
}

namespace {

double cosine_from_parts(double dot, double norm_a, double norm_b) {
  if (norm_a == 0.0 && norm_b == 0.0) return 0.0;
  if (norm_a == 0.0 || norm_b == 0.0) return 1.0;
  return std::clamp(1.0 - dot / (norm_a * norm_b), 0.0, 2.0);
}

}  // namespace

double local_distance(std::span<const double> a, std::span<const double> b,
                      LocalMetric metric) {
  if (a.size() != b.size()) {
    throw Error(ErrorKind::kInvalidArgument, "frame dimension mismatch");
  }
  if (metric == LocalMetric::kEuclidean) {
    return std::sqrt(simd::squared_distance(a, b));
  }
  return cosine_from_parts(simd::dot(a, b), std::sqrt(simd::sum_squares(a)),
                           std::sqrt(simd::sum_squares(b)));
}

DtwResult dtw_distance(const FrameMatrix& a, const FrameMatrix& b,
                       LocalMetric metric) {
  if (a.empty() || b.empty()) {
    throw Error(ErrorKind::kInvalidArgument, "DTW of an empty sequence");
  }
  if (a.cols() != b.cols()) {
    throw Error(ErrorKind::kInvalidArgument, "frame dimension mismatch");
  }
  const auto& kernels = simd::active();
  const std::size_t n = a.rows();
  const std::size_t m = b.rows();
  const std::size_t dim = a.cols();

  std::vector<double> norm_a;
  std::vector<double> norm_b;
  if (metric == LocalMetric::kCosine) {
    for (std::size_t i = 0; i < n; ++i) {
      norm_a.push_back(std::sqrt(kernels.sum_squares(a.row(i).data(), dim)));
    }
    for (std::size_t j = 0; j < m; ++j) {
      norm_b.push_back(std::sqrt(kernels.sum_squares(b.row(j).data(), dim)));
    }
  }
  auto local = [&](std::size_t i, std::size_t j) {
    const double* x = a.row(i).data();
    const double* y = b.row(j).data();
    if (metric == LocalMetric::kEuclidean) {
      return std::sqrt(kernels.squared_distance(x, y, dim));
    }
    return cosine_from_parts(kernels.dot(x, y, dim), norm_a[i], norm_b[j]);
  };

  // Two rolling rows of accumulated cost and of path length along the
  // chosen predecessor.
  std::vector<double> prev_cost(m), cur_cost(m);
  std::vector<std::size_t> prev_len(m), cur_len(m);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < m; ++j) {
      const double d = local(i, j);
      if (i == 0 && j == 0) {
        cur_cost[j] = d;
        cur_len[j] = 1;
        continue;
      }
      double best = std::numeric_limits<double>::infinity();
      std::size_t best_len = 0;
      if (i > 0 && j > 0) {
        best = prev_cost[j - 1];
        best_len = prev_len[j - 1];
      }
      if (i > 0 && prev_cost[j] < best) {
        best = prev_cost[j];
        best_len = prev_len[j];
      }
      if (j > 0 && cur_cost[j - 1] < best) {
        best = cur_cost[j - 1];
        best_len = cur_len[j - 1];
      }
      cur_cost[j] = d + best;
      cur_len[j] = best_len + 1;
    }
    std::swap(prev_cost, cur_cost);
    std::swap(prev_len, cur_len);
  }
  DtwResult result;
  result.total_cost = prev_cost[m - 1];
  result.path_length = prev_len[m - 1];
  result.normalized_cost =
      result.total_cost / static_cast<double>(result.path_length);
  return result;
}

DistanceSummary summarize(std::vector<double> values) {
  if (values.empty()) {
    throw Error(ErrorKind::kInvalidArgument, "summary of an empty sample");
  }
  std::sort(values.begin(), values.end());
  auto quantile = [&](double p) {
    const double h = p * static_cast<double>(values.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(h));
    const std::size_t hi = std::min(lo + 1, values.size() - 1);
    return values[lo] + (h - static_cast<double>(lo)) * (values[hi] - values[lo]);
  };
  DistanceSummary s;
  s.n = values.size();
  s.min = values.front();
  s.q1 = quantile(0.25);
  s.median = quantile(0.5);
  s.q3 = quantile(0.75);
  s.max = values.back();
  return s;
}

namespace {

std::optional<FrameMatrix> voiced_features(const AudioSignal& signal,
                                           const StudyOptions& options) {
  if (signal.samples.size() < options.spec.window_samples(signal.sample_rate)) {
    return std::nullopt;
  }
  const auto spectrogram = compute_spectrogram(signal, options.spec);
  const auto mask =
      detect_voiced(signal, options.spec, options.threshold_fraction);
  if (mask.voiced_count() == 0) return std::nullopt;
  return voiced_frames(spectrogram, mask, options.scale);
}

}  // namespace

SeverityDistanceDistribution severity_distance_study(
    std::span<const LabeledAudio> normal,
    const std::map<Severity, std::vector<LabeledAudio>>& graded,
    const StudyOptions& options) {
  if (normal.empty()) {
    throw Error(ErrorKind::kInvalidArgument, "empty normal utterance set");
  }
  if (graded.empty()) {
    throw Error(ErrorKind::kInvalidArgument, "empty graded utterance set");
  }
  std::vector<const LabeledAudio*> all;
  for (const auto& u : normal) all.push_back(&u);
  for (const auto& [severity, set] : graded) {
    if (set.empty()) {
      throw Error(ErrorKind::kInvalidArgument,
                  "empty utterance set for severity '" +
                      std::string(to_string(severity)) + "'");
    }
    for (const auto& u : set) all.push_back(&u);
  }
  const int rate = all.front()->signal.sample_rate;
  for (const auto* u : all) {
    if (u->signal.sample_rate != rate) {
      throw Error(ErrorKind::kInvalidArgument,
                  "mixed sample rates: '" + u->id + "' is " +
                      std::to_string(u->signal.sample_rate) + " Hz, expected " +
                      std::to_string(rate) + " Hz");
    }
  }
  options.spec.validate(rate);

  std::vector<std::optional<FrameMatrix>> features(all.size());
  parallel_for(all.size(), options.jobs, [&](std::size_t i) {
    features[i] = voiced_features(all[i]->signal, options);
  });

  SeverityDistanceDistribution study;
  for (std::size_t i = 0; i < all.size(); ++i) {
    if (!features[i]) study.skipped_ids.push_back(all[i]->id);
  }

  struct PairJob {
    Severity severity;
    std::size_t normal_index;
    std::size_t graded_index;
  };
  std::vector<PairJob> jobs;
  std::size_t offset = normal.size();
  for (const auto& [severity, set] : graded) {
    for (std::size_t ni = 0; ni < normal.size(); ++ni) {
      if (!features[ni]) continue;
      for (std::size_t gi = 0; gi < set.size(); ++gi) {
        if (features[offset + gi]) jobs.push_back({severity, ni, offset + gi});
      }
    }
    offset += set.size();
  }

  study.pairs.resize(jobs.size());
  parallel_for(jobs.size(), options.jobs, [&](std::size_t k) {
    const auto& job = jobs[k];
    const DtwResult r = dtw_distance(*features[job.normal_index],
                                     *features[job.graded_index], options.metric);
    study.pairs[k] = {job.severity, all[job.normal_index]->id,
                      all[job.graded_index]->id, r.total_cost,
                      r.normalized_cost, r.path_length};
  });

  std::map<Severity, std::vector<double>> by_severity;
  for (const auto& p : study.pairs) {
    by_severity[p.severity].push_back(p.normalized_cost);
  }
  for (auto& [severity, values] : by_severity) {
    study.summaries[severity] = summarize(std::move(values));
  }
  return study;
}

void write_distance_study(std::ostream& out,
                          const SeverityDistanceDistribution& study) {
  out << "severity,normal_id,graded_id,raw_cost,normalized_cost\n";
  for (const auto& p : study.pairs) {
    write_row(out, {std::string(to_string(p.severity)), p.normal_id,
                    p.graded_id, format_fixed(p.raw_cost, 6),
                    format_fixed(p.normalized_cost, 6)});
  }
  out << "\nseverity,n,min,q1,median,q3,max\n";
  for (const auto& [severity, s] : study.summaries) {
    out << to_string(severity) << ',' << s.n << ',' << format_fixed(s.min, 6)
        << ',' << format_fixed(s.q1, 6) << ',' << format_fixed(s.median, 6)
        << ',' << format_fixed(s.q3, 6) << ',' << format_fixed(s.max, 6)
        << '\n';
  }
  out << "\nskipped_utterances," << study.skipped_ids.size();
  for (const auto& id : study.skipped_ids) out << ',' << quote_field(id);
  out << '\n';
}

}  // namespace asrfair
