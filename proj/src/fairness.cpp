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

#include "asrfair/fairness.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <string>

#include "asrfair/delimited.hpp"
#include "asrfair/error.hpp"

namespace asrfair {
namespace {

void require_rate(double e, const char* what) {
  if (!(e >= 0.0) || std::isinf(e)) {
    throw Error(ErrorKind::kInvalidArgument,
                std::string(what) + " must be a finite non-negative percentage");
  }
}

void require_weights(FairnessWeights w) {
  if (!(w.alpha >= 0.0) || !(w.beta >= 0.0) || std::isinf(w.alpha) ||
      std::isinf(w.beta)) {
    throw Error(ErrorKind::kInvalidArgument,
                "fairness weights must be finite and non-negative");
  }
}

}  // namespace

double average_error_rate(double e1, double e2) {
  require_rate(e1, "error rate");
  require_rate(e2, "error rate");
  return (e1 + e2) / 2.0;
}

double error_disparity(double e1, double e2) {
  require_rate(e1, "error rate");
  require_rate(e2, "error rate");
  return std::fabs(e1 - e2);
}

FairnessResult fairness_score(double error_normal, double error_clp,
                              FairnessWeights weights) {
  require_weights(weights);
  FairnessResult r;
  r.weights = weights;
  r.error_normal = error_normal;
  r.error_clp = error_clp;
  r.average_error = average_error_rate(error_normal, error_clp);
  r.disparity = error_disparity(error_normal, error_clp);
  // + 0.0 turns -0.0 into 0.0.
  r.score = -weights.alpha * r.average_error - weights.beta * r.disparity + 0.0;
  return r;
}

std::vector<FairnessResult> fairness_sweep(
    double error_normal, double error_clp,
    std::span<const FairnessWeights> weight_list) {
  if (weight_list.empty()) {
    throw Error(ErrorKind::kInvalidArgument, "empty weight list");
  }
  std::vector<FairnessResult> out;
  out.reserve(weight_list.size());
  for (const auto& w : weight_list) {
    out.push_back(fairness_score(error_normal, error_clp, w));
  }
  return out;
}

double relative_fairness_improvement(double fs_baseline, double fs_new) {
  if (fs_baseline == 0.0 || std::isnan(fs_baseline)) {
    throw Error(ErrorKind::kInvalidArgument, "zero baseline fairness score");
  }
  if (fs_baseline > 0.0 || fs_new > 0.0 || std::isnan(fs_new)) {
    throw Error(ErrorKind::kInvalidArgument,
                "fairness scores must be non-positive");
  }
  const double base = std::fabs(fs_baseline);
  return 100.0 * (base - std::fabs(fs_new)) / base + 0.0;
}

double max_pairwise_disparity(std::span<const double> errors) {
  if (errors.empty()) {
    throw Error(ErrorKind::kInvalidArgument, "no group error rates");
  }
  for (const double e : errors) require_rate(e, "error rate");
  const auto [lo, hi] = std::minmax_element(errors.begin(), errors.end());
  return *hi - *lo;
}

double multi_group_fairness_score(std::span<const double> errors,
                                  FairnessWeights weights) {
  require_weights(weights);
  const double disparity = max_pairwise_disparity(errors);
  double sum = 0.0;
  for (const double e : errors) sum += e;
  const double average = sum / static_cast<double>(errors.size());
  return -weights.alpha * average - weights.beta * disparity + 0.0;
}

std::vector<FairnessWeights> parse_weight_list(std::string_view text) {
  std::vector<FairnessWeights> out;
  std::size_t start = 0;
  while (start <= text.size()) {
    const std::size_t comma = text.find(',', start);
    const std::string_view item = trim(text.substr(
        start, comma == std::string_view::npos ? std::string_view::npos
                                               : comma - start));
    const std::size_t colon = item.find(':');
    const auto alpha = colon == std::string_view::npos
                           ? std::nullopt
                           : parse_number(item.substr(0, colon));
    const auto beta = colon == std::string_view::npos
                          ? std::nullopt
                          : parse_number(item.substr(colon + 1));
    if (!alpha || !beta) {
      throw Error(ErrorKind::kParse, "malformed weight pair '" +
                                         std::string(item) +
                                         "' (expected alpha:beta)");
    }
    out.push_back({*alpha, *beta});
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

void write_sweep(std::ostream& out, std::span<const FairnessResult> results) {
  out << "alpha,beta,error_normal,error_clp,average,disparity,fs\n";
  for (const auto& r : results) {
    out << format_exact(r.weights.alpha) << ',' << format_exact(r.weights.beta)
        << ',' << format_fixed(r.error_normal, 2) << ','
        << format_fixed(r.error_clp, 2) << ','
        << format_fixed(r.average_error, 2) << ','
        << format_fixed(r.disparity, 2) << ',' << format_fixed(r.score, 2)
        << '\n';
  }
}

}  // namespace asrfair
