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

#include <iosfwd>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

namespace asrfair {

struct FairnessWeights {
  double alpha = 0.5;  // weight on the average error rate
  double beta = 0.5;   // weight on the error disparity

  bool operator==(const FairnessWeights&) const = default;
  auto operator<=>(const FairnessWeights&) const = default;
};

struct FairnessResult {
  FairnessWeights weights;
  double error_normal = 0.0;  // G1
  double error_clp = 0.0;     // G2
  double average_error = 0.0;
  double disparity = 0.0;
  double score = 0.0;  // <= 0, closer to zero is fairer
};

// All operations take error rates in percent and throw kInvalidArgument on
// negative (or NaN) rates or weights.
double average_error_rate(double e1, double e2);
double error_disparity(double e1, double e2);
FairnessResult fairness_score(double error_normal, double error_clp,
                              FairnessWeights weights);
std::vector<FairnessResult> fairness_sweep(
    double error_normal, double error_clp,
    std::span<const FairnessWeights> weight_list);

// 100 * (|baseline| - |candidate|) / |baseline|; positive means fairer.
// Throws kInvalidArgument for a zero baseline or a positive score.
double relative_fairness_improvement(double fs_baseline, double fs_new);

// Extension beyond two groups: mean over all group rates and the largest
// pairwise gap. With two groups this equals fairness_score.
double max_pairwise_disparity(std::span<const double> errors);
double multi_group_fairness_score(std::span<const double> errors,
                                  FairnessWeights weights);

// "a:b,a:b,..." -> weights. Throws kParse on malformed input.
std::vector<FairnessWeights> parse_weight_list(std::string_view text);

// alpha,beta,error_normal,error_clp,average,disparity,fs
void write_sweep(std::ostream& out, std::span<const FairnessResult> results);

}  // namespace asrfair
