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

#include <cmath>

#include "asrfair/simd/kernels.hpp"

namespace asrfair::simd {
namespace {

double squared_distance_scalar(const double* a, const double* b,
                               std::size_t n) {
  double sum = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double d = a[i] - b[i];
    sum += d * d;
  }
  return sum;
}

double dot_scalar(const double* a, const double* b, std::size_t n) {
  double sum = 0.0;
  for (std::size_t i = 0; i < n; ++i) sum += a[i] * b[i];
  return sum;
}

double sum_squares_scalar(const double* a, std::size_t n) {
  double sum = 0.0;
  for (std::size_t i = 0; i < n; ++i) sum += a[i] * a[i];
  return sum;
}

void multiply_scalar(const double* a, const double* b, double* out,
                     std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) out[i] = a[i] * b[i];
}

void magnitude_scalar(const double* interleaved, double* out, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) {
    const double re = interleaved[2 * i];
    const double im = interleaved[2 * i + 1];
    out[i] = std::sqrt(re * re + im * im);
  }
}

}  // namespace

const KernelTable& scalar_kernels() {
  static const KernelTable table{"scalar",         squared_distance_scalar,
                                 dot_scalar,       sum_squares_scalar,
                                 multiply_scalar,  magnitude_scalar};
  return table;
}

}  // namespace asrfair::simd
