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
#include <span>
#include <string_view>

namespace asrfair::simd {

// Inner-loop kernels used by the spectral pipeline. Every kernel has a scalar
// reference and, on x86-64, an AVX2+FMA variant. The active table is chosen
// once at startup from CPUID and can be overridden for testing.
struct KernelTable {
  std::string_view name;
  // sum_i (a_i - b_i)^2
  double (*squared_distance)(const double* a, const double* b, std::size_t n);
  // sum_i a_i * b_i
  double (*dot)(const double* a, const double* b, std::size_t n);
  // sum_i a_i^2
  double (*sum_squares)(const double* a, std::size_t n);
  // out_i = a_i * b_i
  void (*multiply)(const double* a, const double* b, double* out,
                   std::size_t n);
  // out_i = sqrt(re_i^2 + im_i^2) from interleaved (re, im) pairs
  void (*magnitude)(const double* interleaved, double* out, std::size_t n);
};

enum class Backend { kScalar, kAvx2 };

const KernelTable& scalar_kernels();
// nullptr when the variant was not compiled in or the CPU lacks support.
const KernelTable* avx2_kernels();

bool backend_available(Backend backend);
// Best available unless ASRFAIR_SIMD=scalar is set in the environment.
const KernelTable& active();
// Throws kInvalidArgument when the backend is unavailable.
void select_backend(Backend backend);
void reset_backend();

inline double squared_distance(std::span<const double> a,
                               std::span<const double> b) {
  return active().squared_distance(a.data(), b.data(), a.size());
}
inline double dot(std::span<const double> a, std::span<const double> b) {
  return active().dot(a.data(), b.data(), a.size());
}
inline double sum_squares(std::span<const double> a) {
  return active().sum_squares(a.data(), a.size());
}

}  // namespace asrfair::simd
