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

#include <atomic>
#include <cstdlib>
#include <string_view>

#include "asrfair/error.hpp"
#include "kernels_internal.hpp"

namespace asrfair::simd {
namespace {

bool cpu_has_avx2() {
#if defined(ASRFAIR_HAVE_AVX2) && (defined(__GNUC__) || defined(__clang__))
  __builtin_cpu_init();
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
  return false;
#endif
}

const KernelTable* best_table() {
  const char* forced = std::getenv("ASRFAIR_SIMD");
  if (forced != nullptr && std::string_view(forced) == "scalar") {
    return &scalar_kernels();
  }
  if (const KernelTable* avx2 = avx2_kernels()) return avx2;
  return &scalar_kernels();
}

std::atomic<const KernelTable*>& slot() {
  static std::atomic<const KernelTable*> current{best_table()};
  return current;
}

}  // namespace

const KernelTable* avx2_kernels() {
#if defined(ASRFAIR_HAVE_AVX2)
  static const bool supported = cpu_has_avx2();
  return supported ? &detail::avx2_table() : nullptr;
#else
  return nullptr;
#endif
}

bool backend_available(Backend backend) {
  return backend == Backend::kScalar || avx2_kernels() != nullptr;
}

const KernelTable& active() { return *slot().load(std::memory_order_acquire); }

void select_backend(Backend backend) {
  const KernelTable* table =
      backend == Backend::kScalar ? &scalar_kernels() : avx2_kernels();
  if (table == nullptr) {
    throw Error(ErrorKind::kInvalidArgument,
                "SIMD backend not available on this CPU");
  }
  slot().store(table, std::memory_order_release);
}

void reset_backend() { slot().store(best_table(), std::memory_order_release); }

}  // namespace asrfair::simd
