// Copyright 2026 The caprank Authors. All Rights Reserved.
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
#include <stdexcept>
#include <string>

#include "caprank/simd/kernels.hpp"

namespace caprank::simd {

namespace {

Isa detect() {
  return cpu_supports(Isa::kAvx2) ? Isa::kAvx2 : Isa::kScalar;
}

std::atomic<Isa>& selected() {
  static std::atomic<Isa> isa{detect()};
  return isa;
}

void check_lengths(std::size_t a, std::size_t b) {
  if (a != b) {
    throw std::invalid_argument("vector length mismatch: " + std::to_string(a) +
                                " vs " + std::to_string(b));
  }
}

}  // namespace

const char* isa_name(Isa isa) {
  switch (isa) {
    case Isa::kScalar: return "scalar";
    case Isa::kAvx2: return "avx2";
  }
  return "unknown";
}

bool cpu_supports(Isa isa) {
  switch (isa) {
    case Isa::kScalar:
      return true;
    case Isa::kAvx2:
#if defined(CAPRANK_HAVE_AVX2) && (defined(__GNUC__) || defined(__clang__))
      __builtin_cpu_init();
      return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
      return false;
#endif
  }
  return false;
}

Isa active_isa() { return selected().load(std::memory_order_relaxed); }

void set_active_isa(Isa isa) {
  if (!cpu_supports(isa)) {
    throw std::invalid_argument(std::string("SIMD variant not available: ") +
                                isa_name(isa));
  }
  selected().store(isa, std::memory_order_relaxed);
}

double dot(std::span<const double> a, std::span<const double> b) {
  check_lengths(a.size(), b.size());
#if defined(CAPRANK_HAVE_AVX2)
  if (active_isa() == Isa::kAvx2) return avx2::dot(a.data(), b.data(), a.size());
#endif
  return scalar::dot(a.data(), b.data(), a.size());
}

CosineParts cosine_parts(std::span<const double> a, std::span<const double> b) {
  check_lengths(a.size(), b.size());
#if defined(CAPRANK_HAVE_AVX2)
  if (active_isa() == Isa::kAvx2) return avx2::cosine_parts(a.data(), b.data(), a.size());
#endif
  return scalar::cosine_parts(a.data(), b.data(), a.size());
}

void accumulate(std::span<double> dst, std::span<const float> src) {
  check_lengths(dst.size(), src.size());
#if defined(CAPRANK_HAVE_AVX2)
  if (active_isa() == Isa::kAvx2) return avx2::accumulate(dst.data(), src.data(), dst.size());
#endif
  scalar::accumulate(dst.data(), src.data(), dst.size());
}

}  // namespace caprank::simd
