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

#pragma once

#include <cstddef>
#include <span>

// Inner-loop kernels behind the embedding store. Each kernel has a scalar
// reference implementation and an AVX2+FMA variant; the dispatching entry
// points pick the variant once, at first use, from CPUID.

namespace caprank::simd {

enum class Isa { kScalar, kAvx2 };

const char* isa_name(Isa isa);

// dot(a, b), |a|^2 and |b|^2 accumulated in one pass.
struct CosineParts {
  double dot = 0.0;
  double norm2_a = 0.0;
  double norm2_b = 0.0;
};

namespace scalar {
double dot(const double* a, const double* b, std::size_t n);
CosineParts cosine_parts(const double* a, const double* b, std::size_t n);
// dst[i] += src[i]
void accumulate(double* dst, const float* src, std::size_t n);
}  // namespace scalar

namespace avx2 {
// Callable only when cpu_supports(Isa::kAvx2).
double dot(const double* a, const double* b, std::size_t n);
CosineParts cosine_parts(const double* a, const double* b, std::size_t n);
void accumulate(double* dst, const float* src, std::size_t n);
}  // namespace avx2

bool cpu_supports(Isa isa);

// Currently selected variant. The best supported one unless overridden.
Isa active_isa();

// Force a variant (tests and benchmarking). Throws std::invalid_argument if
// the CPU or the build lacks it.
void set_active_isa(Isa isa);

double dot(std::span<const double> a, std::span<const double> b);
CosineParts cosine_parts(std::span<const double> a, std::span<const double> b);
void accumulate(std::span<double> dst, std::span<const float> src);

}  // namespace caprank::simd
