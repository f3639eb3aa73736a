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

// Compiled with -mavx2 -mfma. Nothing here may run before the dispatcher has
// confirmed CPU support.

#include "caprank/simd/kernels.hpp"

#if defined(CAPRANK_HAVE_AVX2)

#include <immintrin.h>

namespace caprank::simd::avx2 {

namespace {

// Lane order is fixed so results are reproducible run to run.
inline double hsum(__m256d v) {
  alignas(32) double lanes[4];
  _mm256_store_pd(lanes, v);
  return (lanes[0] + lanes[1]) + (lanes[2] + lanes[3]);
}

}  // namespace

double dot(const double* a, const double* b, std::size_t n) {
  __m256d acc0 = _mm256_setzero_pd();
  __m256d acc1 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), acc0);
    acc1 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i + 4), _mm256_loadu_pd(b + i + 4), acc1);
  }
  for (; i + 4 <= n; i += 4) {
    acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), acc0);
  }
  double sum = hsum(_mm256_add_pd(acc0, acc1));
  for (; i < n; ++i) sum += a[i] * b[i];
  return sum;
}

CosineParts cosine_parts(const double* a, const double* b, std::size_t n) {
  __m256d d = _mm256_setzero_pd();
  __m256d na = _mm256_setzero_pd();
  __m256d nb = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d va = _mm256_loadu_pd(a + i);
    const __m256d vb = _mm256_loadu_pd(b + i);
    d = _mm256_fmadd_pd(va, vb, d);
    na = _mm256_fmadd_pd(va, va, na);
    nb = _mm256_fmadd_pd(vb, vb, nb);
  }
  CosineParts p{hsum(d), hsum(na), hsum(nb)};
  for (; i < n; ++i) {
    p.dot += a[i] * b[i];
    p.norm2_a += a[i] * a[i];
    p.norm2_b += b[i] * b[i];
  }
  return p;
}

void accumulate(double* dst, const float* src, std::size_t n) {
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d wide = _mm256_cvtps_pd(_mm_loadu_ps(src + i));
    _mm256_storeu_pd(dst + i, _mm256_add_pd(_mm256_loadu_pd(dst + i), wide));
  }
  for (; i < n; ++i) dst[i] += static_cast<double>(src[i]);
}

}  // namespace caprank::simd::avx2

#endif  // CAPRANK_HAVE_AVX2
