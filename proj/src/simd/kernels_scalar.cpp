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

#include "caprank/simd/kernels.hpp"

namespace caprank::simd::scalar {

double dot(const double* a, const double* b, std::size_t n) {
  double sum = 0.0;
  for (std::size_t i = 0; i < n; ++i) sum += a[i] * b[i];
  return sum;
}

CosineParts cosine_parts(const double* a, const double* b, std::size_t n) {
  CosineParts p;
  for (std::size_t i = 0; i < n; ++i) {
    p.dot += a[i] * b[i];
    p.norm2_a += a[i] * a[i];
    p.norm2_b += b[i] * b[i];
  }
  return p;
}

void accumulate(double* dst, const float* src, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) dst[i] += static_cast<double>(src[i]);
}

}  // namespace caprank::simd::scalar
