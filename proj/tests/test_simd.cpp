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

#include <doctest.h>

#include <cmath>
#include <random>
#include <stdexcept>
#include <vector>

#include "caprank/simd/kernels.hpp"

using namespace caprank::simd;

namespace {

std::vector<double> random_vec(std::mt19937_64& rng, std::size_t n) {
  std::uniform_real_distribution<double> u(-3.0, 3.0);
  std::vector<double> v(n);
  for (auto& x : v) x = u(rng);
  return v;
}

bool close(double a, double b, double scale) { return std::abs(a - b) <= 1e-12 * (1.0 + scale); }

}  // namespace

TEST_CASE("scalar kernels on hand values") {
  const double a[] = {1, 2, 3};
  const double b[] = {4, -5, 6};
  CHECK(scalar::dot(a, b, 3) == 12.0);
  auto p = scalar::cosine_parts(a, b, 3);
  CHECK(p.dot == 12.0);
  CHECK(p.norm2_a == 14.0);
  CHECK(p.norm2_b == 77.0);
  double dst[] = {0.5, 0.5, 0.5};
  const float src[] = {1.0f, -2.0f, 0.25f};
  scalar::accumulate(dst, src, 3);
  CHECK(dst[0] == 1.5);
  CHECK(dst[1] == -1.5);
  CHECK(dst[2] == 0.75);
}

TEST_CASE("dispatch reports a supported variant") {
  CHECK(cpu_supports(Isa::kScalar));
  CHECK(cpu_supports(active_isa()));
  MESSAGE("active SIMD variant: " << isa_name(active_isa()));
}

TEST_CASE("dispatching entry points reject length mismatch") {
  std::vector<double> a(3), b(4);
  std::vector<float> f(4);
  CHECK_THROWS_AS(dot(a, b), std::invalid_argument);
  CHECK_THROWS_AS(cosine_parts(a, b), std::invalid_argument);
  CHECK_THROWS_AS(accumulate(a, f), std::invalid_argument);
}

#if defined(CAPRANK_HAVE_AVX2)
TEST_CASE("AVX2 kernels match the scalar reference") {
  if (!cpu_supports(Isa::kAvx2)) {
    MESSAGE("CPU lacks AVX2+FMA; skipping equivalence");
    return;
  }
  std::mt19937_64 rng(2024);
  // Cover every tail length around the 4- and 8-lane blocks.
  for (std::size_t n = 0; n <= 67; ++n) {
    for (int rep = 0; rep < 5; ++rep) {
      const auto a = random_vec(rng, n);
      const auto b = random_vec(rng, n);
      double mag = 0;
      for (std::size_t i = 0; i < n; ++i) mag += std::abs(a[i] * b[i]) + a[i] * a[i] + b[i] * b[i];

      CHECK(close(avx2::dot(a.data(), b.data(), n), scalar::dot(a.data(), b.data(), n), mag));
      const auto s = scalar::cosine_parts(a.data(), b.data(), n);
      const auto v = avx2::cosine_parts(a.data(), b.data(), n);
      CHECK(close(v.dot, s.dot, mag));
      CHECK(close(v.norm2_a, s.norm2_a, mag));
      CHECK(close(v.norm2_b, s.norm2_b, mag));

      std::vector<float> f(n);
      for (std::size_t i = 0; i < n; ++i) f[i] = static_cast<float>(b[i]);
      auto d1 = a, d2 = a;
      scalar::accumulate(d1.data(), f.data(), n);
      avx2::accumulate(d2.data(), f.data(), n);
      CHECK(d1 == d2);  // one exact add per lane
    }
  }
}

TEST_CASE("forcing a variant switches the dispatcher") {
  const auto before = active_isa();
  set_active_isa(Isa::kScalar);
  CHECK(active_isa() == Isa::kScalar);
  if (cpu_supports(Isa::kAvx2)) {
    set_active_isa(Isa::kAvx2);
    CHECK(active_isa() == Isa::kAvx2);
  }
  set_active_isa(before);
}
#endif
