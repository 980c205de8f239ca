// Copyright 2026 The dyndense Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <doctest.h>

#include <bit>
#include <cmath>
#include <limits>
#include <vector>

#include "dyndense/kernels.hpp"
#include "dyndense/rng.hpp"

using namespace dyndense;

TEST_SUITE("kernels") {

TEST_CASE("avx2 kernels match the scalar reference bit for bit") {
  const kernels::KernelSet& s = kernels::scalar();
  const kernels::KernelSet* v = kernels::avx2();
  if (v == nullptr) {
    MESSAGE("AVX2 unavailable; only the scalar path is exercised");
    return;
  }
  Rng rng(1234);
  const double inf = std::numeric_limits<double>::infinity();
  for (int trial = 0; trial < 2000; ++trial) {
    const std::size_t n = rng.below(70);
    std::vector<double> a(n), b(n);
    for (std::size_t i = 0; i < n; ++i) {
      a[i] = rng.bernoulli(0.1) ? inf : rng.exponential();
      b[i] = rng.bernoulli(0.5) ? a[i] : (rng.bernoulli(0.1) ? inf : rng.exponential());
    }
    auto a1 = a, a2 = a;
    CHECK(s.min_merge_f64(a1.data(), b.data(), n) == v->min_merge_f64(a2.data(), b.data(), n));
    CHECK(a1 == a2);
    const double s1 = s.sum_f64(a1.data(), n);
    const double s2 = v->sum_f64(a2.data(), n);
    CHECK(std::bit_cast<std::uint64_t>(s1) == std::bit_cast<std::uint64_t>(s2));

    std::vector<std::uint8_t> g(n), h(n);
    for (std::size_t i = 0; i < n; ++i) {
      g[i] = static_cast<std::uint8_t>(rng.below(65));
      h[i] = rng.bernoulli(0.5) ? g[i] : static_cast<std::uint8_t>(rng.below(65));
    }
    auto g1 = g, g2 = g;
    CHECK(s.max_merge_u8(g1.data(), h.data(), n) == v->max_merge_u8(g2.data(), h.data(), n));
    CHECK(g1 == g2);

    std::vector<std::uint32_t> w(n), x(n);
    for (std::size_t i = 0; i < n; ++i) {
      w[i] = static_cast<std::uint32_t>(rng.below(1u << 20)) * (rng.coin() ? 1u : 0x800u);
      x[i] = rng.bernoulli(0.5) ? w[i] : static_cast<std::uint32_t>(rng.next_u64());
    }
    auto w1 = w, w2 = w;
    CHECK(s.max_merge_u32(w1.data(), x.data(), n) == v->max_merge_u32(w2.data(), x.data(), n));
    CHECK(w1 == w2);
  }
}

TEST_CASE("merge flags report changes only") {
  const kernels::KernelSet& k = kernels::active();
  std::vector<double> a = {1.0, 2.0, 3.0};
  const std::vector<double> same = a;
  CHECK_FALSE(k.min_merge_f64(a.data(), same.data(), a.size()));
  const std::vector<double> lower = {1.0, 1.5, 4.0};
  CHECK(k.min_merge_f64(a.data(), lower.data(), a.size()));
  CHECK(a == std::vector<double>{1.0, 1.5, 3.0});

  std::vector<std::uint8_t> g = {3, 0, 7};
  const std::vector<std::uint8_t> h = {2, 0, 7};
  CHECK_FALSE(k.max_merge_u8(g.data(), h.data(), g.size()));
}

TEST_CASE("merge algebra: commutative, associative, idempotent") {
  const kernels::KernelSet& k = kernels::active();
  Rng rng(77);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = 1 + rng.below(40);
    std::vector<double> a(n), b(n), c(n);
    for (std::size_t i = 0; i < n; ++i) {
      a[i] = rng.exponential();
      b[i] = rng.exponential();
      c[i] = rng.exponential();
    }
    auto ab = a, ba = b;
    k.min_merge_f64(ab.data(), b.data(), n);
    k.min_merge_f64(ba.data(), a.data(), n);
    CHECK(ab == ba);
    auto left = ab;
    k.min_merge_f64(left.data(), c.data(), n);
    auto bc = b;
    k.min_merge_f64(bc.data(), c.data(), n);
    auto right = a;
    k.min_merge_f64(right.data(), bc.data(), n);
    CHECK(left == right);
    auto aa = a;
    CHECK_FALSE(k.min_merge_f64(aa.data(), a.data(), n));
    CHECK(aa == a);
  }
}

TEST_CASE("kernel selection") {
  CHECK(kernels::select("scalar"));
  CHECK(std::string_view(kernels::active().name) == "scalar");
  CHECK_FALSE(kernels::select("sse9"));
  CHECK(kernels::select("auto"));
}

}  // TEST_SUITE
