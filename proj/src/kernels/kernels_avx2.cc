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

#include <immintrin.h>

#include "dyndense/kernels.hpp"

namespace dyndense::kernels {
namespace {

bool min_merge_f64(double* dst, const double* src, std::size_t n) {
  std::size_t i = 0;
  __m256d less = _mm256_setzero_pd();
  for (; i + 4 <= n; i += 4) {
    const __m256d d = _mm256_loadu_pd(dst + i);
    const __m256d s = _mm256_loadu_pd(src + i);
    less = _mm256_or_pd(less, _mm256_cmp_pd(s, d, _CMP_LT_OQ));
    _mm256_storeu_pd(dst + i, _mm256_min_pd(s, d));
  }
  bool changed = _mm256_movemask_pd(less) != 0;
  for (; i < n; ++i) {
    if (src[i] < dst[i]) {
      dst[i] = src[i];
      changed = true;
    }
  }
  return changed;
}

bool max_merge_u8(std::uint8_t* dst, const std::uint8_t* src, std::size_t n) {
  std::size_t i = 0;
  __m256i diff = _mm256_setzero_si256();
  for (; i + 32 <= n; i += 32) {
    const __m256i d = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(dst + i));
    const __m256i s = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(src + i));
    const __m256i m = _mm256_max_epu8(d, s);
    diff = _mm256_or_si256(diff, _mm256_xor_si256(m, d));
    _mm256_storeu_si256(reinterpret_cast<__m256i*>(dst + i), m);
  }
  bool changed = !_mm256_testz_si256(diff, diff);
  for (; i < n; ++i) {
    if (src[i] > dst[i]) {
      dst[i] = src[i];
      changed = true;
    }
  }
  return changed;
}

bool max_merge_u32(std::uint32_t* dst, const std::uint32_t* src, std::size_t n) {
  std::size_t i = 0;
  __m256i diff = _mm256_setzero_si256();
  for (; i + 8 <= n; i += 8) {
    const __m256i d = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(dst + i));
    const __m256i s = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(src + i));
    const __m256i m = _mm256_max_epu32(d, s);
    diff = _mm256_or_si256(diff, _mm256_xor_si256(m, d));
    _mm256_storeu_si256(reinterpret_cast<__m256i*>(dst + i), m);
  }
  bool changed = !_mm256_testz_si256(diff, diff);
  for (; i < n; ++i) {
    if (src[i] > dst[i]) {
      dst[i] = src[i];
      changed = true;
    }
  }
  return changed;
}

double sum_f64(const double* x, std::size_t n) {
  __m256d lo = _mm256_setzero_pd();
  __m256d hi = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    lo = _mm256_add_pd(lo, _mm256_loadu_pd(x + i));
    hi = _mm256_add_pd(hi, _mm256_loadu_pd(x + i + 4));
  }
  alignas(32) double s[8];
  _mm256_store_pd(s, lo);
  _mm256_store_pd(s + 4, hi);
  for (std::size_t k = 0; i < n; ++i, ++k) s[k] += x[i];
  const double t0 = s[0] + s[4];
  const double t1 = s[1] + s[5];
  const double t2 = s[2] + s[6];
  const double t3 = s[3] + s[7];
  return (t0 + t2) + (t1 + t3);
}

}  // namespace

const KernelSet& avx2_impl() {
  static const KernelSet k{"avx2", &min_merge_f64, &max_merge_u8, &max_merge_u32, &sum_f64};
  return k;
}

}  // namespace dyndense::kernels
