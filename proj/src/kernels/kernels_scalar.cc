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

#include "dyndense/kernels.hpp"

namespace dyndense::kernels {
namespace {

bool min_merge_f64(double* dst, const double* src, std::size_t n) {
  bool changed = false;
  for (std::size_t i = 0; i < n; ++i) {
    if (src[i] < dst[i]) {
      dst[i] = src[i];
      changed = true;
    }
  }
  return changed;
}

bool max_merge_u8(std::uint8_t* dst, const std::uint8_t* src, std::size_t n) {
  bool changed = false;
  for (std::size_t i = 0; i < n; ++i) {
    if (src[i] > dst[i]) {
      dst[i] = src[i];
      changed = true;
    }
  }
  return changed;
}

bool max_merge_u32(std::uint32_t* dst, const std::uint32_t* src, std::size_t n) {
  bool changed = false;
  for (std::size_t i = 0; i < n; ++i) {
    if (src[i] > dst[i]) {
      dst[i] = src[i];
      changed = true;
    }
  }
  return changed;
}

double sum_f64(const double* x, std::size_t n) {
  double s[8] = {0, 0, 0, 0, 0, 0, 0, 0};
  for (std::size_t i = 0; i < n; ++i) s[i % 8] += x[i];
  const double t0 = s[0] + s[4];
  const double t1 = s[1] + s[5];
  const double t2 = s[2] + s[6];
  const double t3 = s[3] + s[7];
  return (t0 + t2) + (t1 + t3);
}

}  // namespace

const KernelSet& scalar() {
  static const KernelSet k{"scalar", &min_merge_f64, &max_merge_u8, &max_merge_u32, &sum_f64};
  return k;
}

}  // namespace dyndense::kernels
