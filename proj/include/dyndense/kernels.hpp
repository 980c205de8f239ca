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

#pragma once

#include <cstddef>
#include <cstdint>
#include <string_view>

namespace dyndense::kernels {

// Inner loops of the tuple estimators. Every implementation must return
// bit-identical results; sum_f64 therefore fixes its reduction order to
// eight interleaved partial sums combined as ((s0+s4)+(s2+s6))+((s1+s5)+(s3+s7)).
struct KernelSet {
  const char* name;
  // dst[i] = min(dst[i], src[i]); true iff some dst[i] decreased.
  bool (*min_merge_f64)(double* dst, const double* src, std::size_t n);
  // dst[i] = max(dst[i], src[i]); true iff some dst[i] increased.
  bool (*max_merge_u8)(std::uint8_t* dst, const std::uint8_t* src, std::size_t n);
  bool (*max_merge_u32)(std::uint32_t* dst, const std::uint32_t* src, std::size_t n);
  double (*sum_f64)(const double* x, std::size_t n);
};

const KernelSet& scalar();
// nullptr when the library was built without AVX2 or the CPU lacks it.
const KernelSet* avx2();

// Selected once from the CPU; DYNDENSE_KERNELS=scalar|avx2 overrides.
const KernelSet& active();
// Returns false if the requested set is unavailable. Accepts "auto".
bool select(std::string_view name);

}  // namespace dyndense::kernels
