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

#include <cstdlib>
#include <string>

#include "dyndense/kernels.hpp"

namespace dyndense::kernels {

#if defined(DYNDENSE_WITH_AVX2)
const KernelSet& avx2_impl();
#endif

const KernelSet* avx2() {
#if defined(DYNDENSE_WITH_AVX2)
  static const bool ok = __builtin_cpu_supports("avx2");
  return ok ? &avx2_impl() : nullptr;
#else
  return nullptr;
#endif
}

namespace {

const KernelSet* pick(std::string_view name) {
  if (name == "scalar") return &scalar();
  if (name == "avx2") return avx2();
  if (name == "auto" || name.empty()) {
    const KernelSet* k = avx2();
    return k != nullptr ? k : &scalar();
  }
  return nullptr;
}

const KernelSet*& current() {
  static const KernelSet* k = [] {
    const char* env = std::getenv("DYNDENSE_KERNELS");
    const KernelSet* chosen = pick(env != nullptr ? std::string_view(env) : "auto");
    return chosen != nullptr ? chosen : pick("auto");
  }();
  return k;
}

}  // namespace

const KernelSet& active() { return *current(); }

bool select(std::string_view name) {
  const KernelSet* k = pick(name);
  if (k == nullptr) return false;
  current() = k;
  return true;
}

}  // namespace dyndense::kernels
