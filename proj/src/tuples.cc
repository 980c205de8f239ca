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

#include <bit>
#include <cmath>
#include <cstring>

#include "dyndense/rng.hpp"
#include "dyndense/tuples.hpp"

namespace dyndense {
namespace {

std::uint64_t hash_words(const void* data, std::size_t bytes, std::uint64_t seed) {
  const auto* p = static_cast<const unsigned char*>(data);
  std::uint64_t h = splitmix64(seed ^ bytes);
  std::size_t i = 0;
  for (; i + 8 <= bytes; i += 8) {
    std::uint64_t w;
    std::memcpy(&w, p + i, 8);
    h = splitmix64(h ^ w);
  }
  std::uint64_t tail = 0;
  std::memcpy(&tail, p + i, bytes - i);
  return splitmix64(h ^ tail);
}

}  // namespace

void GeoTuple::seal() {
  hash = hash_words(x.data(), x.size(), 0x67656f);
  bits = 0;
  for (const std::uint8_t v : x) bits += v == 0 ? 1 : static_cast<std::uint32_t>(std::bit_width(v));
}

void ExpTuple::seal() { hash = hash_words(z.data(), z.size() * sizeof(double), 0x657870); }

bool ExpTuple::empty() const { return z.empty() || std::isinf(z[0]); }

void WeightSet::seal() {
  hash = hash_words(w.data(), w.size() * sizeof(std::uint32_t), 0x776774);
  support = 0;
  max_weight = 0;
  total = 0;
  for (const std::uint32_t v : w) {
    if (v == 0) continue;
    ++support;
    total += v;
    if (v > max_weight) max_weight = v;
  }
}

}  // namespace dyndense
