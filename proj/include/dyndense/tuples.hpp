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
#include <memory>
#include <unordered_map>
#include <vector>

namespace dyndense {

// Estimator payloads. They are immutable once shared; merges write into a
// scratch copy and are re-interned, so identical contents across nodes
// collapse to one object and converged floods compare by pointer.

// Per-coordinate maximum toss counts. 0 marks "no member contributed".
struct GeoTuple {
  std::vector<std::uint8_t> x;
  std::uint64_t hash = 0;
  std::uint32_t bits = 0;  // sum of bit lengths of the coordinates

  void seal();
  bool empty() const { return x.empty() || x[0] == 0; }
};

// Per-coordinate minimum of exponential variables. +inf marks non-members.
struct ExpTuple {
  std::vector<double> z;
  std::uint64_t hash = 0;

  void seal();
  bool empty() const;
};

// Exact-counting payload: the set of (id, weight) pairs seen so far, stored
// densely by id (weight 0 means absent). Merge is element-wise max, which
// is a set union because a node's weight is fixed during one stage.
struct WeightSet {
  std::vector<std::uint32_t> w;
  std::uint64_t hash = 0;
  std::uint32_t support = 0;
  std::uint32_t max_weight = 0;
  std::uint64_t total = 0;

  void seal();
  bool empty() const { return support == 0; }
};

using GeoRef = std::shared_ptr<const GeoTuple>;
using ExpRef = std::shared_ptr<const ExpTuple>;
using WeightRef = std::shared_ptr<const WeightSet>;

// Content-addressed pool. Dropping an entry never changes results, it only
// costs a later comparison, so pruning is purely a memory policy.
template <typename T>
class TuplePool {
 public:
  std::shared_ptr<const T> intern(T&& value) {
    value.seal();
    auto& bucket = map_[value.hash];
    for (const auto& existing : bucket) {
      if (same(*existing, value)) return existing;
    }
    auto ref = std::make_shared<const T>(std::move(value));
    bucket.push_back(ref);
    if (++size_ > prune_at_) prune();
    return ref;
  }

  std::size_t size() const { return size_; }

 private:
  static bool same(const T& a, const T& b);

  void prune() {
    size_ = 0;
    for (auto it = map_.begin(); it != map_.end();) {
      auto& bucket = it->second;
      std::erase_if(bucket, [](const auto& ref) { return ref.use_count() == 1; });
      size_ += bucket.size();
      it = bucket.empty() ? map_.erase(it) : std::next(it);
    }
    prune_at_ = std::max<std::size_t>(4096, 2 * size_);
  }

  std::unordered_map<std::uint64_t, std::vector<std::shared_ptr<const T>>> map_;
  std::size_t size_ = 0;
  std::size_t prune_at_ = 4096;
};

template <>
inline bool TuplePool<GeoTuple>::same(const GeoTuple& a, const GeoTuple& b) {
  return a.x == b.x;
}
template <>
inline bool TuplePool<ExpTuple>::same(const ExpTuple& a, const ExpTuple& b) {
  return a.z == b.z;
}
template <>
inline bool TuplePool<WeightSet>::same(const WeightSet& a, const WeightSet& b) {
  return a.w == b.w;
}

struct Pools {
  TuplePool<GeoTuple> geo;
  TuplePool<ExpTuple> exp;
  TuplePool<WeightSet> weights;
};

}  // namespace dyndense
