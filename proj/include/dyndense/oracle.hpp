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

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "dyndense/graph.hpp"
#include "dyndense/rational.hpp"

namespace dyndense {

enum class OracleMethod : std::uint8_t { kMaxflow, kEnumeration, kPeelingReference, kBounds };
std::string_view to_string(OracleMethod m);

struct OracleResult {
  std::vector<NodeId> set;  // sorted
  Rational density;
  OracleMethod method = OracleMethod::kMaxflow;
  double runtime_ms = 0;  // informational, never part of a deterministic report
};

inline constexpr std::size_t kDefaultEnumerationLimit = 20;

// Exact densest subgraph via min cuts (Dinkelbach iteration on the Goldberg
// network). Reports the maximal densest set, i.e. the union of all optima.
OracleResult exact_densest(const Graph& g);

// Exhaustive search; ties go to the lexicographically smallest sorted set.
// Throws kTooLargeForEnumeration when n exceeds `limit`.
OracleResult enumerate_densest(const Graph& g, std::size_t limit = kDefaultEnumerationLimit);
OracleResult exact_at_least_k(const Graph& g, std::uint32_t k,
                              std::size_t limit = kDefaultEnumerationLimit);

struct PeelLevel {
  std::vector<bool> members;
  std::int64_t n = 0;
  std::int64_t m = 0;
  double threshold = 0;  // applied to produce the next level
};

// Centralized replay of one pass of the distributed peeling with the same
// stop rules: the pass ends before a level that is empty, equal to its
// predecessor, or has index p_cap.
std::vector<PeelLevel> peel_reference(const Graph& g, double multiplier, std::uint32_t p_cap);
// The densest level of peel_reference as an oracle result.
OracleResult peel_reference_result(const Graph& g, double multiplier, std::uint32_t p_cap);

// Every member has induced degree at least the set's density.
bool has_optimal_degree_property(const Graph& g, const std::vector<NodeId>& set);

// Certified bracket for rho* on graphs too large for an exact solve. The
// lower bound comes with a witness set; the upper bound is the smaller of
// max-degree/2 and a fractional edge-orientation load.
struct DensityBounds {
  Rational lower;
  std::vector<NodeId> lower_set;
  Rational upper;
};
// Min-degree greedy peeling; returns its densest prefix with at least
// `min_size` nodes.
OracleResult greedy_peel(const Graph& g, std::size_t min_size = 1);
DensityBounds density_bounds(const Graph& g, std::size_t min_size = 1,
                             std::uint32_t orientation_iterations = 0);

// Content-addressed disk cache for exact answers.
class OracleCache {
 public:
  explicit OracleCache(std::string dir) : dir_(std::move(dir)) {}
  bool enabled() const { return !dir_.empty(); }
  std::optional<OracleResult> get(const Graph& g, const std::string& key) const;
  void put(const Graph& g, const std::string& key, const OracleResult& r) const;

 private:
  std::string path(const Graph& g, const std::string& key) const;
  std::string dir_;
};

}  // namespace dyndense
