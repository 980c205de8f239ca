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
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "dyndense/rational.hpp"

namespace dyndense {

using NodeId = std::uint32_t;

// Undirected edge, always stored with u < v.
struct Edge {
  NodeId u = 0;
  NodeId v = 0;

  static Edge of(NodeId a, NodeId b) { return a < b ? Edge{a, b} : Edge{b, a}; }
  friend auto operator<=>(const Edge&, const Edge&) = default;
};

enum class EditKind : std::uint8_t { kAdd, kRemove };

struct EdgeEdit {
  EditKind kind = EditKind::kAdd;
  NodeId u = 0;
  NodeId v = 0;

  Edge edge() const { return Edge::of(u, v); }
  friend bool operator==(const EdgeEdit&, const EdgeEdit&) = default;
};

// Simple undirected graph over the fixed node set 0..n-1 with sorted
// adjacency lists.
class Graph {
 public:
  Graph() = default;
  explicit Graph(std::size_t node_count);

  // Throws kInvalidEdit on self-loops, out-of-range ids or repeated edges.
  static Graph from_edges(std::size_t node_count, std::span<const Edge> edges);

  std::size_t node_count() const noexcept { return adj_.size(); }
  std::size_t edge_count() const noexcept { return edge_count_; }
  std::size_t degree(NodeId v) const { return adj_[v].size(); }
  std::span<const NodeId> neighbors(NodeId v) const { return adj_[v]; }
  bool has_edge(NodeId u, NodeId v) const;

  void add_edge(NodeId u, NodeId v);
  void remove_edge(NodeId u, NodeId v);

  std::vector<Edge> edges() const;
  std::size_t max_degree() const;
  // Content hash over (n, sorted edge list); stable across runs.
  std::uint64_t content_hash() const;

  friend bool operator==(const Graph& a, const Graph& b) { return a.adj_ == b.adj_; }

 private:
  void check_pair(NodeId u, NodeId v) const;

  std::vector<std::vector<NodeId>> adj_;
  std::size_t edge_count_ = 0;
};

struct SubsetDensity {
  std::vector<NodeId> members;  // sorted
  std::int64_t edge_count = 0;
  Rational density;
};

// Exact density |E(S)|/|S| of the induced subgraph. Throws kEmptySubset.
SubsetDensity induced_density(const Graph& g, std::span<const NodeId> subset);
// Same, with the subset given as per-node flags.
SubsetDensity induced_density(const Graph& g, const std::vector<bool>& flags);
std::int64_t induced_edge_count(const Graph& g, const std::vector<bool>& flags);

std::vector<NodeId> flags_to_ids(const std::vector<bool>& flags);
std::vector<bool> ids_to_flags(std::size_t n, std::span<const NodeId> ids);

// A graph that only changes through adversary batches of at most r edits.
class DynamicGraph {
 public:
  struct Batch {
    std::uint64_t round = 0;
    std::vector<EdgeEdit> edits;
  };

  DynamicGraph() = default;
  DynamicGraph(Graph initial, std::uint32_t churn_rate);

  const Graph& graph() const noexcept { return graph_; }
  std::uint64_t time() const noexcept { return time_; }
  std::uint32_t churn_rate() const noexcept { return churn_rate_; }

  // G_{t+1} = (G_t \ removals) + additions. Empty batches are logged too,
  // only non-empty ones are kept in the mutation log.
  void apply(std::span<const EdgeEdit> batch);

  const std::vector<Batch>& mutation_log() const noexcept { return log_; }
  std::span<const EdgeEdit> last_batch() const noexcept { return last_; }
  void set_logging(bool enabled) noexcept { logging_ = enabled; }

 private:
  Graph graph_;
  std::uint64_t time_ = 0;
  std::uint32_t churn_rate_ = 0;
  bool logging_ = true;
  std::vector<EdgeEdit> last_;
  std::vector<Batch> log_;
};

// Throws kChurnBudgetExceeded / kInvalidEdit without modifying anything.
void validate_batch(const Graph& g, std::span<const EdgeEdit> batch, std::uint32_t churn_rate);

DynamicGraph apply_churn(DynamicGraph g, std::span<const EdgeEdit> batch);

// Edge-list text: one "u v" pair per line, '#' starts a comment. External
// integer ids are mapped densely in ascending order.
struct LoadedGraph {
  Graph graph;
  std::vector<std::uint64_t> external_ids;  // dense id -> external id
};
LoadedGraph read_edge_list(std::istream& in);
LoadedGraph read_edge_list_file(const std::string& path);
void write_edge_list(std::ostream& out, const Graph& g);

}  // namespace dyndense
