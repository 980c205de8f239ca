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

#include "dyndense/generators.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "dyndense/error.hpp"

namespace dyndense {
namespace {

void check_p(double p) {
  if (!(p >= 0 && p <= 1)) throw Error(ErrorCode::kInvalidArgument, "edge probability outside [0,1]");
}

std::vector<NodeId> random_subset(std::size_t n, std::size_t q, Rng& rng) {
  std::vector<NodeId> ids(n);
  std::iota(ids.begin(), ids.end(), 0);
  for (std::size_t i = 0; i < q; ++i) {
    const std::size_t j = i + rng.below(n - i);
    std::swap(ids[i], ids[j]);
  }
  ids.resize(q);
  std::sort(ids.begin(), ids.end());
  return ids;
}

// Geometric skipping over the pair sequence, so sparse graphs cost O(m).
template <typename F>
void for_each_random_pair(std::size_t n, double p, Rng& rng, F&& f) {
  if (p <= 0 || n < 2) return;
  const std::uint64_t total = static_cast<std::uint64_t>(n) * (n - 1) / 2;
  if (p >= 1) {
    for (NodeId u = 0; u < n; ++u) {
      for (NodeId v = u + 1; v < n; ++v) f(u, v);
    }
    return;
  }
  const double log_q = std::log1p(-p);
  std::uint64_t idx = 0;
  NodeId u = 0;
  std::uint64_t row_start = 0;  // pair index of (u, u+1)
  for (;;) {
    const double skip = std::floor(std::log(rng.uniform_open0()) / log_q);
    if (skip >= static_cast<double>(total - idx)) return;
    idx += static_cast<std::uint64_t>(skip);
    while (idx >= row_start + (n - 1 - u)) {
      row_start += n - 1 - u;
      ++u;
    }
    f(u, static_cast<NodeId>(u + 1 + (idx - row_start)));
    ++idx;
    if (idx >= total) return;
  }
}

}  // namespace

GeneratedGraph gnp(std::size_t n, double p, Rng& rng) {
  check_p(p);
  std::vector<Edge> edges;
  for_each_random_pair(n, p, rng, [&](NodeId u, NodeId v) { edges.push_back({u, v}); });
  return {Graph::from_edges(n, edges), {}};
}

GeneratedGraph planted_dense(std::size_t n, std::size_t q, double p_noise, Rng& rng) {
  check_p(p_noise);
  if (q > n) throw Error(ErrorCode::kInvalidArgument, "clique larger than graph");
  GeneratedGraph out{Graph(n), random_subset(n, q, rng)};
  std::vector<Edge> edges;
  edges.reserve(q * (q - (q > 0 ? 1 : 0)) / 2);
  for (std::size_t i = 0; i < q; ++i) {
    for (std::size_t j = i + 1; j < q; ++j) edges.push_back({out.planted[i], out.planted[j]});
  }
  std::vector<bool> in = ids_to_flags(n, out.planted);
  for_each_random_pair(n, p_noise, rng, [&](NodeId u, NodeId v) {
    if (!(in[u] && in[v])) edges.push_back({u, v});
  });
  out.graph = Graph::from_edges(n, edges);
  return out;
}

GeneratedGraph clique_plus_noise(std::size_t n, std::size_t q, std::size_t attach,
                                 double p_outside, Rng& rng) {
  check_p(p_outside);
  if (q > n || (attach > q && n > q)) {
    throw Error(ErrorCode::kInvalidArgument, "clique_plus_noise: bad sizes");
  }
  GeneratedGraph out{Graph(n), random_subset(n, q, rng)};
  const auto& core = out.planted;
  std::vector<Edge> edges;
  for (std::size_t i = 0; i < q; ++i) {
    for (std::size_t j = i + 1; j < q; ++j) edges.push_back({core[i], core[j]});
  }
  std::vector<bool> in = ids_to_flags(n, core);
  std::vector<NodeId> outside;
  for (NodeId v = 0; v < n; ++v) {
    if (!in[v]) outside.push_back(v);
  }
  for (const NodeId v : outside) {
    for (const NodeId idx : random_subset(q, attach, rng)) edges.push_back(Edge::of(v, core[idx]));
  }
  for_each_random_pair(outside.size(), p_outside, rng,
                       [&](NodeId a, NodeId b) { edges.push_back(Edge::of(outside[a], outside[b])); });
  out.graph = Graph::from_edges(n, edges);
  return out;
}

GeneratedGraph random_regular(std::size_t n, std::size_t d, Rng& rng) {
  if (d >= n || (n * d) % 2 != 0) {
    throw Error(ErrorCode::kInvalidArgument, "no d-regular graph on n nodes");
  }
  // Circulant start, then degree-preserving double-edge swaps. The pairing
  // model rejects almost every draw once d is above 6 or so.
  Graph g(n);
  for (NodeId v = 0; v < n; ++v) {
    for (std::size_t j = 1; j <= d / 2; ++j) {
      const auto u = static_cast<NodeId>((v + j) % n);
      if (!g.has_edge(v, u)) g.add_edge(v, u);
    }
    if (d % 2 == 1 && v < n / 2) g.add_edge(v, static_cast<NodeId>(v + n / 2));
  }
  std::vector<Edge> edges = g.edges();
  const std::size_t swaps = 10 * edges.size();
  for (std::size_t s = 0; s < swaps; ++s) {
    const std::size_t i = rng.below(edges.size());
    const std::size_t j = rng.below(edges.size());
    if (i == j) continue;
    NodeId a = edges[i].u, b = edges[i].v, c = edges[j].u, e = edges[j].v;
    if (rng.coin()) std::swap(c, e);
    // a-b, c-e  ->  a-c, b-e
    if (a == c || b == e || a == e || b == c) continue;
    if (g.has_edge(a, c) || g.has_edge(b, e)) continue;
    g.remove_edge(a, b);
    g.remove_edge(c, e);
    g.add_edge(a, c);
    g.add_edge(b, e);
    edges[i] = Edge::of(a, c);
    edges[j] = Edge::of(b, e);
  }
  return {std::move(g), {}};
}

std::size_t solve_planted_q(std::uint32_t r, std::uint32_t D, double epsilon, double margin,
                            std::uint32_t levels, std::uint32_t query_rounds) {
  const double T = static_cast<double>(levels) * (4.0 * D + 1.0) + query_rounds;
  const double rho = margin * 24.0 * T * r / epsilon;
  return static_cast<std::size_t>(std::ceil(2.0 * rho)) + 1;
}

bool is_connected(const Graph& g) {
  const std::size_t n = g.node_count();
  if (n <= 1) return true;
  std::vector<bool> seen(n, false);
  std::vector<NodeId> stack{0};
  seen[0] = true;
  std::size_t count = 1;
  while (!stack.empty()) {
    const NodeId u = stack.back();
    stack.pop_back();
    for (const NodeId v : g.neighbors(u)) {
      if (!seen[v]) {
        seen[v] = true;
        ++count;
        stack.push_back(v);
      }
    }
  }
  return count == n;
}

}  // namespace dyndense
