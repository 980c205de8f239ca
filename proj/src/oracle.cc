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

#include "dyndense/oracle.hpp"

#include <algorithm>
#include <bit>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <numeric>

#include <json.hpp>

#include "dyndense/error.hpp"
#include "dyndense/maxflow.hpp"
#include "dyndense/protocol.hpp"
#include "dyndense/sim.hpp"

namespace dyndense {

namespace {

using Clock = std::chrono::steady_clock;

double elapsed_ms(Clock::time_point start) {
  return std::chrono::duration<double, std::milli>(Clock::now() - start).count();
}

// Maximizes b|E(S)| - a|S| and returns the largest maximizer.
std::vector<bool> best_response(const Graph& g, std::int64_t a, std::int64_t b) {
  const std::size_t n = g.node_count();
  const std::int64_t m = static_cast<std::int64_t>(g.edge_count());
  const auto s = static_cast<std::uint32_t>(n);
  const auto t = static_cast<std::uint32_t>(n + 1);
  MaxFlow flow(n + 2);
  for (NodeId v = 0; v < n; ++v) {
    const std::int64_t d = static_cast<std::int64_t>(g.degree(v));
    flow.add_arc(s, v, b * m);
    flow.add_arc(v, t, b * m + 2 * a - b * d);
    for (NodeId u : g.neighbors(v)) {
      if (u > v) flow.add_arc(v, u, b, b);
    }
  }
  flow.run(s, t);
  std::vector<bool> side = flow.maximal_source_side(t);
  side.resize(n);
  return side;
}

// Lexicographic order of the sorted member lists of two bitmasks.
bool lex_less(std::uint32_t a, std::uint32_t b) {
  const std::uint32_t diff = a ^ b;
  if (diff == 0) return false;
  const std::uint32_t low = diff & (~diff + 1);
  if (a & low) {
    // a has the smaller element at the first differing position unless b
    // ends there.
    return (b & ~((low << 1) - 1)) != 0;
  }
  return (a & ~((low << 1) - 1)) == 0;
}

OracleResult enumerate(const Graph& g, std::uint32_t k, std::size_t limit) {
  const auto start = Clock::now();
  const std::size_t n = g.node_count();
  if (n == 0) throw Error(ErrorCode::kInvalidArgument, "empty graph");
  if (n > limit || n > 30) {
    throw Error(ErrorCode::kTooLargeForEnumeration,
                "enumeration limited to n <= " + std::to_string(std::min<std::size_t>(limit, 30)) +
                    ", got " + std::to_string(n));
  }
  if (k > n) throw Error(ErrorCode::kInvalidArgument, "k exceeds node count");
  std::vector<std::uint32_t> adj(n, 0);
  for (NodeId v = 0; v < n; ++v) {
    for (NodeId u : g.neighbors(v)) adj[v] |= 1u << u;
  }
  const std::uint32_t full = static_cast<std::uint32_t>((std::uint64_t{1} << n) - 1);
  std::vector<std::uint16_t> edges(std::size_t{full} + 1, 0);
  std::uint32_t best = 0;
  std::int64_t best_e = 0;
  std::int64_t best_s = 1;
  for (std::uint32_t mask = 1; mask != 0 && mask <= full; ++mask) {
    const int low = std::countr_zero(mask);
    const std::uint32_t rest = mask & (mask - 1);
    edges[mask] = static_cast<std::uint16_t>(edges[rest] + std::popcount(adj[low] & rest));
    const int size = std::popcount(mask);
    if (static_cast<std::uint32_t>(size) < std::max<std::uint32_t>(k, 1)) continue;
    const std::int64_t e = edges[mask];
    const std::int64_t lhs = e * best_s;
    const std::int64_t rhs = best_e * size;
    if (best == 0 || lhs > rhs || (lhs == rhs && lex_less(mask, best))) {
      best = mask;
      best_e = e;
      best_s = size;
    }
    if (mask == full) break;
  }
  OracleResult r;
  for (NodeId v = 0; v < n; ++v) {
    if (best & (1u << v)) r.set.push_back(v);
  }
  r.density = Rational(best_e, best_s);
  r.method = OracleMethod::kEnumeration;
  r.runtime_ms = elapsed_ms(start);
  return r;
}

}  // namespace

std::string_view to_string(OracleMethod m) {
  switch (m) {
    case OracleMethod::kMaxflow: return "maxflow";
    case OracleMethod::kEnumeration: return "enumeration";
    case OracleMethod::kPeelingReference: return "peeling-reference";
    case OracleMethod::kBounds: return "bounds";
  }
  return "?";
}

OracleResult exact_densest(const Graph& g) {
  const auto start = Clock::now();
  const std::size_t n = g.node_count();
  if (n == 0) throw Error(ErrorCode::kInvalidArgument, "empty graph");
  OracleResult r;
  r.method = OracleMethod::kMaxflow;
  std::vector<bool> cur(n, true);
  Rational lambda(static_cast<std::int64_t>(g.edge_count()), static_cast<std::int64_t>(n));
  if (g.edge_count() > 0) {
    for (;;) {
      std::vector<bool> s = best_response(g, lambda.num(), lambda.den());
      const std::int64_t size = std::count(s.begin(), s.end(), true);
      if (size == 0) break;
      const std::int64_t e = induced_edge_count(g, s);
      const Rational rho(e, size);
      if (rho < lambda) break;
      cur = std::move(s);
      if (rho == lambda) break;  // the largest optimum at the optimal density
      lambda = rho;
    }
  }
  r.set = flags_to_ids(cur);
  r.density = lambda;
  r.runtime_ms = elapsed_ms(start);
  return r;
}

OracleResult enumerate_densest(const Graph& g, std::size_t limit) { return enumerate(g, 1, limit); }

OracleResult exact_at_least_k(const Graph& g, std::uint32_t k, std::size_t limit) {
  return enumerate(g, k, limit);
}

std::vector<PeelLevel> peel_reference(const Graph& g, double multiplier, std::uint32_t p_cap) {
  const std::size_t n = g.node_count();
  if (n == 0) throw Error(ErrorCode::kInvalidArgument, "empty graph");
  std::vector<PeelLevel> levels;
  std::vector<bool> cur(n, true);
  for (std::uint32_t j = 0;; ++j) {
    PeelLevel level;
    level.members = cur;
    level.n = std::count(cur.begin(), cur.end(), true);
    level.m = induced_edge_count(g, cur);
    level.threshold = peel_threshold(multiplier, static_cast<double>(level.m),
                                     static_cast<double>(level.n));
    std::vector<bool> next(n, false);
    bool dropped = false;
    bool any = false;
    for (NodeId v = 0; v < n; ++v) {
      if (!cur[v]) continue;
      std::size_t d = 0;
      for (NodeId u : g.neighbors(v)) d += cur[u] ? 1 : 0;
      next[v] = static_cast<double>(d) >= level.threshold;
      dropped |= !next[v];
      any |= next[v];
    }
    levels.push_back(std::move(level));
    if (!any || !dropped || j + 1 >= p_cap) break;
    cur = std::move(next);
  }
  return levels;
}

OracleResult peel_reference_result(const Graph& g, double multiplier, std::uint32_t p_cap) {
  const auto start = Clock::now();
  const auto levels = peel_reference(g, multiplier, p_cap);
  OracleResult r;
  r.method = OracleMethod::kPeelingReference;
  r.density = Rational(-1, 1);
  for (const PeelLevel& l : levels) {
    const Rational d(l.m, l.n);
    if (d > r.density) {
      r.density = d;
      r.set = flags_to_ids(l.members);
    }
  }
  r.runtime_ms = elapsed_ms(start);
  return r;
}

bool has_optimal_degree_property(const Graph& g, const std::vector<NodeId>& set) {
  if (set.empty()) return true;
  const std::vector<bool> flags = ids_to_flags(g.node_count(), set);
  const std::int64_t e = induced_edge_count(g, flags);
  const auto s = static_cast<std::int64_t>(set.size());
  for (NodeId v : set) {
    std::int64_t d = 0;
    for (NodeId u : g.neighbors(v)) d += flags[u] ? 1 : 0;
    if (d * s < e) return false;  // deg < e/s
  }
  return true;
}

OracleResult greedy_peel(const Graph& g, std::size_t min_size) {
  const auto start = Clock::now();
  const std::size_t n = g.node_count();
  if (n == 0) throw Error(ErrorCode::kInvalidArgument, "empty graph");
  if (min_size > n) throw Error(ErrorCode::kInvalidArgument, "min_size exceeds node count");
  std::vector<std::uint32_t> deg(n);
  std::size_t max_d = 0;
  for (NodeId v = 0; v < n; ++v) {
    deg[v] = static_cast<std::uint32_t>(g.degree(v));
    max_d = std::max<std::size_t>(max_d, deg[v]);
  }
  std::vector<std::vector<NodeId>> buckets(max_d + 1);
  for (NodeId v = 0; v < n; ++v) buckets[deg[v]].push_back(v);
  std::vector<bool> removed(n, false);
  std::vector<NodeId> order;
  order.reserve(n);
  std::int64_t edges = static_cast<std::int64_t>(g.edge_count());
  std::int64_t alive = static_cast<std::int64_t>(n);
  Rational best(edges, alive);
  std::size_t best_removed = 0;
  std::size_t d = 0;
  while (alive > 0) {
    while (d < buckets.size()) {
      auto& b = buckets[d];
      while (!b.empty() && (removed[b.back()] || deg[b.back()] != d)) b.pop_back();
      if (!b.empty()) break;
      ++d;
    }
    const NodeId v = buckets[d].back();
    buckets[d].pop_back();
    removed[v] = true;
    order.push_back(v);
    edges -= deg[v];
    --alive;
    for (NodeId u : g.neighbors(v)) {
      if (removed[u]) continue;
      --deg[u];
      buckets[deg[u]].push_back(u);
      if (deg[u] < d) d = deg[u];
    }
    if (alive > 0 && static_cast<std::size_t>(alive) >= min_size) {
      const Rational cand(edges, alive);
      if (cand > best) {
        best = cand;
        best_removed = order.size();
      }
    }
  }
  std::vector<bool> keep(n, true);
  for (std::size_t i = 0; i < best_removed; ++i) keep[order[i]] = false;
  OracleResult r;
  r.set = flags_to_ids(keep);
  r.density = best;
  r.method = OracleMethod::kBounds;
  r.runtime_ms = elapsed_ms(start);
  return r;
}

DensityBounds density_bounds(const Graph& g, std::size_t min_size,
                             std::uint32_t orientation_iterations) {
  DensityBounds b;
  const OracleResult lower = greedy_peel(g, min_size);
  b.lower = lower.density;
  b.lower_set = lower.set;
  b.upper = Rational(static_cast<std::int64_t>(g.max_degree()), 2);
  if (orientation_iterations == 0 || g.edge_count() == 0) return b;
  // Frank-Wolfe on fractional orientations: any split of every edge between
  // its endpoints bounds rho* by the maximum load.
  const std::size_t n = g.node_count();
  std::vector<std::pair<NodeId, NodeId>> edges;
  edges.reserve(g.edge_count());
  for (NodeId v = 0; v < n; ++v) {
    for (NodeId u : g.neighbors(v)) {
      if (u > v) edges.emplace_back(v, u);
    }
  }
  std::vector<double> alpha(edges.size(), 0.5);  // share assigned to the first endpoint
  std::vector<double> load(n, 0.0);
  for (NodeId v = 0; v < n; ++v) load[v] = static_cast<double>(g.degree(v)) / 2.0;
  std::vector<double> next(n);
  double best = b.upper.to_double();
  for (std::uint32_t it = 0; it < orientation_iterations; ++it) {
    const double gamma = 2.0 / (it + 3.0);
    std::fill(next.begin(), next.end(), 0.0);
    for (std::size_t e = 0; e < edges.size(); ++e) {
      const auto [u, v] = edges[e];
      const double target = load[u] <= load[v] ? 1.0 : 0.0;
      alpha[e] = (1.0 - gamma) * alpha[e] + gamma * target;
      next[u] += alpha[e];
      next[v] += 1.0 - alpha[e];
    }
    load.swap(next);
    best = std::min(best, *std::max_element(load.begin(), load.end()));
  }
  // Round up onto a 2^-20 grid so the bound stays valid as a rational.
  constexpr double kGrid = 1048576.0;
  const Rational fw(static_cast<std::int64_t>(std::ceil(best * kGrid)) + 1,
                    static_cast<std::int64_t>(kGrid));
  if (fw < b.upper) b.upper = fw;
  return b;
}

std::string OracleCache::path(const Graph& g, const std::string& key) const {
  return (std::filesystem::path(dir_) / (hex64(g.content_hash()) + "-" + key + ".json")).string();
}

std::optional<OracleResult> OracleCache::get(const Graph& g, const std::string& key) const {
  if (!enabled()) return std::nullopt;
  std::ifstream in(path(g, key));
  if (!in) return std::nullopt;
  try {
    const nlohmann::json j = nlohmann::json::parse(in);
    if (j.at("n").get<std::size_t>() != g.node_count() ||
        j.at("m").get<std::size_t>() != g.edge_count()) {
      return std::nullopt;
    }
    OracleResult r;
    r.set = j.at("set").get<std::vector<NodeId>>();
    r.density = Rational(j.at("num").get<std::int64_t>(), j.at("den").get<std::int64_t>());
    const std::string method = j.at("method").get<std::string>();
    r.method = method == "enumeration" ? OracleMethod::kEnumeration : OracleMethod::kMaxflow;
    return r;
  } catch (const std::exception&) {
    return std::nullopt;
  }
}

void OracleCache::put(const Graph& g, const std::string& key, const OracleResult& r) const {
  if (!enabled()) return;
  std::error_code ec;
  std::filesystem::create_directories(dir_, ec);
  nlohmann::json j;
  j["n"] = g.node_count();
  j["m"] = g.edge_count();
  j["num"] = r.density.num();
  j["den"] = r.density.den();
  j["set"] = r.set;
  j["method"] = std::string(to_string(r.method));
  const std::string p = path(g, key);
  const std::string tmp = p + ".tmp";
  {
    std::ofstream out(tmp);
    if (!out) throw Error(ErrorCode::kIo, "cannot write oracle cache " + tmp);
    out << j.dump() << '\n';
  }
  std::filesystem::rename(tmp, p, ec);
  if (ec) throw Error(ErrorCode::kIo, "cannot write oracle cache " + p);
}

}  // namespace dyndense
