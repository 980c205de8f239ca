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

#include "dyndense/diameter.hpp"

#include <algorithm>
#include <queue>

namespace dyndense {

std::optional<std::uint32_t> static_diameter(const Graph& g) {
  const std::size_t n = g.node_count();
  if (n <= 1) return 0;
  std::uint32_t best = 0;
  std::vector<std::uint32_t> dist(n);
  std::vector<NodeId> queue(n);
  for (NodeId s = 0; s < n; ++s) {
    std::fill(dist.begin(), dist.end(), UINT32_MAX);
    dist[s] = 0;
    std::size_t head = 0;
    std::size_t tail = 0;
    queue[tail++] = s;
    while (head < tail) {
      const NodeId u = queue[head++];
      for (const NodeId v : g.neighbors(u)) {
        if (dist[v] == UINT32_MAX) {
          dist[v] = dist[u] + 1;
          queue[tail++] = v;
        }
      }
    }
    if (tail != n) return std::nullopt;
    best = std::max(best, dist[queue[tail - 1]]);
  }
  return best;
}

namespace {

// reach[v] is a bitset over sources that have informed v.
class Reach {
 public:
  explicit Reach(std::size_t n) : n_(n), words_((n + 63) / 64), bits_(n * words_, 0) {
    for (std::size_t v = 0; v < n; ++v) bits_[v * words_ + v / 64] |= 1ull << (v % 64);
  }

  void step(const Graph& g) {
    std::vector<std::uint64_t> next = bits_;
    for (NodeId v = 0; v < n_; ++v) {
      std::uint64_t* dst = &next[v * words_];
      for (const NodeId u : g.neighbors(v)) {
        const std::uint64_t* src = &bits_[u * words_];
        for (std::size_t w = 0; w < words_; ++w) dst[w] |= src[w];
      }
    }
    bits_.swap(next);
  }

  bool complete() const {
    for (std::size_t v = 0; v < n_; ++v) {
      for (std::size_t w = 0; w < words_; ++w) {
        const std::size_t hi = std::min<std::size_t>(64, n_ - w * 64);
        const std::uint64_t full = hi == 64 ? ~0ull : (1ull << hi) - 1;
        if (bits_[v * words_ + w] != full) return false;
      }
    }
    return true;
  }

 private:
  std::size_t n_;
  std::size_t words_;
  std::vector<std::uint64_t> bits_;
};

std::optional<std::uint32_t> smallest_window(const std::vector<std::optional<std::uint32_t>>& f) {
  const std::size_t L = f.size();
  for (std::uint32_t D = 1; D <= L; ++D) {
    bool ok = true;
    for (std::size_t s = 0; s + D <= L && ok; ++s) ok = f[s] && *f[s] <= D;
    if (ok) return D;
  }
  return std::nullopt;
}

}  // namespace

std::optional<std::uint32_t> flood_completion(const std::vector<Graph>& trace, std::size_t start) {
  const std::size_t n = trace.at(start).node_count();
  Reach reach(n);
  if (reach.complete()) return 0;
  for (std::size_t s = start; s < trace.size(); ++s) {
    reach.step(trace[s]);
    if (reach.complete()) return static_cast<std::uint32_t>(s - start + 1);
  }
  return std::nullopt;
}

std::optional<std::uint32_t> measure_dynamic_diameter(const std::vector<Graph>& trace) {
  if (trace.empty()) return std::nullopt;
  if (trace.size() == 1) return static_diameter(trace.front());
  std::vector<std::optional<std::uint32_t>> f(trace.size());
  for (std::size_t s = 0; s < trace.size(); ++s) f[s] = flood_completion(trace, s);
  return smallest_window(f);
}

std::optional<std::uint32_t> measure_dynamic_diameter(const Graph& initial,
                                                      const std::vector<DynamicGraph::Batch>& log,
                                                      std::uint64_t length) {
  std::vector<Graph> trace;
  trace.reserve(length);
  Graph g = initial;
  std::size_t next = 0;
  for (std::uint64_t t = 0; t < length; ++t) {
    trace.push_back(g);
    while (next < log.size() && log[next].round == t) {
      for (const EdgeEdit& e : log[next].edits) {
        if (e.kind == EditKind::kAdd) {
          g.add_edge(e.u, e.v);
        } else {
          g.remove_edge(e.u, e.v);
        }
      }
      ++next;
    }
  }
  return measure_dynamic_diameter(trace);
}

}  // namespace dyndense
