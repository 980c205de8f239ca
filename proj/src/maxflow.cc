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

#include "dyndense/maxflow.hpp"

#include <algorithm>
#include <limits>

namespace dyndense {

MaxFlow::MaxFlow(std::size_t nodes) : n_(nodes), out_(nodes), level_(nodes), it_(nodes) {}

void MaxFlow::add_arc(std::uint32_t u, std::uint32_t v, std::int64_t cap, std::int64_t rev_cap) {
  out_[u].push_back(static_cast<std::uint32_t>(arcs_.size()));
  arcs_.push_back(Arc{v, cap});
  out_[v].push_back(static_cast<std::uint32_t>(arcs_.size()));
  arcs_.push_back(Arc{u, rev_cap});
}

bool MaxFlow::bfs(std::uint32_t s, std::uint32_t t) {
  std::fill(level_.begin(), level_.end(), -1);
  std::vector<std::uint32_t> queue{s};
  level_[s] = 0;
  for (std::size_t h = 0; h < queue.size(); ++h) {
    const std::uint32_t u = queue[h];
    for (std::uint32_t a : out_[u]) {
      const Arc& arc = arcs_[a];
      if (arc.cap > 0 && level_[arc.to] < 0) {
        level_[arc.to] = level_[u] + 1;
        queue.push_back(arc.to);
      }
    }
  }
  return level_[t] >= 0;
}

std::int64_t MaxFlow::dfs(std::uint32_t u, std::uint32_t t, std::int64_t f) {
  if (u == t) return f;
  for (std::size_t& i = it_[u]; i < out_[u].size(); ++i) {
    const std::uint32_t a = out_[u][i];
    Arc& arc = arcs_[a];
    if (arc.cap <= 0 || level_[arc.to] != level_[u] + 1) continue;
    const std::int64_t pushed = dfs(arc.to, t, std::min(f, arc.cap));
    if (pushed > 0) {
      arc.cap -= pushed;
      arcs_[a ^ 1u].cap += pushed;
      return pushed;
    }
  }
  return 0;
}

std::int64_t MaxFlow::run(std::uint32_t s, std::uint32_t t) {
  std::int64_t flow = 0;
  while (bfs(s, t)) {
    std::fill(it_.begin(), it_.end(), 0);
    while (const std::int64_t f = dfs(s, t, std::numeric_limits<std::int64_t>::max())) flow += f;
  }
  return flow;
}

std::vector<bool> MaxFlow::source_side(std::uint32_t s) const {
  std::vector<bool> seen(n_, false);
  std::vector<std::uint32_t> stack{s};
  seen[s] = true;
  while (!stack.empty()) {
    const std::uint32_t u = stack.back();
    stack.pop_back();
    for (std::uint32_t a : out_[u]) {
      const Arc& arc = arcs_[a];
      if (arc.cap > 0 && !seen[arc.to]) {
        seen[arc.to] = true;
        stack.push_back(arc.to);
      }
    }
  }
  return seen;
}

std::vector<bool> MaxFlow::maximal_source_side(std::uint32_t t) const {
  // u reaches t iff some arc u->w has residual capacity and w reaches t;
  // walk residual arcs backwards from t.
  std::vector<bool> reaches(n_, false);
  std::vector<std::uint32_t> stack{t};
  reaches[t] = true;
  while (!stack.empty()) {
    const std::uint32_t w = stack.back();
    stack.pop_back();
    for (std::uint32_t a : out_[w]) {
      // Arc a goes w->u; its twin a^1 goes u->w.
      const std::uint32_t u = arcs_[a].to;
      if (arcs_[a ^ 1u].cap > 0 && !reaches[u]) {
        reaches[u] = true;
        stack.push_back(u);
      }
    }
  }
  std::vector<bool> side(n_);
  for (std::size_t i = 0; i < n_; ++i) side[i] = !reaches[i];
  return side;
}

}  // namespace dyndense
