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

#include <vector>

#include "dyndense/graph.hpp"

namespace dyndense::testing {

inline Graph make_graph(std::size_t n, std::initializer_list<std::pair<NodeId, NodeId>> edges) {
  std::vector<Edge> e;
  for (auto [u, v] : edges) e.push_back(Edge::of(u, v));
  return Graph::from_edges(n, e);
}

inline Graph complete(std::size_t n) {
  std::vector<Edge> e;
  for (NodeId u = 0; u < n; ++u) {
    for (NodeId v = u + 1; v < n; ++v) e.push_back(Edge{u, v});
  }
  return Graph::from_edges(n, e);
}

inline Graph path(std::size_t n) {
  std::vector<Edge> e;
  for (NodeId u = 0; u + 1 < n; ++u) e.push_back(Edge{u, u + 1});
  return Graph::from_edges(n, e);
}

inline Graph star(std::size_t leaves) {
  std::vector<Edge> e;
  for (NodeId v = 1; v <= leaves; ++v) e.push_back(Edge{0, v});
  return Graph::from_edges(leaves + 1, e);
}

// K4 on 0..3 plus node 4 attached to node 3.
inline Graph k4_pendant() {
  return make_graph(5, {{0, 1}, {0, 2}, {0, 3}, {1, 2}, {1, 3}, {2, 3}, {3, 4}});
}

inline std::vector<bool> all(std::size_t n) { return std::vector<bool>(n, true); }

}  // namespace dyndense::testing
