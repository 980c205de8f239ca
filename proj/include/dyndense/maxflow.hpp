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
#include <vector>

namespace dyndense {

// Dinic's algorithm on an integer-capacity network.
class MaxFlow {
 public:
  explicit MaxFlow(std::size_t nodes);

  // Adds arc u->v with capacity `cap` and a reverse arc with `rev_cap`.
  void add_arc(std::uint32_t u, std::uint32_t v, std::int64_t cap, std::int64_t rev_cap = 0);
  std::int64_t run(std::uint32_t s, std::uint32_t t);

  // After run(): nodes reachable from s in the residual network.
  std::vector<bool> source_side(std::uint32_t s) const;
  // After run(): nodes that cannot reach t in the residual network.
  std::vector<bool> maximal_source_side(std::uint32_t t) const;

 private:
  struct Arc {
    std::uint32_t to;
    std::int64_t cap;
  };

  bool bfs(std::uint32_t s, std::uint32_t t);
  std::int64_t dfs(std::uint32_t u, std::uint32_t t, std::int64_t f);

  std::size_t n_;
  std::vector<Arc> arcs_;
  std::vector<std::vector<std::uint32_t>> out_;
  std::vector<std::int32_t> level_;
  std::vector<std::size_t> it_;
};

}  // namespace dyndense
