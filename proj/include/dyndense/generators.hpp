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

#include "dyndense/graph.hpp"
#include "dyndense/rng.hpp"

namespace dyndense {

struct GeneratedGraph {
  Graph graph;
  std::vector<NodeId> planted;  // dense core when the generator plants one
};

// Erdos-Renyi G(n, p).
GeneratedGraph gnp(std::size_t n, double p, Rng& rng);
// K_q on a random q-subset embedded in a G(n, p_noise) background.
GeneratedGraph planted_dense(std::size_t n, std::size_t q, double p_noise, Rng& rng);
// K_q plus n-q outside nodes, each attached to `attach` random clique nodes,
// with G(n-q, p_outside) among the outside nodes.
GeneratedGraph clique_plus_noise(std::size_t n, std::size_t q, std::size_t attach,
                                 double p_outside, Rng& rng);
// Uniform-ish d-regular graph via the pairing model with restarts.
GeneratedGraph random_regular(std::size_t n, std::size_t d, Rng& rng);

// Clique size whose density (q-1)/2 reaches margin * 24 T r / eps, where
// T = levels * (4D+1) + query_rounds is the expected pass-plus-query length.
std::size_t solve_planted_q(std::uint32_t r, std::uint32_t D, double epsilon, double margin,
                            std::uint32_t levels, std::uint32_t query_rounds);

bool is_connected(const Graph& g);

}  // namespace dyndense
