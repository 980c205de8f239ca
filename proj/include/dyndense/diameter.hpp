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
#include <vector>

#include "dyndense/graph.hpp"

namespace dyndense {

// Eccentricity-based diameter; nullopt if disconnected. 0 for n <= 1.
std::optional<std::uint32_t> static_diameter(const Graph& g);

// Rounds a simultaneous flood from every node needs to inform everyone when
// started on snapshot `start`, using trace[start], trace[start+1], ...; a
// message sent in step s uses trace[s]. nullopt if the trace ends first.
std::optional<std::uint32_t> flood_completion(const std::vector<Graph>& trace, std::size_t start);

// Smallest D such that every window start s <= L-D floods every node to
// every node within D steps over trace[s..s+D-1]. A single-snapshot trace is
// treated as static. nullopt (the "infinite" sentinel) when no D <= L works.
std::optional<std::uint32_t> measure_dynamic_diameter(const std::vector<Graph>& trace);

// Same, from an initial graph and a mutation log, without materialising
// every snapshot. `length` is the number of snapshots G_0..G_{length-1}.
std::optional<std::uint32_t> measure_dynamic_diameter(const Graph& initial,
                                                      const std::vector<DynamicGraph::Batch>& log,
                                                      std::uint64_t length);

}  // namespace dyndense
