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

#include <doctest.h>

#include <sstream>

#include "dyndense/error.hpp"
#include "dyndense/generators.hpp"
#include "dyndense/graph.hpp"
#include "dyndense/rng.hpp"
#include "test_util.hpp"

using namespace dyndense;
using namespace dyndense::testing;

namespace {

ErrorCode code_of(auto&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an error");
  return ErrorCode::kInvalidArgument;
}

}  // namespace

TEST_SUITE("graph_core") {

TEST_CASE("churn on a triangle") {
  DynamicGraph g(make_graph(3, {{0, 1}, {1, 2}, {0, 2}}), 1);
  const EdgeEdit rm{EditKind::kRemove, 0, 1};
  g.apply(std::span(&rm, 1));
  CHECK(g.time() == 1);
  CHECK_FALSE(g.graph().has_edge(0, 1));
  CHECK(g.graph().has_edge(1, 2));
  CHECK(g.graph().has_edge(0, 2));
  CHECK(g.mutation_log().size() == 1);

  g.apply({});
  CHECK(g.time() == 2);
  CHECK(g.graph().edge_count() == 2);
  CHECK(g.mutation_log().size() == 1);
}

TEST_CASE("churn budget and invalid edits") {
  DynamicGraph g(complete(4), 2);
  const std::vector<EdgeEdit> three = {
      {EditKind::kRemove, 0, 1}, {EditKind::kRemove, 0, 2}, {EditKind::kRemove, 0, 3}};
  CHECK(code_of([&] { g.apply(three); }) == ErrorCode::kChurnBudgetExceeded);
  CHECK(g.graph().edge_count() == 6);
  CHECK(g.time() == 0);

  const std::vector<EdgeEdit> add_present = {{EditKind::kAdd, 0, 1}};
  CHECK(code_of([&] { g.apply(add_present); }) == ErrorCode::kInvalidEdit);
  DynamicGraph p(path(3), 1);
  const std::vector<EdgeEdit> remove_absent = {{EditKind::kRemove, 0, 2}};
  CHECK(code_of([&] { p.apply(remove_absent); }) == ErrorCode::kInvalidEdit);
  const std::vector<EdgeEdit> self_loop = {{EditKind::kAdd, 1, 1}};
  CHECK(code_of([&] { p.apply(self_loop); }) == ErrorCode::kInvalidEdit);
  const std::vector<EdgeEdit> out_of_range = {{EditKind::kAdd, 1, 7}};
  CHECK(code_of([&] { p.apply(out_of_range); }) == ErrorCode::kInvalidEdit);
}

TEST_CASE("duplicate edges are rejected on construction") {
  const std::vector<Edge> e = {{0, 1}, {0, 1}};
  CHECK(code_of([&] { Graph::from_edges(2, e); }) == ErrorCode::kInvalidEdit);
}

TEST_CASE("induced density examples") {
  const Graph k4 = complete(4);
  const auto d = induced_density(k4, all(4));
  CHECK(d.density == Rational(3, 2));
  CHECK(d.edge_count == 6);

  const Graph p3 = path(3);
  CHECK(induced_density(p3, all(3)).density == Rational(2, 3));

  const Graph kp = k4_pendant();
  CHECK(induced_density(kp, all(5)).density == Rational(7, 5));

  const std::vector<NodeId> none;
  CHECK(code_of([&] { induced_density(kp, std::span<const NodeId>(none)); }) == ErrorCode::kEmptySubset);
}

TEST_CASE("density of V times n is the edge count") {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    Rng rng(seed);
    const Graph g = gnp(25, 0.2, rng).graph;
    const auto d = induced_density(g, all(g.node_count()));
    const Rational times_n(d.density.num() * 25, d.density.den());
    CHECK(times_n == Rational(static_cast<std::int64_t>(g.edge_count()), 1));
  }
}

TEST_CASE("adding edges inside S never lowers its density") {
  Rng rng(42);
  for (int trial = 0; trial < 50; ++trial) {
    Graph g = gnp(12, 0.3, rng).graph;
    std::vector<bool> s(12);
    for (std::size_t i = 0; i < 12; ++i) s[i] = rng.coin();
    s[0] = s[1] = true;
    const Rational before = induced_density(g, s).density;
    std::vector<NodeId> members = flags_to_ids(s);
    const NodeId a = members[rng.below(members.size())];
    const NodeId b = members[rng.below(members.size())];
    if (a == b || g.has_edge(a, b)) continue;
    g.add_edge(a, b);
    CHECK(induced_density(g, s).density >= before);
  }
}

TEST_CASE("symmetric difference per round stays within r") {
  Rng rng(9);
  DynamicGraph g(gnp(30, 0.2, rng).graph, 3);
  for (int t = 0; t < 100; ++t) {
    const Graph before = g.graph();
    std::vector<EdgeEdit> batch;
    for (int i = 0; i < 3; ++i) {
      const NodeId u = static_cast<NodeId>(rng.below(30));
      const NodeId v = static_cast<NodeId>(rng.below(30));
      if (u == v) continue;
      bool dup = false;
      for (const auto& e : batch) dup |= e.edge() == Edge::of(u, v);
      if (dup) continue;
      batch.push_back({g.graph().has_edge(u, v) ? EditKind::kRemove : EditKind::kAdd, u, v});
    }
    g.apply(batch);
    std::size_t diff = 0;
    for (const Edge& e : before.edges()) diff += g.graph().has_edge(e.u, e.v) ? 0 : 1;
    for (const Edge& e : g.graph().edges()) diff += before.has_edge(e.u, e.v) ? 0 : 1;
    CHECK(diff <= 3);
  }
}

TEST_CASE("edge list ingestion") {
  std::istringstream in("# header\n10 20\n20 30 # trailing\n\n30 10\n10 20\n");
  const LoadedGraph g = read_edge_list(in);
  CHECK(g.graph.node_count() == 3);
  CHECK(g.graph.edge_count() == 3);
  CHECK(g.external_ids == std::vector<std::uint64_t>{10, 20, 30});

  std::istringstream loop("1 1\n");
  CHECK(code_of([&] { read_edge_list(loop); }) == ErrorCode::kInvalidEdit);
  std::istringstream junk("1 x\n");
  CHECK(code_of([&] { read_edge_list(junk); }) == ErrorCode::kParse);

  std::ostringstream out;
  write_edge_list(out, k4_pendant());
  std::istringstream back(out.str());
  CHECK(read_edge_list(back).graph == k4_pendant());
}

TEST_CASE("content hash depends only on the edge set") {
  Graph a = path(4);
  Graph b = make_graph(4, {{2, 3}, {1, 2}, {0, 1}});
  CHECK(a.content_hash() == b.content_hash());
  b.add_edge(0, 3);
  CHECK(a.content_hash() != b.content_hash());
}

TEST_CASE("generators") {
  Rng rng(5);
  const auto pd = planted_dense(40, 10, 0.05, rng);
  CHECK(pd.planted.size() == 10);
  for (NodeId u : pd.planted) {
    for (NodeId v : pd.planted) {
      if (u != v) CHECK(pd.graph.has_edge(u, v));
    }
  }
  const auto rr = random_regular(20, 3, rng);
  for (NodeId v = 0; v < 20; ++v) CHECK(rr.graph.degree(v) == 3);
  const auto cn = clique_plus_noise(30, 12, 2, 0.1, rng);
  CHECK(cn.graph.node_count() == 30);
  CHECK(cn.planted.size() == 12);
}

}  // TEST_SUITE
