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

#include <cmath>

#include "dyndense/error.hpp"
#include "dyndense/generators.hpp"
#include "dyndense/diameter.hpp"
#include "dyndense/oracle.hpp"
#include "dyndense/protocol.hpp"
#include "test_util.hpp"

using namespace dyndense;
using namespace dyndense::testing;

namespace {

// Triangle 0-1-2 with node 3 hanging off node 2.
Graph triangle_pendant() { return make_graph(4, {{0, 1}, {0, 2}, {1, 2}, {2, 3}}); }

ProtocolParams exact_params(double epsilon, std::uint32_t D) {
  ProtocolParams p;
  p.epsilon = epsilon;
  p.D = D;
  p.exact_counting = true;
  return p;
}

const FamilyView& first_family(ProtocolRunner& run, std::uint64_t limit = 100000) {
  for (std::uint64_t i = 0; i < limit && run.families().empty(); ++i) run.step();
  REQUIRE(!run.families().empty());
  return run.families().front();
}

const QueryOutcome& answer(ProtocolRunner& run, std::uint32_t k, std::uint64_t limit = 100000) {
  const std::size_t before = run.queries().size();
  run.request_query(k);
  for (std::uint64_t i = 0; i < limit && run.queries().size() == before; ++i) run.step();
  REQUIRE(run.queries().size() == before + 1);
  return run.queries().back();
}

// K_50 on 0..49 with 150 leaves hanging off node 0.
Graph clique_with_leaves() {
  std::vector<Edge> e;
  for (NodeId u = 0; u < 50; ++u) {
    for (NodeId v = u + 1; v < 50; ++v) e.push_back(Edge{u, v});
  }
  for (NodeId v = 50; v < 200; ++v) e.push_back(Edge{0, v});
  return Graph::from_edges(200, e);
}

}  // namespace

TEST_SUITE("protocol") {

TEST_CASE("level cost") {
  CHECK(level_round_cost(3) == 13);
  CHECK(level_round_cost(1) == 5);
  CHECK(default_padding_cap(200) == 43);
  CHECK(default_p_cap(100, 0.5) == static_cast<std::uint32_t>(std::ceil(std::log(100.0) / std::log1p(0.5 / 24))) + 1);
}

TEST_CASE("select_level") {
  CHECK(select_level({{4, 4}, {3, 3}}, 5) == 0);
  CHECK(select_level({{6, 4}, {5, 3}}, 0) == 1);
  // Equal ratios keep the smaller index.
  CHECK(select_level({{2, 2}, {1, 1}}, 0) == 0);
  CHECK_THROWS_AS(select_level({}, 0), Error);
}

TEST_CASE("triangle plus pendant drops the pendant") {
  ProtocolRunner run(DynamicGraph(triangle_pendant(), 0), exact_params(0.24, 2), 1, nullptr);
  const FamilyView& f = first_family(run);
  REQUIRE(f.records.size() == 2);
  CHECK(f.records[0].m == 4);
  CHECK(f.records[0].n == 4);
  CHECK(f.records[1].m == 3);
  CHECK(f.records[1].n == 3);
  CHECK(f.levels[0] == all(4));
  CHECK(f.levels[1] == std::vector<bool>{true, true, true, false});
}

TEST_CASE("star is a fixed point") {
  ProtocolRunner run(DynamicGraph(star(5), 0), exact_params(0.24, 2), 1, nullptr);
  const FamilyView& f = first_family(run);
  REQUIRE(f.records.size() == 1);
  CHECK(f.records[0].m == 5);
  CHECK(f.records[0].n == 6);
  CHECK(f.levels[0] == all(6));
}

TEST_CASE("pass length is levels times 4D+1") {
  for (std::uint32_t D : {2u, 3u, 5u}) {
    ProtocolRunner run(DynamicGraph(triangle_pendant(), 0), exact_params(0.24, D), 1, nullptr);
    run.run(1);
    while (run.families().size() < 3) run.step();
    for (const auto& f : run.families()) {
      CHECK(f.length() == f.records.size() * level_round_cost(D));
    }
    for (auto len : run.level_lengths()) CHECK(len == level_round_cost(D));
  }
}

TEST_CASE("empty level restarts from the full node set") {
  // Threshold factor 3 empties K4 after level 0 (degree 3 < 3 * 1.5).
  ProtocolParams p = exact_params(0.24, 1);
  p.threshold_factor = 3;
  ProtocolRunner run(DynamicGraph(complete(4), 0), p, 1, nullptr);
  run.run(200);
  REQUIRE(run.families().size() >= 2);
  for (const auto& f : run.families()) {
    REQUIRE(f.records.size() == 1);
    CHECK(f.records[0].n == 4);
    CHECK(f.levels[0] == all(4));
  }
}

TEST_CASE("query before the first family") {
  ProtocolRunner run(DynamicGraph(path(4), 0), exact_params(0.5, 3), 1, nullptr);
  const QueryOutcome& q = answer(run, 0);
  CHECK(q.no_family);
  CHECK(q.finished == 0);
  CHECK_THROWS_AS(run.membership(0, q.id), Error);
  try {
    run.membership(0, q.id);
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kUnknownSnapshot);
  }
  try {
    run.membership(0, 999);
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kUnknownSnapshot);
  }
}

TEST_CASE("k=0 answers the densest level without padding") {
  ProtocolRunner run(DynamicGraph(k4_pendant(), 0), exact_params(0.24, 2), 3, nullptr);
  first_family(run);
  const QueryOutcome& q = answer(run, 0);
  CHECK(!q.no_family);
  CHECK(!q.padded);
  CHECK(q.attempts == 0);
  CHECK(q.member_ids() == std::vector<NodeId>{0, 1, 2, 3});
  for (NodeId v = 0; v < 4; ++v) CHECK(run.membership(v, q.id));
  CHECK(!run.membership(4, q.id));
}

TEST_CASE("large enough level needs no padding") {
  ProtocolRunner run(DynamicGraph(k4_pendant(), 0), exact_params(0.24, 2), 3, nullptr);
  first_family(run);
  // n_0 = 5 >= 1.01 * 4; level 1 has ratio 6/4 > 7/5, n_1 = 4 < 4.04 -> padded.
  const QueryOutcome& q = answer(run, 4);
  CHECK(q.level == 1);
  CHECK(q.padded);
  const QueryOutcome& q2 = answer(run, 2);
  CHECK(!q2.padded);
  CHECK(q2.level == 1);
}

TEST_CASE("padding reaches k in calibrated mode") {
  const Graph g = clique_with_leaves();
  ProtocolParams p = exact_params(0.24, 2);
  ProtocolRunner run(DynamicGraph(g, 0), p, 17, nullptr);
  const FamilyView& f = first_family(run);
  REQUIRE(f.records.size() == 2);
  CHECK(f.records[1].n == 50);
  for (int rep = 0; rep < 5; ++rep) {
    const QueryOutcome& q = answer(run, 100);
    CHECK(q.level == 1);
    CHECK(q.padded);
    CHECK(q.Delta == doctest::Approx(51));
    CHECK(q.attempts >= 1);
    CHECK(q.attempts <= run.padding_cap());
    CHECK(!q.cap_hit);
    const auto ids = q.member_ids();
    CHECK(ids.size() >= 100);
    // Clique members are in V_i; padded leaves are members too.
    for (NodeId v = 0; v < 50; ++v) CHECK(run.membership(v, q.id));
    std::size_t padded = 0;
    for (NodeId v = 50; v < 200; ++v) padded += run.membership(v, q.id);
    CHECK(padded == ids.size() - 50);
    CHECK(static_cast<double>(padded) >= q.lower);
    CHECK(static_cast<double>(padded) <= q.upper);
  }
}

TEST_CASE("literal padding window and cap") {
  const Graph g = clique_with_leaves();
  ProtocolParams p = exact_params(0.24, 2);
  p.padding_mode = PaddingMode::kLiteral;
  ProtocolRunner run(DynamicGraph(g, 0), p, 5, nullptr);
  first_family(run);
  const QueryOutcome& q = answer(run, 100);
  CHECK(q.padded);
  CHECK(q.lower == doctest::Approx(51.51));
  CHECK(q.upper == doctest::Approx(52.02));
  CHECK(q.attempts <= run.padding_cap());
  CHECK(q.attempts == q.estimates.size());
  if (q.cap_hit) {
    CHECK(q.attempts == run.padding_cap());
  } else {
    CHECK(q.estimates.back() == 52);
  }
}

TEST_CASE("level sets are nested and match the centralized peel") {
  Rng rng(3);
  int compared = 0;
  for (int i = 0; i < 12; ++i) {
    const Graph g = i % 2 ? gnp(24, 0.25, rng).graph : planted_dense(24, 8, 0.15, rng).graph;
    const auto d = static_diameter(g);
    if (!d) continue;
    const ProtocolParams p = exact_params(0.5, *d);
    ProtocolRunner run(DynamicGraph(g, 0), p, i, nullptr);
    const FamilyView& f = first_family(run);
    const auto ref = peel_reference(g, peel_multiplier(1.0, p.delta()), run.p_cap());
    REQUIRE(ref.size() == f.levels.size());
    for (std::size_t l = 0; l < ref.size(); ++l) {
      CHECK(ref[l].members == f.levels[l]);
      CHECK(ref[l].n == f.records[l].n);
      CHECK(ref[l].m == f.records[l].m);
      if (l > 0) {
        for (NodeId v = 0; v < g.node_count(); ++v) {
          if (f.levels[l][v]) CHECK(f.levels[l - 1][v]);
        }
      }
    }
    ++compared;
  }
  CHECK(compared >= 6);
}

TEST_CASE("estimated counts agree across nodes and stay nested") {
  Rng rng(8);
  const Graph g = planted_dense(40, 12, 0.1, rng).graph;
  const auto d = static_diameter(g);
  REQUIRE(d);
  ProtocolParams p;
  p.epsilon = 1.0;
  p.D = *d;
  p.counting_epsilon = 0.3;
  p.max_tuple_length = 256;
  ProtocolRunner run(DynamicGraph(g, 0), p, 99, nullptr);
  run.run(2000);
  REQUIRE(!run.families().empty());
  for (const auto& f : run.families()) {
    for (std::size_t l = 1; l < f.levels.size(); ++l) {
      for (NodeId v = 0; v < g.node_count(); ++v) {
        if (f.levels[l][v]) CHECK(f.levels[l - 1][v]);
      }
    }
    CHECK(f.records.size() <= run.p_cap());
  }
}

}  // TEST_SUITE
