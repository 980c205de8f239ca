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

#include <filesystem>

#include "dyndense/error.hpp"
#include "dyndense/generators.hpp"
#include "dyndense/oracle.hpp"
#include "dyndense/protocol.hpp"
#include "test_util.hpp"

using namespace dyndense;
using namespace dyndense::testing;

namespace {

// Independent brute force over bitmasks: best density among sets of size >= k.
Rational brute(const Graph& g, std::size_t k = 1) {
  const std::size_t n = g.node_count();
  const auto edges = g.edges();
  Rational best(0, 1);
  for (std::uint32_t mask = 1; mask < (1u << n); ++mask) {
    const auto size = static_cast<std::size_t>(__builtin_popcount(mask));
    if (size < k) continue;
    std::int64_t m = 0;
    for (const Edge& e : edges) m += (mask >> e.u & 1) && (mask >> e.v & 1);
    const Rational d(m, static_cast<std::int64_t>(size));
    if (d > best) best = d;
  }
  return best;
}

Graph two_triangles() { return make_graph(6, {{0, 1}, {1, 2}, {0, 2}, {3, 4}, {4, 5}, {3, 5}, {2, 3}}); }

Graph random_graph(Rng& rng, std::size_t n) {
  switch (rng.below(3)) {
    case 0: return gnp(n, 0.1 + 0.5 * rng.uniform(), rng).graph;
    case 1: return planted_dense(n, 2 + rng.below(n / 2), 0.2, rng).graph;
    default: return clique_plus_noise(n, 3 + rng.below(n / 3), 2, 0.2, rng).graph;
  }
}

}  // namespace

TEST_SUITE("oracle") {

TEST_CASE("exact densest examples") {
  const auto k5 = exact_densest(complete(5));
  CHECK(k5.density == Rational(2, 1));
  CHECK(k5.set == std::vector<NodeId>{0, 1, 2, 3, 4});
  CHECK(k5.method == OracleMethod::kMaxflow);

  const auto kp = exact_densest(k4_pendant());
  CHECK(kp.density == Rational(3, 2));
  CHECK(kp.set == std::vector<NodeId>{0, 1, 2, 3});

  // The bridge edge makes the whole graph (7/6) denser than either triangle.
  const auto tt = exact_densest(two_triangles());
  CHECK(tt.density == Rational(7, 6));
  CHECK(tt.density == brute(two_triangles()));
  CHECK(tt.set.size() == 6);
  const auto te = enumerate_densest(two_triangles());
  CHECK(te.density == Rational(7, 6));
  CHECK(induced_density(two_triangles(), std::vector<NodeId>{0, 1, 2}).density == Rational(1, 1));
  CHECK(te.method == OracleMethod::kEnumeration);

  CHECK(exact_densest(Graph(3)).density == Rational(0, 1));
}

TEST_CASE("at least k") {
  CHECK(exact_at_least_k(k4_pendant(), 5).density == Rational(7, 5));
  CHECK(exact_at_least_k(k4_pendant(), 5).set.size() == 5);
  CHECK(exact_at_least_k(k4_pendant(), 4).density == Rational(3, 2));
  CHECK(exact_at_least_k(k4_pendant(), 1).density == exact_densest(k4_pendant()).density);
  try {
    exact_at_least_k(complete(25), 3);
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kTooLargeForEnumeration);
  }
}

TEST_CASE("solvers agree with brute force") {
  Rng rng(12);
  for (int i = 0; i < 40; ++i) {
    const Graph g = random_graph(rng, 6 + rng.below(9));
    const Rational truth = brute(g);
    const auto flow = exact_densest(g);
    const auto en = enumerate_densest(g);
    CHECK(flow.density == truth);
    CHECK(en.density == truth);
    CHECK(induced_density(g, flow.set).density == truth);
    CHECK(induced_density(g, en.set).density == truth);
    CHECK(has_optimal_degree_property(g, flow.set));
    CHECK(has_optimal_degree_property(g, en.set));
    Rational prev(g.node_count(), 1);
    for (std::uint32_t k = 1; k <= g.node_count(); ++k) {
      const auto r = exact_at_least_k(g, k);
      CHECK(r.density == brute(g, k));
      CHECK(r.set.size() >= k);
      CHECK(r.density <= prev);
      prev = r.density;
    }
  }
}

TEST_CASE("no subset beats the optimum") {
  Rng rng(13);
  for (int i = 0; i < 5; ++i) {
    const Graph g = random_graph(rng, 40);
    const auto best = exact_densest(g);
    CHECK(has_optimal_degree_property(g, best.set));
    for (int s = 0; s < 10000; ++s) {
      std::vector<bool> flags(40);
      bool any = false;
      for (auto&& f : flags) any |= (f = rng.coin());
      if (!any) continue;
      CHECK(induced_density(g, flags).density <= best.density);
    }
  }
}

TEST_CASE("maximal optimum on ties") {
  // Two disjoint K4s: the flow solver reports the union, enumeration the first.
  std::vector<Edge> e;
  for (NodeId b : {0u, 4u}) {
    for (NodeId u = 0; u < 4; ++u) {
      for (NodeId v = u + 1; v < 4; ++v) e.push_back(Edge{b + u, b + v});
    }
  }
  const Graph g = Graph::from_edges(8, e);
  CHECK(exact_densest(g).set.size() == 8);
  CHECK(enumerate_densest(g).set == std::vector<NodeId>{0, 1, 2, 3});
}

TEST_CASE("peel reference examples") {
  const double mult = peel_multiplier(1.0, 0.01);
  const Graph tp = make_graph(4, {{0, 1}, {0, 2}, {1, 2}, {2, 3}});
  const auto levels = peel_reference(tp, mult, 50);
  REQUIRE(levels.size() == 2);
  CHECK(levels[0].members == all(4));
  CHECK(levels[1].members == std::vector<bool>{true, true, true, false});
  CHECK(levels[0].threshold == doctest::Approx(1.01));

  const auto st = peel_reference(star(5), mult, 50);
  REQUIRE(st.size() == 1);
  CHECK(st[0].threshold == doctest::Approx(1.01 * 5 / 6));

  for (double f : {1.0, 1.5, 2.0}) {
    const auto k5 = peel_reference(complete(5), f, 50);
    REQUIRE(k5.size() == 1);  // fixed point after level 0
    CHECK(k5[0].members == all(5));
  }
  CHECK(peel_reference_result(k4_pendant(), mult, 50).density == Rational(3, 2));
  CHECK(peel_reference(complete(5), 2.0, 1).size() == 1);
}

TEST_CASE("literal threshold can stall far from the optimum") {
  // K12 hanging off a 300-cycle: every degree clears (1+d) m/n, so level 0
  // is a fixed point and the reported density is close to 1.
  std::vector<Edge> e;
  for (NodeId u = 0; u < 12; ++u) {
    for (NodeId v = u + 1; v < 12; ++v) e.push_back(Edge{u, v});
  }
  for (NodeId i = 0; i < 300; ++i) e.push_back(Edge::of(12 + i, 12 + (i + 1) % 300));
  e.push_back(Edge{0, 12});
  const Graph g = Graph::from_edges(312, e);
  const double delta = 0.5 / 24;
  const auto levels = peel_reference(g, peel_multiplier(1.0, delta), 1000);
  CHECK(levels.size() == 1);
  const Rational best = exact_densest(g).density;
  CHECK(best == Rational(11, 2));
  const Rational got = peel_reference_result(g, peel_multiplier(1.0, delta), 1000).density;
  CHECK(got.to_double() * 2.5 < best.to_double());
  // The factor-2 variant recovers the clique.
  CHECK(peel_reference_result(g, peel_multiplier(2.0, delta), 1000).density == best);
}

TEST_CASE("bounds bracket the optimum") {
  Rng rng(14);
  for (int i = 0; i < 20; ++i) {
    const Graph g = random_graph(rng, 30 + rng.below(30));
    const auto exact = exact_densest(g).density;
    const auto b = density_bounds(g);
    CHECK(b.lower <= exact);
    CHECK(exact <= b.upper);
    CHECK(induced_density(g, b.lower_set).density == b.lower);
    // Greedy peeling is a 2-approximation.
    CHECK(Rational(2 * b.lower.num(), b.lower.den()) >= exact);
    const auto gk = greedy_peel(g, 10);
    CHECK(gk.set.size() >= 10);
  }
}

TEST_CASE("disk cache round trip") {
  const auto dir = std::filesystem::temp_directory_path() / "dyndense_oracle_cache_test";
  std::filesystem::remove_all(dir);
  OracleCache cache(dir.string());
  const Graph g = k4_pendant();
  CHECK(!cache.get(g, "densest"));
  cache.put(g, "densest", exact_densest(g));
  const auto hit = cache.get(g, "densest");
  REQUIRE(hit);
  CHECK(hit->density == Rational(3, 2));
  CHECK(hit->set == std::vector<NodeId>{0, 1, 2, 3});
  CHECK(!cache.get(complete(4), "densest"));
  CHECK(!cache.get(g, "k=2"));
  std::filesystem::remove_all(dir);
}

}  // TEST_SUITE
