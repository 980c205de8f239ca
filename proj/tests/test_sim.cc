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

#include <functional>

#include "dyndense/adversary.hpp"
#include "dyndense/diameter.hpp"
#include "dyndense/error.hpp"
#include "dyndense/generators.hpp"
#include "dyndense/protocol.hpp"
#include "dyndense/sim.hpp"
#include "test_util.hpp"

using namespace dyndense;
using namespace dyndense::testing;

namespace {

// Scripted handler: `send` decides what to stage, `heard` collects inboxes.
class Probe final : public NodeProgram {
 public:
  std::function<void(NodeContext&, RoundMessage&)> send;
  std::vector<std::pair<std::uint64_t, NodeId>> heard;  // (round, sender)
  std::vector<std::string> payloads;

  void step(NodeContext& ctx, RoundMessage& out) override {
    ctx.inbox().for_each([&](NodeId u, const RoundMessage& m) {
      heard.emplace_back(ctx.round(), u);
      for (const Part& p : m.parts) {
        if (const auto* b = std::get_if<BytesPayload>(&p.payload)) payloads.push_back(b->bytes);
      }
    });
    if (send) send(ctx, out);
  }
};

Probe& probe(Simulator& sim, NodeId v) { return static_cast<Probe&>(sim.program(v)); }

std::unique_ptr<Simulator> make_sim(const Graph& g, std::uint32_t r = 0,
                                    std::unique_ptr<Adversary> adv = nullptr) {
  auto sim = std::make_unique<Simulator>(DynamicGraph(g, r), SimOptions{99, false});
  for (NodeId v = 0; v < g.node_count(); ++v) sim->set_program(v, std::make_unique<Probe>());
  if (adv) sim->set_adversary(std::move(adv));
  return sim;
}

}  // namespace

TEST_SUITE("net_sim") {

TEST_CASE("a broadcast reaches the neighbour in the next compute phase") {
  auto sim_owner = make_sim(path(2));
  Simulator& sim = *sim_owner;
  probe(sim, 0).send = [](NodeContext& ctx, RoundMessage& out) {
    if (ctx.round() == 0) out.add(Channel::kUser, BytesPayload{"x"});
  };
  sim.run_round();
  CHECK(probe(sim, 1).payloads.empty());
  sim.compute();
  REQUIRE(probe(sim, 1).payloads.size() == 1);
  CHECK(probe(sim, 1).payloads[0] == "x");
  CHECK(probe(sim, 1).heard[0] == std::make_pair(std::uint64_t{1}, NodeId{0}));
  CHECK(probe(sim, 0).payloads.empty());
}

TEST_CASE("an isolated broadcaster reaches nobody") {
  auto sim_owner = make_sim(make_graph(3, {{1, 2}}));
  Simulator& sim = *sim_owner;
  probe(sim, 0).send = [](NodeContext&, RoundMessage& out) { out.add(Channel::kUser, BytesPayload{"x"}); };
  sim.run(3);
  sim.compute();
  for (NodeId v = 0; v < 3; ++v) CHECK(probe(sim, v).heard.empty());
  CHECK(sim.ledger().total_deliveries() == 0);
}

TEST_CASE("sends use the round-start topology") {
  // Edge 0-1 is removed and edge 1-2 added by the churn of round 0.
  const Graph g = make_graph(3, {{0, 1}});
  nlohmann::json script = {{"batches", {{{"round", 0}, {"edits", {{"remove", 0, 1}, {"add", 1, 2}}}}}}};
  auto sim_owner = make_sim(g, 2, std::make_unique<ScriptedAdversary>(ScriptedAdversary::from_json(g, 2, script)));
  Simulator& sim = *sim_owner;
  for (NodeId v : {0u, 2u}) {
    probe(sim, v).send = [](NodeContext&, RoundMessage& out) { out.add(Channel::kUser, BytesPayload{"x"}); };
  }
  sim.run_round();  // round 0 sends travel over 0-1
  sim.run_round();  // round 1 sends travel over 1-2
  sim.compute();
  const auto& heard = probe(sim, 1).heard;
  REQUIRE(heard.size() == 2);
  CHECK(heard[0] == std::make_pair(std::uint64_t{1}, NodeId{0}));
  CHECK(heard[1] == std::make_pair(std::uint64_t{2}, NodeId{2}));
}

TEST_CASE("phases run in order") {
  auto sim_owner = make_sim(path(2));
  Simulator& sim = *sim_owner;
  CHECK_THROWS_AS(sim.deliver(), Error);
  CHECK_THROWS_AS(sim.churn(), Error);
  sim.compute();
  CHECK_THROWS_AS(sim.compute(), Error);
  sim.deliver();
  sim.churn();
  CHECK(sim.round() == 1);
  CHECK(sim.next_phase() == Phase::kCompute);
}

TEST_CASE("handler panics carry node, round and seed") {
  auto sim_owner = make_sim(path(3));
  Simulator& sim = *sim_owner;
  probe(sim, 2).send = [](NodeContext& ctx, RoundMessage&) {
    if (ctx.round() == 1) throw std::runtime_error("boom");
  };
  sim.run_round();
  try {
    sim.compute();
    FAIL("expected a panic");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kHandlerPanic);
    const std::string what = e.what();
    CHECK(what.find("node 2") != std::string::npos);
    CHECK(what.find("round 1") != std::string::npos);
    CHECK(what.find("99") != std::string::npos);
  }
}

TEST_CASE("flood examples") {
  const std::vector<NodeId> end = {0};
  auto count = [](const std::vector<bool>& r) { return std::count(r.begin(), r.end(), true); };
  CHECK(count(flood(DynamicGraph(path(5), 0), nullptr, end, 4)) == 5);
  CHECK(count(flood(DynamicGraph(path(5), 0), nullptr, end, 2)) == 3);
  CHECK(count(flood(DynamicGraph(star(6), 0), nullptr, end, 1)) == 7);

  // Edge {0,1} exists on even rounds only.
  std::vector<Graph> trace;
  for (int t = 0; t < 8; ++t) trace.push_back(t % 2 == 0 ? path(2) : Graph(2));
  const std::vector<NodeId> one = {1};
  CHECK(count(flood_trace(trace, end, 2)) == 2);
  CHECK(count(flood_trace(trace, one, 2)) == 2);
}

TEST_CASE("bandwidth ledger") {
  auto sim_owner = make_sim(complete(3));
  Simulator& sim = *sim_owner;
  for (NodeId v = 0; v < 3; ++v) {
    probe(sim, v).send = [](NodeContext&, RoundMessage& out) {
      out.add(Channel::kMembership, BitPayload{true});
      out.add(Channel::kUser, BytesPayload{"abc"});
    };
  }
  sim.run(4);
  const BandwidthLedger& l = sim.ledger();
  CHECK(l.stats(Channel::kMembership).deliveries == 4 * 6);
  CHECK(l.stats(Channel::kMembership).max_bits == 1);
  CHECK(l.stats(Channel::kUser).max_bits == 24);
  CHECK(l.max_edge_bits() == 25);
  CHECK(l.total_bits() == 4 * 6 * 25);

  const auto ok = assert_bandwidth(l, {{Channel::kUser, 24.0}});
  CHECK(ok.pass);
  const auto bad = assert_bandwidth(l, {{Channel::kUser, 8.0}, {Channel::kMembership, 8.0}});
  CHECK_FALSE(bad.pass);
  bool user_violation = false;
  for (const auto& row : bad.rows) {
    if (row.channel == Channel::kUser) {
      REQUIRE(row.violations.size() == 1);
      CHECK(row.violations[0] == std::make_pair(std::uint32_t{24}, std::uint64_t{24}));
      user_violation = true;
    }
  }
  CHECK(user_violation);

  auto quiet_owner = make_sim(complete(3));
  Simulator& quiet = *quiet_owner;
  quiet.run(3);
  const auto q = assert_bandwidth(quiet.ledger(), {{Channel::kUser, 1.0}});
  CHECK(q.pass);
  CHECK(quiet.ledger().max_edge_bits() == 0);
}

TEST_CASE("detail ledger entries add up to the totals") {
  Simulator sim(DynamicGraph(path(4), 0), SimOptions{1, true});
  for (NodeId v = 0; v < 4; ++v) {
    auto p = std::make_unique<Probe>();
    p->send = [v](NodeContext& ctx, RoundMessage& out) {
      if ((ctx.round() + v) % 2 == 0) out.add(Channel::kUser, BytesPayload(std::string(v + 1, 'z')));
    };
    sim.set_program(v, std::move(p));
  }
  sim.run(6);
  std::uint64_t sum = 0;
  std::uint32_t max = 0;
  for (const auto& e : sim.ledger().entries()) {
    sum += e.bits;
    max = std::max(max, e.bits);
  }
  CHECK(sum == sim.ledger().total_bits());
  CHECK(max == sim.ledger().max_edge_bits());
}

TEST_CASE("event logs are deterministic in the seed") {
  auto digest = [](std::uint64_t seed) {
    Rng rng(5);
    const Graph g = gnp(30, 0.4, rng).graph;
    ProtocolParams p;
    p.D = 4;
    p.max_tuple_length = 32;
    ProtocolRunner run(DynamicGraph(g, 2), p, seed, std::make_unique<RandomChurn>(2, seed));
    run.run(60);
    return run.sim().log().digest();
  };
  CHECK(digest(1) == digest(1));
  CHECK(digest(1) != digest(2));
}

TEST_CASE("node output depends only on local inputs") {
  // Two paths that differ only at the far end: node 0 cannot tell them apart
  // for the first rounds, so its staged messages must be identical.
  const Graph a = path(8);
  Graph b = path(8);
  b.add_edge(5, 7);
  ProtocolParams p;
  p.D = 7;
  p.max_tuple_length = 16;
  ProtocolRunner ra(DynamicGraph(a, 0), p, 3, nullptr);
  ProtocolRunner rb(DynamicGraph(b, 0), p, 3, nullptr);
  for (int t = 0; t < 4; ++t) {
    ra.sim().compute();
    rb.sim().compute();
    const RoundMessage& ma = ra.sim().staged(0);
    const RoundMessage& mb = rb.sim().staged(0);
    REQUIRE(ma.parts.size() == mb.parts.size());
    for (std::size_t i = 0; i < ma.parts.size(); ++i) {
      CHECK(part_hash(ma.parts[i]) == part_hash(mb.parts[i]));
    }
    ra.sim().deliver();
    rb.sim().deliver();
    ra.sim().churn();
    rb.sim().churn();
  }
}

}  // TEST_SUITE

TEST_SUITE("diameter") {

TEST_CASE("static traces give the static diameter") {
  CHECK(measure_dynamic_diameter(std::vector<Graph>{path(5)}) == 4u);
  CHECK(measure_dynamic_diameter(std::vector<Graph>{complete(6)}) == 1u);
  CHECK(static_diameter(path(5)) == 4u);
  CHECK_FALSE(static_diameter(make_graph(3, {{0, 1}})).has_value());
  Rng rng(3);
  for (int i = 0; i < 10; ++i) {
    const Graph g = gnp(20, 0.25, rng).graph;
    const auto d = static_diameter(g);
    if (!d) continue;
    std::vector<Graph> trace(3 * *d + 3, g);
    CHECK(measure_dynamic_diameter(trace) == d);
  }
}

TEST_CASE("alternating edge has dynamic diameter 2") {
  std::vector<Graph> trace;
  for (int t = 0; t < 12; ++t) trace.push_back(t % 2 == 0 ? path(2) : Graph(2));
  CHECK(measure_dynamic_diameter(trace) == 2u);
}

TEST_CASE("never-connected pairs give the infinite sentinel") {
  std::vector<Graph> trace(6, make_graph(3, {{0, 1}}));
  CHECK_FALSE(measure_dynamic_diameter(trace).has_value());
}

TEST_CASE("log-based measurement matches the materialised trace") {
  Rng rng(8);
  const Graph g = gnp(15, 0.3, rng).graph;
  DynamicGraph dg(g, 2);
  RandomChurn adv(2, 4);
  std::vector<Graph> trace = {g};
  for (int t = 0; t < 30; ++t) {
    dg.apply(adv.next_batch(dg.graph(), t));
    trace.push_back(dg.graph());
  }
  CHECK(measure_dynamic_diameter(g, dg.mutation_log(), trace.size()) == measure_dynamic_diameter(trace));
}

}  // TEST_SUITE

TEST_SUITE("adversary") {

TEST_CASE("scripted schedules are validated on load") {
  const Graph g = path(4);
  nlohmann::json ok = {{"batches", {{{"round", 2}, {"edits", {{"add", 0, 3}, {"remove", 1, 2}}}}}}};
  ScriptedAdversary s = ScriptedAdversary::from_json(g, 2, ok);
  CHECK(s.next_batch(g, 0).empty());
  CHECK(s.next_batch(g, 2).size() == 2);

  nlohmann::json noop = {{"batches", {{{"round", 0}, {"edits", {{"remove", 0, 2}}}}}}};
  CHECK_THROWS_AS(ScriptedAdversary::from_json(g, 2, noop), Error);
  nlohmann::json later_noop = {{"batches",
                                {{{"round", 0}, {"edits", {{"remove", 0, 1}}}},
                                 {{"round", 3}, {"edits", {{"remove", 0, 1}}}}}}};
  CHECK_THROWS_AS(ScriptedAdversary::from_json(g, 2, later_noop), Error);
  nlohmann::json over = {{"batches", {{{"round", 0}, {"edits", {{"add", 0, 2}, {"add", 0, 3}, {"add", 1, 3}}}}}}};
  CHECK_THROWS_AS(ScriptedAdversary::from_json(g, 2, over), Error);
  nlohmann::json unknown = {{"batches", nlohmann::json::array()}, {"extra", 1}};
  CHECK_THROWS_AS(ScriptedAdversary::from_json(g, 2, unknown), Error);
  nlohmann::json bad_op = {{"batches", {{{"round", 0}, {"edits", {{"flip", 0, 2}}}}}}};
  CHECK_THROWS_AS(ScriptedAdversary::from_json(g, 2, bad_op), Error);
}

TEST_CASE("random churn spends at most r legal edits") {
  Rng rng(1);
  DynamicGraph g(gnp(20, 0.3, rng).graph, 4);
  RandomChurn adv(4, 17);
  for (int t = 0; t < 200; ++t) {
    const auto batch = adv.next_batch(g.graph(), t);
    CHECK(batch.size() <= 4);
    g.apply(batch);  // throws on any illegal edit
  }
}

TEST_CASE("targeted churn concentrates deletions inside the target") {
  const Graph g = complete(12);
  std::vector<NodeId> target = {0, 1, 2, 3, 4, 5};
  TargetedAdversary adv(4, target, 5);
  DynamicGraph dg(g, 4);
  std::size_t inside = 0, total = 0;
  // The target has 15 edges, so stop before they run out.
  for (int t = 0; t < 3; ++t) {
    const auto batch = adv.next_batch(dg.graph(), t);
    for (const auto& e : batch) {
      if (e.kind == EditKind::kRemove) {
        ++total;
        inside += (e.u < 6 && e.v < 6) ? 1 : 0;
      }
    }
    dg.apply(batch);
  }
  CHECK(total > 0);
  CHECK(inside * 2 > total);
}

}  // TEST_SUITE
