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

#include "dyndense/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <limits>

#include "dyndense/adversary.hpp"
#include "dyndense/diameter.hpp"
#include "dyndense/error.hpp"
#include "dyndense/generators.hpp"
#include "dyndense/oracle.hpp"

namespace dyndense {

namespace {

struct Built {
  Graph graph;
  std::vector<NodeId> planted;
};

Built generate(const ScenarioConfig& c, std::uint32_t D_hint, std::uint64_t attempt) {
  const GraphSpec& s = c.graph;
  Rng rng(derive_seed(c.seed, "graph", attempt));
  Built b;
  if (s.generator == "gnp") {
    b.graph = gnp(s.n, s.p, rng).graph;
  } else if (s.generator == "planted-dense" || s.generator == "clique-plus-noise") {
    std::size_t q = s.q;
    if (q == 0) {
      q = solve_planted_q(c.adversary.r, D_hint, c.protocol.epsilon, s.margin, s.solve_levels, 0);
      if (q > s.n) {
        throw Error(ErrorCode::kConfig, "graph.q: solved clique size " + std::to_string(q) +
                                            " exceeds n = " + std::to_string(s.n));
      }
    }
    GeneratedGraph g = s.generator == "planted-dense"
                           ? planted_dense(s.n, q, s.p_noise, rng)
                           : clique_plus_noise(s.n, q, s.attach, s.p_noise, rng);
    b.graph = std::move(g.graph);
    b.planted = std::move(g.planted);
  } else if (s.generator == "random-regular") {
    b.graph = random_regular(s.n, s.degree, rng).graph;
  } else if (s.generator == "file") {
    b.graph = read_edge_list_file(s.path).graph;
  } else {
    std::size_t n = s.nodes;
    for (const Edge& e : s.edges) n = std::max<std::size_t>(n, std::max(e.u, e.v) + 1);
    b.graph = Graph::from_edges(n, s.edges);
  }
  if (b.graph.node_count() == 0) throw Error(ErrorCode::kConfig, "graph: no nodes");
  return b;
}

// Random generators are resampled until connected when asked to.
Built build_graph(const ScenarioConfig& c, std::uint32_t D_hint) {
  const bool random = c.graph.generator != "file" && c.graph.generator != "edges";
  constexpr std::uint64_t kAttempts = 200;
  for (std::uint64_t attempt = 0;; ++attempt) {
    Built b = generate(c, D_hint, attempt);
    if (!random || !c.graph.connected || is_connected(b.graph)) return b;
    if (attempt + 1 == kAttempts) {
      throw Error(ErrorCode::kConfig, "graph: no connected sample in " + std::to_string(kAttempts) +
                                          " attempts; raise p or p_noise");
    }
  }
}

std::unique_ptr<Adversary> build_adversary(const ScenarioConfig& c, const Built& b) {
  const AdversarySpec& a = c.adversary;
  const std::uint64_t seed = derive_seed(c.seed, "adversary", 0);
  if (a.kind == "none") return std::make_unique<NoChurn>();
  if (a.kind == "random-churn") return std::make_unique<RandomChurn>(a.r, seed);
  if (a.kind == "targeted") {
    std::vector<NodeId> target = b.planted;
    if (target.empty()) target = greedy_peel(b.graph).set;
    return std::make_unique<TargetedAdversary>(a.r, std::move(target), seed);
  }
  if (!a.script.empty()) {
    return std::make_unique<ScriptedAdversary>(ScriptedAdversary::from_file(b.graph, a.r, a.script));
  }
  return std::make_unique<ScriptedAdversary>(ScriptedAdversary::from_json(b.graph, a.r, a.batches));
}

std::string set_hash(const std::vector<NodeId>& ids) {
  std::uint64_t h = 0x9e3779b97f4a7c15ull;
  for (NodeId v : ids) h = splitmix64(h ^ v);
  return hex64(h);
}

struct OracleAnswer {
  Rational upper;  // rho*_t (or rho*_{k,t}) or a certified upper bound
  Rational lower;  // certified lower bound of the same quantity
  std::string method;
};

OracleAnswer solve_oracle(const Graph& g, std::uint32_t k, const OracleSpec& spec,
                          const OracleCache& cache) {
  const std::size_t n = g.node_count();
  OracleAnswer a;
  if (k > n) {
    // No feasible set; the size check fails on its own.
    a.upper = a.lower = Rational(0, 1);
    a.method = "infeasible";
    return a;
  }
  if (n <= spec.enumeration_limit) {
    const std::string key = "k" + std::to_string(std::max<std::uint32_t>(k, 1));
    OracleResult r;
    if (auto hit = cache.get(g, key)) {
      r = *hit;
    } else {
      r = exact_at_least_k(g, std::max<std::uint32_t>(k, 1), spec.enumeration_limit);
      cache.put(g, key, r);
    }
    a.upper = a.lower = r.density;
    a.method = "enumeration";
    return a;
  }
  if (g.edge_count() <= spec.exact_max_edges) {
    OracleResult r;
    if (auto hit = cache.get(g, "densest")) {
      r = *hit;
    } else {
      r = exact_densest(g);
      cache.put(g, "densest", r);
    }
    a.upper = r.density;
    if (k <= 1 || r.set.size() >= k) {
      a.lower = r.density;
      a.method = "maxflow";
      return a;
    }
    a.lower = greedy_peel(g, k).density;
    a.method = "bounds";
    return a;
  }
  const DensityBounds b = density_bounds(g, std::max<std::uint32_t>(k, 1), spec.orientation_iterations);
  a.upper = b.upper;
  a.lower = b.lower;
  a.method = "bounds";
  return a;
}

}  // namespace

RunReport run_scenario(const ScenarioConfig& config) {
  ScenarioConfig c = config;
  RunReport report;
  report.config = config_to_json(config);
  report.config["output"].erase("dir");
  report.seed = c.seed;

  Built built = build_graph(c, c.auto_D ? 2 : c.protocol.D);
  const Graph initial = built.graph;
  const std::size_t n = initial.node_count();
  report.n = n;
  const double work = static_cast<double>(n) * static_cast<double>(initial.edge_count() + n);
  if (c.auto_D) {
    const auto d = static_diameter(initial);
    if (!d) throw Error(ErrorCode::kConfig, "protocol.D: graph is disconnected, no finite diameter");
    c.protocol.D = std::max<std::uint32_t>(1, *d + (c.adversary.r > 0 ? 1 : 0));
  }
  report.D = c.protocol.D;
  const std::uint32_t r = c.adversary.r;

  DynamicGraph dyn(initial, r);
  const bool measure_dynamic = c.output.check_diameter && r > 0 && n <= 400;
  dyn.set_logging(measure_dynamic);
  ProtocolRunner runner(std::move(dyn), c.protocol, c.seed, build_adversary(c, built));
  report.p_cap = runner.p_cap();

  EventLog& log = runner.sim().log();
  log.set_send_events(c.output.send_events);
  if (!c.output.dir.empty() && c.output.event_log) {
    std::filesystem::create_directories(c.output.dir);
    log.open((std::filesystem::path(c.output.dir) / "events.ndjson").string());
  }
  nlohmann::json header = {{"seed", c.seed}, {"n", n}, {"m", initial.edge_count()},
                           {"D", c.protocol.D}, {"r", r}, {"p_cap", runner.p_cap()}};
  log.write_header(header.dump());

  const OracleCache cache(c.oracle.cache_dir);
  const double eps = c.protocol.epsilon;
  const std::uint32_t k = c.k;

  runner.on_publish = [&](const FamilyView& f) {
    FamilyRecord rec;
    rec.id = f.id;
    rec.started = f.started;
    rec.published = f.published;
    rec.length = f.length();
    rec.levels = f.records;
    report.families.push_back(std::move(rec));
    if (c.queries.mode == "every-pass") runner.request_query(k);
  };
  runner.on_query = [&](const QueryOutcome& o, const Graph& g) {
    QueryRecord q;
    q.id = o.id;
    q.issued = o.issued;
    q.round = o.finished;
    q.k = o.k;
    q.no_family = o.no_family;
    q.bound = (o.k == 0 ? 2.0 : 3.0) + eps;
    if (o.no_family) {
      report.queries.push_back(std::move(q));
      return;
    }
    q.family = o.family_id;
    q.level = o.level;
    q.t_prime = o.record.computed_at;
    q.t_double_prime = o.record.edge_start;
    q.padded = o.padded;
    q.attempts = o.attempts;
    q.padding_cap_hit = o.cap_hit;
    const std::vector<NodeId> ids = o.member_ids();
    q.answer_size = ids.size();
    q.answer_hash = set_hash(ids);
    if (!ids.empty()) q.answer_density = induced_density(g, std::span<const NodeId>(ids)).density;
    const OracleAnswer oracle = solve_oracle(g, o.k, c.oracle, cache);
    q.oracle_method = oracle.method;
    q.oracle_density = oracle.upper;
    q.oracle_lower = oracle.lower;
    if (q.answer_density.num() > 0) {
      q.ratio = ratio(q.oracle_density, q.answer_density);
    } else {
      // An empty or edgeless answer is optimal only when the optimum is 0.
      q.ratio_infinite = q.oracle_density.num() > 0;
      q.ratio = Rational(1, 1);
    }
    q.T = std::max(o.finished - o.record.edge_start, o.pass_length + (o.finished - o.issued));
    const double base = 24.0 * static_cast<double>(q.T) * r / eps;
    q.precondition_threshold = o.k == 0 ? base : base / o.k;
    q.conditioned = q.oracle_lower.to_double() >= q.precondition_threshold;
    q.size_ok = q.answer_size >= o.k;
    const double delta = c.protocol.delta();
    q.size_bound = (o.record.n + (o.padded ? o.upper : 0.0)) / (1.0 - delta);
    q.size_bound_ok = o.cap_hit || static_cast<double>(q.answer_size) <= q.size_bound;
    q.ratio_ok = !q.ratio_infinite &&
                 static_cast<long double>(q.ratio.num()) <=
                     static_cast<long double>(q.bound) * static_cast<long double>(q.ratio.den());
    q.pass = q.size_ok && q.ratio_ok;
    report.queries.push_back(std::move(q));
  };

  std::uint64_t max_rounds = c.run.max_rounds;
  if (max_rounds == 0) {
    if (c.run.rounds > 0) {
      max_rounds = c.run.rounds;
    } else if (c.protocol.strict_congest) {
      max_rounds = std::numeric_limits<std::uint64_t>::max();
    } else {
      const std::uint64_t pass = static_cast<std::uint64_t>(runner.p_cap()) * level_round_cost(c.protocol.D);
      max_rounds = (c.run.passes + 2) * (pass + 2ull * c.protocol.D * runner.padding_cap()) + 64;
    }
  }
  std::size_t next_scheduled = 0;
  std::vector<std::uint64_t> scheduled = c.queries.rounds;
  std::sort(scheduled.begin(), scheduled.end());
  if (c.queries.initial) runner.request_query(k);
  for (;;) {
    const std::uint64_t t = runner.round();
    if (c.run.rounds > 0 && t >= c.run.rounds) break;
    if (c.run.rounds == 0 && report.families.size() >= c.run.passes && !runner.query_busy()) break;
    if (t >= max_rounds) break;
    if (c.queries.mode == "rounds") {
      while (next_scheduled < scheduled.size() && scheduled[next_scheduled] <= t) {
        runner.request_query(k);
        ++next_scheduled;
      }
    }
    runner.step();
  }
  report.rounds = runner.round();

  // The counting stages assume D bounds the dynamic diameter.
  if (c.output.check_diameter) {
    if (r == 0 && work <= 2e8) {
      report.diameter_checked = true;
      report.measured_diameter = static_diameter(initial);
    } else if (measure_dynamic) {
      report.diameter_checked = true;
      report.measured_diameter = measure_dynamic_diameter(
          initial, runner.sim().dynamic_graph().mutation_log(), report.rounds + 1);
    }
    if (report.diameter_checked) {
      report.diameter_ok = report.measured_diameter.has_value() &&
                           std::max<std::uint32_t>(1, *report.measured_diameter) <= c.protocol.D;
    }
  }

  std::map<Channel, double> bounds;
  const double bound_bits =
      c.output.bandwidth_factor * std::ceil(std::log2(std::max<double>(2.0, static_cast<double>(n))));
  for (std::size_t i = 0; i < kChannelCount; ++i) bounds[static_cast<Channel>(i)] = bound_bits;
  report.bandwidth = assert_bandwidth(runner.sim().ledger(), bounds);

  report.budget = check_round_budget(report, c.protocol);
  report.budget.padding_cap = runner.padding_cap();
  for (const QueryRecord& q : report.queries) {
    report.budget.max_attempts = std::max(report.budget.max_attempts, q.attempts);
    if (q.attempts > runner.padding_cap()) report.budget.padding_ok = false;
  }
  report.budget.pass = report.budget.pass_length_ok && report.budget.pass_identity_ok &&
                       report.budget.padding_ok;

  for (QueryRecord& q : report.queries) {
    if (q.no_family) continue;
    if (!q.size_bound_ok) ++report.size_bound_violations;
    if (!report.diameter_ok) q.conditioned = false;
    if (q.conditioned) {
      ++report.conditioned;
      if (q.pass) ++report.conditioned_pass;
    } else {
      ++report.unconditioned;
    }
  }
  report.guarantees_pass = report.conditioned_pass == report.conditioned;
  report.pass = report.guarantees_pass && report.budget.pass;

  log.flush();
  report.event_digest = hex64(log.digest());
  report.event_lines = log.line_count();
  if (!c.output.dir.empty()) emit_report(report, c.output.dir, c.output.series);
  return report;
}

RoundBudget check_round_budget(const RunReport& report, const ProtocolParams& params) {
  RoundBudget b;
  b.p_cap = report.p_cap;
  b.level_cost = level_round_cost(report.D);
  for (const FamilyRecord& f : report.families) {
    b.max_pass_length = std::max(b.max_pass_length, f.length);
    // Strict mode stretches the counting stages to l*D rounds, so the
    // per-level identity does not apply.
    if (params.strict_congest) continue;
    if (f.length > b.p_cap * b.level_cost) b.pass_length_ok = false;
    if (f.length != f.levels.size() * b.level_cost) b.pass_identity_ok = false;
  }
  b.pass = b.pass_length_ok && b.pass_identity_ok;
  return b;
}

}  // namespace dyndense
