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

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "dyndense/error.hpp"
#include "dyndense/oracle.hpp"
#include "dyndense/protocol.hpp"
#include "dyndense/scenario.hpp"

namespace fs = std::filesystem;
using namespace dyndense;

namespace {

struct Overrides {
  std::string config;
  std::optional<std::uint64_t> seed;
  bool exact = false;
  bool strict = false;
  std::optional<double> threshold_factor;
  std::string out;
};

void add_overrides(CLI::App* cmd, Overrides& o) {
  cmd->add_option("--seed", o.seed, "Global seed (overrides the config)");
  cmd->add_flag("--exact-counting", o.exact, "Flood exact (id, weight) sets instead of estimating");
  cmd->add_flag("--strict-congest", o.strict,
                "Serialize one tuple coordinate per message (l*D-round fine stage)");
  cmd->add_option("--threshold-factor", o.threshold_factor,
                  "Peeling threshold factor, multiplied by (1+eps/24) (default 1)");
  cmd->add_option("--out", o.out, "Output directory (default: config output.dir)");
}

void apply(const Overrides& o, ScenarioConfig& c) {
  if (o.seed) c.seed = *o.seed;
  if (o.exact) c.protocol.exact_counting = true;
  if (o.strict) c.protocol.strict_congest = true;
  if (o.threshold_factor) {
    if (!(*o.threshold_factor > 0)) throw Error(ErrorCode::kConfig, "--threshold-factor must be positive");
    c.protocol.threshold_factor = *o.threshold_factor;
  }
  if (!o.out.empty()) c.output.dir = o.out;
}

void print_summary(const RunReport& r, const std::string& dir) {
  std::printf("n=%zu D=%u p_cap=%u rounds=%llu families=%zu queries=%zu\n", r.n, r.D, r.p_cap,
              static_cast<unsigned long long>(r.rounds), r.families.size(), r.queries.size());
  std::printf("conditioned %zu/%zu pass, unconditioned %zu\n", r.conditioned_pass, r.conditioned,
              r.unconditioned);
  std::printf("round budget: max pass %llu, p_cap*(4D+1) = %llu, %s; padding attempts max %u cap %u\n",
              static_cast<unsigned long long>(r.budget.max_pass_length),
              static_cast<unsigned long long>(r.budget.p_cap * r.budget.level_cost),
              r.budget.pass ? "ok" : "FAIL", r.budget.max_attempts, r.budget.padding_cap);
  if (r.diameter_checked && !r.diameter_ok) {
    std::printf("warning: measured diameter exceeds D=%u; queries treated as unconditioned\n", r.D);
  }
  std::printf("event log digest %s (%llu lines)\n", r.event_digest.c_str(),
              static_cast<unsigned long long>(r.event_lines));
  if (!dir.empty()) std::printf("report written to %s\n", dir.c_str());
  std::printf("%s\n", r.pass ? "PASS" : "FAIL");
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, "cannot read " + p.string());
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

int cmd_run(const Overrides& o) {
  ScenarioConfig c = load_config(o.config);
  apply(o, c);
  const RunReport r = run_scenario(c);
  print_summary(r, c.output.dir);
  return r.pass ? 0 : 1;
}

int cmd_replay(const std::string& source, const Overrides& o) {
  const fs::path src(source);
  const fs::path report_path = fs::is_directory(src) ? src / "report.json" : src;
  const fs::path src_dir = report_path.parent_path();
  const nlohmann::json original = nlohmann::json::parse(slurp(report_path));
  ScenarioConfig c = parse_config(original.at("config"));
  c.seed = original.at("seed").get<std::uint64_t>();
  if (o.seed) c.seed = *o.seed;
  c.output.dir = o.out.empty() ? (src_dir / "replay").string() : o.out;
  const RunReport r = run_scenario(c);
  print_summary(r, c.output.dir);
  bool identical = true;
  for (const char* name : {"report.json", "events.ndjson"}) {
    const fs::path a = src_dir / name;
    const fs::path b = fs::path(c.output.dir) / name;
    if (!fs::exists(a)) continue;
    const bool same = fs::exists(b) && slurp(a) == slurp(b);
    std::printf("%s: %s\n", name, same ? "identical" : "DIFFERS");
    identical = identical && same;
  }
  return identical && r.pass ? 0 : 1;
}

int cmd_oracle(const std::string& path, std::uint32_t k, const std::string& method, double factor,
               std::uint32_t p_cap, double epsilon) {
  const Graph g = read_edge_list_file(path).graph;
  nlohmann::json out = {{"n", g.node_count()}, {"m", g.edge_count()}};
  auto emit = [&](const OracleResult& r) {
    out["method"] = std::string(to_string(r.method));
    out["density"] = {{"num", r.density.num()}, {"den", r.density.den()}};
    out["density_value"] = r.density.to_double();
    out["set"] = r.set;
    out["optimal_degree_property"] = has_optimal_degree_property(g, r.set);
  };
  if (method == "maxflow") {
    emit(exact_densest(g));
  } else if (method == "enumeration") {
    emit(exact_at_least_k(g, std::max<std::uint32_t>(k, 1)));
  } else if (method == "peel") {
    const double delta = epsilon / 24.0;
    const std::uint32_t cap = p_cap > 0 ? p_cap : default_p_cap(g.node_count(), epsilon);
    const auto levels = peel_reference(g, peel_multiplier(factor, delta), cap);
    nlohmann::json lv = nlohmann::json::array();
    for (const PeelLevel& l : levels) {
      lv.push_back({{"n", l.n}, {"m", l.m}, {"threshold", l.threshold}, {"members", flags_to_ids(l.members)}});
    }
    out["method"] = "peeling-reference";
    out["levels"] = lv;
  } else if (method == "bounds") {
    const DensityBounds b = density_bounds(g, std::max<std::uint32_t>(k, 1), 64);
    out["method"] = "bounds";
    out["lower"] = {{"num", b.lower.num()}, {"den", b.lower.den()}};
    out["upper"] = {{"num", b.upper.num()}, {"den", b.upper.den()}};
    out["lower_set"] = b.lower_set;
  } else {
    throw Error(ErrorCode::kInvalidArgument, "unknown oracle method " + method);
  }
  std::cout << out.dump(2) << '\n';
  return 0;
}

int cmd_sweep(const Overrides& o, const std::vector<double>& eps, const std::vector<std::uint32_t>& rs,
              const std::vector<std::size_t>& ns) {
  const ScenarioConfig base = load_config(o.config);
  const std::string out_dir = o.out.empty() ? (base.output.dir.empty() ? "sweep" : base.output.dir) : o.out;
  fs::create_directories(out_dir);
  std::ofstream csv(fs::path(out_dir) / "sweep.csv");
  csv << "epsilon,r,n,rounds,queries,conditioned,conditioned_pass,budget_ok,pass\n";
  const std::vector<double> e_list = eps.empty() ? std::vector<double>{base.protocol.epsilon} : eps;
  const std::vector<std::uint32_t> r_list = rs.empty() ? std::vector<std::uint32_t>{base.adversary.r} : rs;
  const std::vector<std::size_t> n_list = ns.empty() ? std::vector<std::size_t>{base.graph.n} : ns;
  bool all = true;
  for (double e : e_list) {
    for (std::uint32_t r : r_list) {
      for (std::size_t n : n_list) {
        ScenarioConfig c = base;
        apply(o, c);
        c.protocol.epsilon = e;
        c.adversary.r = r;
        if (r > 0 && c.adversary.kind == "none") c.adversary.kind = "random-churn";
        c.graph.n = n;
        char name[96];
        std::snprintf(name, sizeof name, "eps%g_r%u_n%zu", e, r, n);
        c.output.dir = (fs::path(out_dir) / name).string();
        const RunReport rep = run_scenario(c);
        csv << e << ',' << r << ',' << n << ',' << rep.rounds << ',' << rep.queries.size() << ','
            << rep.conditioned << ',' << rep.conditioned_pass << ',' << (rep.budget.pass ? 1 : 0)
            << ',' << (rep.pass ? 1 : 0) << '\n';
        std::printf("%s: %s\n", name, rep.pass ? "PASS" : "FAIL");
        all = all && rep.pass;
      }
    }
  }
  return all ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Dynamic-network densest subgraph simulator"};
  app.require_subcommand(1);

  Overrides run_o;
  auto* run = app.add_subcommand("run", "Run a scenario and score every query against the oracle");
  run->add_option("--config", run_o.config, "Scenario config (JSON)")->required()->check(CLI::ExistingFile);
  add_overrides(run, run_o);

  Overrides replay_o;
  std::string replay_src;
  auto* replay = app.add_subcommand("replay", "Re-run a recorded scenario and compare outputs byte for byte");
  replay->add_option("--replay,source", replay_src, "Report directory or report.json of the original run")
      ->required();
  replay->add_option("--seed", replay_o.seed, "Override the recorded seed");
  replay->add_option("--out", replay_o.out, "Output directory (default: <source>/replay)");

  std::string graph_path, method = "maxflow";
  std::uint32_t k = 0, p_cap = 0;
  double factor = 1.0, epsilon = 0.5;
  auto* oracle = app.add_subcommand("oracle", "Solve a graph snapshot centrally");
  oracle->add_option("--graph", graph_path, "Edge list file")->required()->check(CLI::ExistingFile);
  oracle->add_option("--method", method, "maxflow | enumeration | peel | bounds")->capture_default_str();
  oracle->add_option("--k", k, "Minimum set size (enumeration, bounds)")->capture_default_str();
  oracle->add_option("--threshold-factor", factor, "Peeling threshold factor")->capture_default_str();
  oracle->add_option("--epsilon", epsilon, "Epsilon for the peeling reference")->capture_default_str();
  oracle->add_option("--p-cap", p_cap, "Level cap for the peeling reference (0: default)");

  Overrides sweep_o;
  std::vector<double> eps;
  std::vector<std::uint32_t> rs;
  std::vector<std::size_t> ns;
  auto* sweep = app.add_subcommand("sweep", "Run a base config over a grid of epsilon, r and n");
  sweep->add_option("--config", sweep_o.config, "Base scenario config")->required()->check(CLI::ExistingFile);
  sweep->add_option("--epsilon", eps, "Epsilon values")->delimiter(',');
  sweep->add_option("--r", rs, "Churn rates")->delimiter(',');
  sweep->add_option("--n", ns, "Node counts")->delimiter(',');
  add_overrides(sweep, sweep_o);

  CLI11_PARSE(app, argc, argv);
  try {
    if (*run) return cmd_run(run_o);
    if (*replay) return cmd_replay(replay_src, replay_o);
    if (*oracle) return cmd_oracle(graph_path, k, method, factor, p_cap, epsilon);
    if (*sweep) return cmd_sweep(sweep_o, eps, rs, ns);
  } catch (const Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
  return 0;
}
