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

#include <fstream>
#include <set>

#include "dyndense/error.hpp"
#include "dyndense/scenario.hpp"

namespace dyndense {

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& where, const std::string& what) {
  throw Error(ErrorCode::kConfig, where + ": " + what);
}

void check_keys(const json& obj, const std::set<std::string>& allowed, const std::string& where) {
  if (!obj.is_object()) fail(where, "expected an object");
  for (const auto& [key, _] : obj.items()) {
    if (!allowed.contains(key)) fail(where, "unknown key \"" + key + "\"");
  }
}

template <typename T>
T get(const json& obj, const std::string& key, T fallback, const std::string& where) {
  auto it = obj.find(key);
  if (it == obj.end()) return fallback;
  try {
    if constexpr (std::is_same_v<T, bool>) {
      if (!it->is_boolean()) fail(where + "." + key, "expected a boolean");
    } else if constexpr (std::is_integral_v<T>) {
      if (!it->is_number_integer() || (it->is_number_integer() && it->get<std::int64_t>() < 0)) {
        fail(where + "." + key, "expected a non-negative integer");
      }
    } else if constexpr (std::is_floating_point_v<T>) {
      if (!it->is_number()) fail(where + "." + key, "expected a number");
    } else {
      if (!it->is_string()) fail(where + "." + key, "expected a string");
    }
    return it->get<T>();
  } catch (const json::exception& e) {
    fail(where + "." + key, e.what());
  }
}

void require(bool ok, const std::string& where, const std::string& what) {
  if (!ok) fail(where, what);
}

GraphSpec parse_graph(const json& j) {
  const std::string w = "graph";
  check_keys(j, {"generator", "n", "p", "q", "p_noise", "attach", "degree", "margin",
                 "solve_levels", "path", "edges", "nodes", "connected"},
             w);
  GraphSpec g;
  g.generator = get<std::string>(j, "generator", g.generator, w);
  g.n = get<std::size_t>(j, "n", g.n, w);
  g.p = get<double>(j, "p", g.p, w);
  g.q = get<std::size_t>(j, "q", g.q, w);
  g.p_noise = get<double>(j, "p_noise", g.p_noise, w);
  g.attach = get<std::size_t>(j, "attach", g.attach, w);
  g.degree = get<std::size_t>(j, "degree", g.degree, w);
  g.margin = get<double>(j, "margin", g.margin, w);
  g.solve_levels = get<std::uint32_t>(j, "solve_levels", g.solve_levels, w);
  g.path = get<std::string>(j, "path", g.path, w);
  g.nodes = get<std::size_t>(j, "nodes", g.nodes, w);
  g.connected = get<bool>(j, "connected", g.connected, w);
  static const std::set<std::string> kGenerators = {"gnp", "planted-dense", "clique-plus-noise",
                                                    "random-regular", "file", "edges"};
  require(kGenerators.contains(g.generator), w + ".generator", "unknown generator " + g.generator);
  require(g.p >= 0 && g.p <= 1, w + ".p", "must be in [0, 1]");
  require(g.p_noise >= 0 && g.p_noise <= 1, w + ".p_noise", "must be in [0, 1]");
  require(g.margin > 0, w + ".margin", "must be positive");
  if (g.generator == "file") require(!g.path.empty(), w + ".path", "required for file graphs");
  if (g.generator == "edges") {
    auto it = j.find("edges");
    require(it != j.end() && it->is_array(), w + ".edges", "expected an array of [u, v] pairs");
    for (const auto& e : *it) {
      require(e.is_array() && e.size() == 2 && e[0].is_number_unsigned() && e[1].is_number_unsigned(),
              w + ".edges", "expected [u, v] pairs of node ids");
      g.edges.push_back(Edge{e[0].get<NodeId>(), e[1].get<NodeId>()});
    }
  } else if (g.generator != "file") {
    require(g.n >= 1, w + ".n", "must be at least 1");
  }
  if (g.generator == "planted-dense" || g.generator == "clique-plus-noise") {
    require(g.q <= g.n, w + ".q", "must not exceed n");
  }
  return g;
}

AdversarySpec parse_adversary(const json& j) {
  const std::string w = "adversary";
  check_keys(j, {"kind", "r", "script", "batches"}, w);
  AdversarySpec a;
  a.kind = get<std::string>(j, "kind", a.kind, w);
  a.r = get<std::uint32_t>(j, "r", a.r, w);
  a.script = get<std::string>(j, "script", a.script, w);
  if (auto it = j.find("batches"); it != j.end()) a.batches = json{{"batches", *it}};
  static const std::set<std::string> kKinds = {"none", "random-churn", "targeted", "scripted"};
  require(kKinds.contains(a.kind), w + ".kind", "unknown adversary " + a.kind);
  if (a.kind == "scripted") {
    require(!a.script.empty() || !a.batches.is_null(), w, "scripted adversary needs script or batches");
  }
  if (a.kind == "none") a.r = 0;
  return a;
}

void parse_protocol(const json& j, ScenarioConfig& c) {
  const std::string w = "protocol";
  check_keys(j, {"epsilon", "k", "D", "p_cap", "threshold_factor", "exact_counting",
                 "strict_congest", "c", "counting_epsilon", "max_tuple_length", "padding_cap",
                 "padding_mode"},
             w);
  ProtocolParams& p = c.protocol;
  p.epsilon = get<double>(j, "epsilon", p.epsilon, w);
  c.k = get<std::uint32_t>(j, "k", c.k, w);
  if (auto it = j.find("D"); it != j.end()) {
    if (it->is_string()) {
      require(it->get<std::string>() == "auto", w + ".D", "expected a positive integer or \"auto\"");
      c.auto_D = true;
    } else {
      p.D = get<std::uint32_t>(j, "D", 1, w);
      require(p.D >= 1, w + ".D", "must be at least 1");
      c.auto_D = false;
    }
  }
  p.p_cap = get<std::uint32_t>(j, "p_cap", p.p_cap, w);
  p.threshold_factor = get<double>(j, "threshold_factor", p.threshold_factor, w);
  p.exact_counting = get<bool>(j, "exact_counting", p.exact_counting, w);
  p.strict_congest = get<bool>(j, "strict_congest", p.strict_congest, w);
  p.c = get<double>(j, "c", p.c, w);
  p.counting_epsilon = get<double>(j, "counting_epsilon", p.counting_epsilon, w);
  p.max_tuple_length = get<std::uint32_t>(j, "max_tuple_length", p.max_tuple_length, w);
  p.padding_cap = get<std::uint32_t>(j, "padding_cap", p.padding_cap, w);
  const std::string mode = get<std::string>(j, "padding_mode", "calibrated", w);
  require(mode == "calibrated" || mode == "literal", w + ".padding_mode",
          "expected \"calibrated\" or \"literal\"");
  p.padding_mode = mode == "literal" ? PaddingMode::kLiteral : PaddingMode::kCalibrated;
  require(p.epsilon > 0 && p.epsilon <= 1, w + ".epsilon", "must be in (0, 1]");
  require(p.threshold_factor > 0, w + ".threshold_factor", "must be positive");
  require(p.c > 0, w + ".c", "must be positive");
  require(p.counting_epsilon >= 0 && p.counting_epsilon < 1, w + ".counting_epsilon",
          "must be in [0, 1)");
}

QuerySpec parse_queries(const json& j) {
  const std::string w = "run.queries";
  check_keys(j, {"mode", "rounds", "initial"}, w);
  QuerySpec q;
  q.mode = get<std::string>(j, "mode", q.mode, w);
  q.initial = get<bool>(j, "initial", q.initial, w);
  require(q.mode == "every-pass" || q.mode == "rounds" || q.mode == "none", w + ".mode",
          "expected every-pass, rounds or none");
  if (auto it = j.find("rounds"); it != j.end()) {
    require(it->is_array(), w + ".rounds", "expected an array of rounds");
    for (const auto& r : *it) {
      require(r.is_number_unsigned(), w + ".rounds", "expected non-negative integers");
      q.rounds.push_back(r.get<std::uint64_t>());
    }
  }
  if (q.mode == "rounds") require(!q.rounds.empty(), w + ".rounds", "required for mode rounds");
  return q;
}

}  // namespace

ScenarioConfig parse_config(const json& doc) {
  check_keys(doc, {"seed", "graph", "adversary", "protocol", "run", "oracle", "output"}, "config");
  ScenarioConfig c;
  c.seed = get<std::uint64_t>(doc, "seed", c.seed, "config");
  if (auto it = doc.find("graph"); it != doc.end()) c.graph = parse_graph(*it);
  if (auto it = doc.find("adversary"); it != doc.end()) c.adversary = parse_adversary(*it);
  if (auto it = doc.find("protocol"); it != doc.end()) parse_protocol(*it, c);
  if (auto it = doc.find("run"); it != doc.end()) {
    check_keys(*it, {"passes", "rounds", "max_rounds", "queries"}, "run");
    c.run.passes = get<std::uint64_t>(*it, "passes", c.run.passes, "run");
    c.run.rounds = get<std::uint64_t>(*it, "rounds", c.run.rounds, "run");
    c.run.max_rounds = get<std::uint64_t>(*it, "max_rounds", c.run.max_rounds, "run");
    if (auto q = it->find("queries"); q != it->end()) c.queries = parse_queries(*q);
  }
  if (c.run.passes == 0 && c.run.rounds == 0) c.run.passes = 1;
  c.queries.k = c.k;
  if (auto it = doc.find("oracle"); it != doc.end()) {
    const std::string w = "oracle";
    check_keys(*it, {"enumeration_limit", "exact_max_edges", "orientation_iterations", "cache_dir"}, w);
    c.oracle.enumeration_limit = get<std::size_t>(*it, "enumeration_limit", c.oracle.enumeration_limit, w);
    c.oracle.exact_max_edges = get<std::size_t>(*it, "exact_max_edges", c.oracle.exact_max_edges, w);
    c.oracle.orientation_iterations =
        get<std::uint32_t>(*it, "orientation_iterations", c.oracle.orientation_iterations, w);
    c.oracle.cache_dir = get<std::string>(*it, "cache_dir", c.oracle.cache_dir, w);
    require(c.oracle.enumeration_limit <= 24, w + ".enumeration_limit", "at most 24");
  }
  if (auto it = doc.find("output"); it != doc.end()) {
    const std::string w = "output";
    check_keys(*it, {"dir", "event_log", "send_events", "series", "bandwidth_factor", "check_diameter"}, w);
    c.output.dir = get<std::string>(*it, "dir", c.output.dir, w);
    c.output.event_log = get<bool>(*it, "event_log", c.output.event_log, w);
    c.output.send_events = get<bool>(*it, "send_events", c.output.send_events, w);
    c.output.series = get<bool>(*it, "series", c.output.series, w);
    c.output.bandwidth_factor = get<double>(*it, "bandwidth_factor", c.output.bandwidth_factor, w);
    c.output.check_diameter = get<bool>(*it, "check_diameter", c.output.check_diameter, w);
  }
  return c;
}

ScenarioConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIo, "cannot open config " + path);
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kConfig, path + ": " + e.what());
  }
  return parse_config(doc);
}

json config_to_json(const ScenarioConfig& c) {
  json g = {{"generator", c.graph.generator}};
  if (c.graph.generator == "file") {
    g["path"] = c.graph.path;
  } else if (c.graph.generator == "edges") {
    json edges = json::array();
    for (const Edge& e : c.graph.edges) edges.push_back({e.u, e.v});
    g["edges"] = edges;
    g["nodes"] = c.graph.nodes;
  } else {
    g["n"] = c.graph.n;
    g["connected"] = c.graph.connected;
    if (c.graph.generator == "gnp") g["p"] = c.graph.p;
    if (c.graph.generator == "random-regular") g["degree"] = c.graph.degree;
    if (c.graph.generator == "planted-dense" || c.graph.generator == "clique-plus-noise") {
      g["q"] = c.graph.q;
      g["p_noise"] = c.graph.p_noise;
      g["margin"] = c.graph.margin;
      g["solve_levels"] = c.graph.solve_levels;
    }
    if (c.graph.generator == "clique-plus-noise") g["attach"] = c.graph.attach;
  }
  json a = {{"kind", c.adversary.kind}, {"r", c.adversary.r}};
  if (!c.adversary.script.empty()) a["script"] = c.adversary.script;
  if (!c.adversary.batches.is_null()) a["batches"] = c.adversary.batches.at("batches");
  const ProtocolParams& p = c.protocol;
  json proto = {{"epsilon", p.epsilon},
                {"k", c.k},
                {"p_cap", p.p_cap},
                {"threshold_factor", p.threshold_factor},
                {"exact_counting", p.exact_counting},
                {"strict_congest", p.strict_congest},
                {"c", p.c},
                {"counting_epsilon", p.counting_epsilon},
                {"max_tuple_length", p.max_tuple_length},
                {"padding_cap", p.padding_cap},
                {"padding_mode", p.padding_mode == PaddingMode::kLiteral ? "literal" : "calibrated"}};
  if (c.auto_D) {
    proto["D"] = "auto";
  } else {
    proto["D"] = p.D;
  }
  json queries = {{"mode", c.queries.mode}, {"initial", c.queries.initial}};
  if (!c.queries.rounds.empty()) queries["rounds"] = c.queries.rounds;
  json run = {{"passes", c.run.passes}, {"rounds", c.run.rounds}, {"max_rounds", c.run.max_rounds},
              {"queries", queries}};
  json oracle = {{"enumeration_limit", c.oracle.enumeration_limit},
                 {"exact_max_edges", c.oracle.exact_max_edges},
                 {"orientation_iterations", c.oracle.orientation_iterations},
                 {"cache_dir", c.oracle.cache_dir}};
  json output = {{"dir", c.output.dir},
                 {"event_log", c.output.event_log},
                 {"send_events", c.output.send_events},
                 {"series", c.output.series},
                 {"bandwidth_factor", c.output.bandwidth_factor},
                 {"check_diameter", c.output.check_diameter}};
  return json{{"seed", c.seed}, {"graph", g},   {"adversary", a},  {"protocol", proto},
              {"run", run},     {"oracle", oracle}, {"output", output}};
}

}  // namespace dyndense
