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
#include <fstream>
#include <sstream>

#include "dyndense/error.hpp"
#include "dyndense/scenario.hpp"

using namespace dyndense;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

json k5_doc() {
  return json::parse(R"({
    "seed": 7,
    "graph": {"generator": "edges", "edges": [[0,1],[0,2],[0,3],[0,4],[1,2],[1,3],[1,4],[2,3],[2,4],[3,4]]},
    "protocol": {"epsilon": 0.5, "k": 0, "D": "auto"},
    "run": {"passes": 1, "queries": {"mode": "every-pass"}}
  })");
}

ErrorCode code_of(const json& doc) {
  try {
    parse_config(doc);
  } catch (const Error& e) {
    return e.code();
  }
  return ErrorCode::kIo;  // sentinel: no error raised
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("dyndense_scenario_" + name);
  fs::remove_all(dir);
  return dir;
}

}  // namespace

TEST_SUITE("harness") {

TEST_CASE("config validation") {
  CHECK_NOTHROW(parse_config(k5_doc()));
  json bad = k5_doc();
  bad["bogus"] = 1;
  CHECK(code_of(bad) == ErrorCode::kConfig);
  bad = k5_doc();
  bad["protocol"]["epsilonn"] = 0.5;
  CHECK(code_of(bad) == ErrorCode::kConfig);
  bad = k5_doc();
  bad["protocol"]["epsilon"] = -1;
  CHECK(code_of(bad) == ErrorCode::kConfig);
  bad = k5_doc();
  bad["graph"]["generator"] = "nope";
  CHECK(code_of(bad) == ErrorCode::kConfig);
  bad = k5_doc();
  bad["protocol"]["epsilon"] = "half";
  CHECK(code_of(bad) == ErrorCode::kConfig);
}

TEST_CASE("config round trips through json") {
  const ScenarioConfig c = parse_config(k5_doc());
  const ScenarioConfig d = parse_config(config_to_json(c));
  CHECK(config_to_json(c) == config_to_json(d));
  CHECK(d.seed == 7);
  CHECK(d.protocol.epsilon == 0.5);
}

TEST_CASE("static K5 passes with ratio at most 2.5") {
  const RunReport r = run_scenario(parse_config(k5_doc()));
  REQUIRE(!r.queries.empty());
  for (const auto& q : r.queries) {
    CHECK(!q.no_family);
    CHECK(q.oracle_density == Rational(2, 1));
    CHECK(!q.ratio_infinite);
    CHECK(q.ratio <= Rational(5, 2));
    CHECK(q.ratio >= Rational(1, 1));
    CHECK(q.pass);
  }
  CHECK(r.pass);
  CHECK(r.budget.pass);
}

TEST_CASE("early query on P4 records NoCompleteFamily") {
  json doc = json::parse(R"({
    "seed": 3,
    "graph": {"generator": "edges", "edges": [[0,1],[1,2],[2,3]]},
    "protocol": {"epsilon": 0.5, "D": "auto", "exact_counting": true},
    "run": {"passes": 1, "queries": {"mode": "every-pass", "initial": true}}
  })");
  const RunReport r = run_scenario(parse_config(doc));
  REQUIRE(r.queries.size() >= 2);
  CHECK(r.queries.front().no_family);
  CHECK(!r.queries.back().no_family);
  CHECK(r.pass);
}

TEST_CASE("D=1 pass length is levels times 5") {
  json doc = k5_doc();
  doc["protocol"]["D"] = 1;
  doc["protocol"]["exact_counting"] = true;
  doc["run"]["passes"] = 3;
  const RunReport r = run_scenario(parse_config(doc));
  REQUIRE(r.families.size() >= 3);
  for (const auto& f : r.families) CHECK(f.length == f.levels.size() * 5);
  CHECK(r.budget.pass_identity_ok);
  CHECK(r.budget.pass_length_ok);
}

TEST_CASE("exact oracle ratios are at least one") {
  json doc = json::parse(R"({
    "seed": 11,
    "graph": {"generator": "planted-dense", "n": 30, "q": 8, "p_noise": 0.1},
    "protocol": {"epsilon": 0.5, "k": 0, "D": "auto", "exact_counting": true},
    "run": {"passes": 3, "queries": {"mode": "every-pass"}}
  })");
  for (std::uint32_t k : {0u, 5u, 20u}) {
    doc["protocol"]["k"] = k;
    const RunReport r = run_scenario(parse_config(doc));
    for (const auto& q : r.queries) {
      if (q.no_family) continue;
      CHECK(q.ratio >= Rational(1, 1));
      CHECK(q.size_ok);
      if (k > 0) CHECK(q.answer_size >= k);
    }
  }
}

TEST_CASE("report outputs") {
  json doc = k5_doc();
  doc["run"]["passes"] = 2;
  const fs::path dir = scratch("emit");
  ScenarioConfig c = parse_config(doc);
  c.output.dir = dir.string();
  const RunReport r = run_scenario(c);
  emit_report(r, dir.string(), true);
  REQUIRE(fs::exists(dir / "report.json"));
  REQUIRE(fs::exists(dir / "queries.csv"));
  REQUIRE(fs::exists(dir / "events.ndjson"));
  CHECK(fs::exists(dir / "series.dat"));
  const std::string csv = slurp(dir / "queries.csv");
  const auto lines = std::count(csv.begin(), csv.end(), '\n');
  CHECK(static_cast<std::size_t>(lines) == r.queries.size() + 1);
  const json rep = json::parse(slurp(dir / "report.json"));
  CHECK(rep["queries"].size() == r.queries.size());
  CHECK(rep["queries"][0]["oracle_density"]["num"] == 2);
  fs::remove_all(dir);
}

TEST_CASE("replay is byte identical") {
  json doc = json::parse(R"({
    "seed": 21,
    "graph": {"generator": "gnp", "n": 25, "p": 0.3},
    "adversary": {"kind": "random-churn", "r": 1},
    "protocol": {"epsilon": 0.5, "k": 3, "D": "auto", "max_tuple_length": 256},
    "run": {"passes": 2, "queries": {"mode": "every-pass"}}
  })");
  const fs::path a = scratch("replay_a");
  const fs::path b = scratch("replay_b");
  ScenarioConfig c = parse_config(doc);
  c.output.dir = a.string();
  emit_report(run_scenario(c), a.string(), false);
  // Replay from the recorded config, as the CLI does.
  const json recorded = json::parse(slurp(a / "report.json"));
  ScenarioConfig c2 = parse_config(recorded.at("config"));
  c2.seed = recorded.at("seed").get<std::uint64_t>();
  c2.output.dir = b.string();
  emit_report(run_scenario(c2), b.string(), false);
  CHECK(slurp(a / "report.json") == slurp(b / "report.json"));
  CHECK(slurp(a / "events.ndjson") == slurp(b / "events.ndjson"));
  CHECK(!slurp(a / "events.ndjson").empty());
  fs::remove_all(a);
  fs::remove_all(b);
}

TEST_CASE("round budget check flags long passes") {
  RunReport r;
  r.families.push_back(FamilyRecord{1, 0, 30, 30, {LevelRecord{}, LevelRecord{}}});
  r.p_cap = 2;
  r.D = 1;
  ProtocolParams p;
  p.D = 1;
  p.p_cap = 2;
  p.exact_counting = true;
  RoundBudget b = check_round_budget(r, p);
  CHECK(!b.pass_length_ok);
  CHECK(!b.pass);
  r.families[0].length = 10;
  r.families[0].published = 10;
  b = check_round_budget(r, p);
  CHECK(b.pass_length_ok);
  CHECK(b.pass_identity_ok);
}

}  // TEST_SUITE
