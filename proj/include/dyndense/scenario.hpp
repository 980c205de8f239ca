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
#include <string>
#include <vector>

#include <json.hpp>

#include "dyndense/graph.hpp"
#include "dyndense/oracle.hpp"
#include "dyndense/protocol.hpp"
#include "dyndense/rational.hpp"
#include "dyndense/sim.hpp"

namespace dyndense {

struct GraphSpec {
  std::string generator = "gnp";  // gnp | planted-dense | clique-plus-noise | random-regular | file | edges
  std::size_t n = 50;
  double p = 0.1;
  std::size_t q = 0;       // 0 with a planted generator: solve from (r, D, eps)
  double p_noise = 0.05;
  std::size_t attach = 2;
  std::size_t degree = 3;
  double margin = 2.0;     // used when solving q
  std::uint32_t solve_levels = 2;
  std::string path;
  std::vector<Edge> edges;
  std::size_t nodes = 0;   // node count for "edges"; 0 infers it
  bool connected = true;   // resample random generators until connected
};

struct AdversarySpec {
  std::string kind = "none";  // none | random-churn | targeted | scripted
  std::uint32_t r = 0;
  std::string script;         // path for scripted
  nlohmann::json batches;     // inline scripted batches
};

struct QuerySpec {
  std::string mode = "every-pass";  // every-pass | rounds | none
  std::vector<std::uint64_t> rounds;
  std::uint32_t k = 0;
  bool initial = false;  // also query at round 0, before any family exists
};

struct RunSpec {
  std::uint64_t passes = 0;  // stop after this many published families
  std::uint64_t rounds = 0;  // or after this many rounds
  std::uint64_t max_rounds = 0;  // safety stop; 0 derives one
};

struct OracleSpec {
  std::size_t enumeration_limit = kDefaultEnumerationLimit;
  std::size_t exact_max_edges = 200000;
  std::uint32_t orientation_iterations = 0;
  std::string cache_dir;
};

struct OutputSpec {
  std::string dir;
  bool event_log = true;
  bool send_events = false;
  bool series = true;
  double bandwidth_factor = 64.0;  // bound = factor * ceil(log2 n) bits
  bool check_diameter = true;
};

struct ScenarioConfig {
  std::uint64_t seed = 1;
  GraphSpec graph;
  AdversarySpec adversary;
  ProtocolParams protocol;
  bool auto_D = true;
  std::uint32_t k = 0;
  QuerySpec queries;
  RunSpec run;
  OracleSpec oracle;
  OutputSpec output;
};

// Schema-validated parse; unknown keys and bad values raise kConfig.
ScenarioConfig parse_config(const nlohmann::json& doc);
ScenarioConfig load_config(const std::string& path);
nlohmann::json config_to_json(const ScenarioConfig& c);

struct QueryRecord {
  std::uint64_t id = 0;
  std::uint64_t issued = 0;
  std::uint64_t round = 0;
  std::uint32_t k = 0;
  bool no_family = false;
  std::uint64_t family = 0;
  std::uint32_t level = 0;
  std::uint64_t t_prime = 0;
  std::uint64_t t_double_prime = 0;
  std::size_t answer_size = 0;
  std::string answer_hash;
  Rational answer_density;
  std::string oracle_method;
  Rational oracle_density;  // exact optimum, or its certified upper bound
  Rational oracle_lower;    // certified lower bound for rho_t(H*)
  Rational ratio;           // oracle_density / answer_density
  bool ratio_infinite = false;
  double bound = 0;         // 2+eps or 3+eps
  std::uint64_t T = 0;
  double precondition_threshold = 0;  // 24Tr/eps, or 24Tr/(k eps)
  bool conditioned = false;
  bool padded = false;
  std::uint32_t attempts = 0;
  bool padding_cap_hit = false;
  bool size_ok = true;
  // |V_i u V_hat| <= (n_i + upper window)/(1-delta); holds w.h.p., reported only.
  double size_bound = 0;
  bool size_bound_ok = true;
  bool ratio_ok = true;
  bool pass = true;  // size_ok && ratio_ok
};

struct FamilyRecord {
  std::uint64_t id = 0;
  std::uint64_t started = 0;
  std::uint64_t published = 0;
  std::uint64_t length = 0;
  std::vector<LevelRecord> levels;
};

struct RoundBudget {
  std::uint64_t p_cap = 0;
  std::uint64_t level_cost = 0;
  std::uint64_t max_pass_length = 0;
  bool pass_length_ok = true;     // every pass <= p_cap * (4D+1)
  bool pass_identity_ok = true;   // every pass == levels * (4D+1) (logical mode)
  std::uint32_t padding_cap = 0;
  std::uint32_t max_attempts = 0;
  bool padding_ok = true;
  bool pass = true;
};

struct RunReport {
  nlohmann::json config;
  std::uint64_t seed = 0;
  std::size_t n = 0;
  std::uint32_t D = 0;
  std::uint32_t p_cap = 0;
  std::uint64_t rounds = 0;
  std::vector<QueryRecord> queries;
  std::vector<FamilyRecord> families;
  BandwidthReport bandwidth;
  RoundBudget budget;
  std::optional<std::uint32_t> measured_diameter;
  bool diameter_checked = false;
  bool diameter_ok = true;
  std::string event_digest;
  std::uint64_t event_lines = 0;
  std::size_t conditioned = 0;
  std::size_t conditioned_pass = 0;
  std::size_t unconditioned = 0;
  std::size_t size_bound_violations = 0;
  bool guarantees_pass = true;
  bool pass = true;
};

// Runs the scenario; writes the event log into output.dir when set.
RunReport run_scenario(const ScenarioConfig& config);
RoundBudget check_round_budget(const RunReport& report, const ProtocolParams& params);

nlohmann::json report_to_json(const RunReport& r);
std::string report_csv(const RunReport& r);
std::string report_series(const RunReport& r);
// Writes report.json, queries.csv and, if requested, series.dat into dir.
void emit_report(const RunReport& r, const std::string& dir, bool series);

}  // namespace dyndense
