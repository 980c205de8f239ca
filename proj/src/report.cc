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
#include <sstream>

#include "dyndense/error.hpp"
#include "dyndense/scenario.hpp"

namespace dyndense {

namespace {

using nlohmann::json;

json rational_json(const Rational& r) { return json{{"num", r.num()}, {"den", r.den()}}; }

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void write_file(const std::filesystem::path& p, const std::string& content) {
  std::ofstream out(p, std::ios::binary);
  if (!out) throw Error(ErrorCode::kIo, "cannot write " + p.string());
  out << content;
  if (!out) throw Error(ErrorCode::kIo, "write failed: " + p.string());
}

}  // namespace

json report_to_json(const RunReport& r) {
  json queries = json::array();
  for (const QueryRecord& q : r.queries) {
    json j = {{"id", q.id}, {"issued", q.issued}, {"round", q.round}, {"k", q.k},
              {"no_complete_family", q.no_family}};
    if (!q.no_family) {
      j["family"] = q.family;
      j["level"] = q.level;
      j["t_prime"] = q.t_prime;
      j["t_double_prime"] = q.t_double_prime;
      j["answer_size"] = q.answer_size;
      j["answer_hash"] = q.answer_hash;
      j["answer_density"] = rational_json(q.answer_density);
      j["oracle_method"] = q.oracle_method;
      j["oracle_density"] = rational_json(q.oracle_density);
      j["oracle_lower"] = rational_json(q.oracle_lower);
      j["ratio"] = q.ratio_infinite ? json("inf") : rational_json(q.ratio);
      j["bound"] = q.bound;
      j["T"] = q.T;
      j["precondition_threshold"] = q.precondition_threshold;
      j["conditioned"] = q.conditioned;
      j["padded"] = q.padded;
      j["padding_attempts"] = q.attempts;
      j["padding_cap_hit"] = q.padding_cap_hit;
      j["size_ok"] = q.size_ok;
      j["size_bound"] = q.size_bound;
      j["size_bound_ok"] = q.size_bound_ok;
      j["ratio_ok"] = q.ratio_ok;
      j["pass"] = q.pass;
    }
    queries.push_back(std::move(j));
  }
  json families = json::array();
  for (const FamilyRecord& f : r.families) {
    json levels = json::array();
    for (const LevelRecord& l : f.levels) {
      levels.push_back({{"m", l.m}, {"n", l.n}, {"edge_start", l.edge_start},
                        {"computed_at", l.computed_at}});
    }
    families.push_back({{"id", f.id}, {"started", f.started}, {"published", f.published},
                        {"length", f.length}, {"levels", levels}});
  }
  json bandwidth = json::array();
  for (const BandwidthRow& row : r.bandwidth.rows) {
    json v = json::array();
    for (const auto& [bits, count] : row.violations) v.push_back({bits, count});
    bandwidth.push_back({{"channel", std::string(channel_name(row.channel))},
                         {"deliveries", row.deliveries},
                         {"max_bits", row.max_bits},
                         {"bound_bits", row.bound_bits},
                         {"within_bound", row.pass},
                         {"violations", v}});
  }
  const RoundBudget& b = r.budget;
  json budget = {{"p_cap", b.p_cap},
                 {"level_cost", b.level_cost},
                 {"max_pass_length", b.max_pass_length},
                 {"pass_length_ok", b.pass_length_ok},
                 {"pass_identity_ok", b.pass_identity_ok},
                 {"padding_cap", b.padding_cap},
                 {"max_padding_attempts", b.max_attempts},
                 {"padding_ok", b.padding_ok},
                 {"pass", b.pass}};
  json diameter = {{"checked", r.diameter_checked}, {"ok", r.diameter_ok}};
  diameter["measured"] = r.measured_diameter ? json(*r.measured_diameter) : json(nullptr);
  return json{{"config", r.config},
              {"seed", r.seed},
              {"n", r.n},
              {"D", r.D},
              {"p_cap", r.p_cap},
              {"rounds", r.rounds},
              {"queries", queries},
              {"families", families},
              {"bandwidth", {{"rows", bandwidth}, {"within_bound", r.bandwidth.pass}}},
              {"round_budget", budget},
              {"diameter", diameter},
              {"event_log", {{"digest", r.event_digest}, {"lines", r.event_lines}}},
              {"summary",
               {{"queries", r.queries.size()},
                {"conditioned", r.conditioned},
                {"conditioned_pass", r.conditioned_pass},
                {"unconditioned", r.unconditioned},
                {"size_bound_violations", r.size_bound_violations},
                {"guarantees_pass", r.guarantees_pass},
                {"pass", r.pass}}}};
}

std::string report_csv(const RunReport& r) {
  std::ostringstream out;
  out << "id,issued,round,k,no_complete_family,family,level,t_prime,t_double_prime,answer_size,"
         "answer_hash,answer_density,oracle_method,oracle_density,ratio,bound,T,"
         "precondition_threshold,conditioned,padding_attempts,pass\n";
  for (const QueryRecord& q : r.queries) {
    out << q.id << ',' << q.issued << ',' << q.round << ',' << q.k << ',' << (q.no_family ? 1 : 0);
    if (q.no_family) {
      out << ",,,,,,,,,,,,,,,1\n";
      continue;
    }
    out << ',' << q.family << ',' << q.level << ',' << q.t_prime << ',' << q.t_double_prime << ','
        << q.answer_size << ',' << q.answer_hash << ',' << q.answer_density.str() << ','
        << q.oracle_method << ',' << q.oracle_density.str() << ','
        << (q.ratio_infinite ? std::string("inf") : q.ratio.str()) << ',' << fmt(q.bound) << ','
        << q.T << ',' << fmt(q.precondition_threshold) << ',' << (q.conditioned ? 1 : 0) << ','
        << q.attempts << ',' << (q.pass ? 1 : 0) << '\n';
  }
  return out.str();
}

std::string report_series(const RunReport& r) {
  std::ostringstream out;
  out << "# round answer_density oracle_density ratio conditioned\n";
  for (const QueryRecord& q : r.queries) {
    if (q.no_family) continue;
    out << q.round << ' ' << fmt(q.answer_density.to_double()) << ' '
        << fmt(q.oracle_density.to_double()) << ' '
        << (q.ratio_infinite ? std::string("inf") : fmt(q.ratio.to_double())) << ' '
        << (q.conditioned ? 1 : 0) << '\n';
  }
  return out.str();
}

void emit_report(const RunReport& r, const std::string& dir, bool series) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw Error(ErrorCode::kIo, "cannot create " + dir + ": " + ec.message());
  const std::filesystem::path base(dir);
  write_file(base / "report.json", report_to_json(r).dump(2) + "\n");
  write_file(base / "queries.csv", report_csv(r));
  if (series) write_file(base / "series.dat", report_series(r));
}

}  // namespace dyndense
