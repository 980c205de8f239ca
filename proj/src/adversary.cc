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

#include "dyndense/adversary.hpp"

#include <algorithm>
#include <fstream>
#include <set>

#include "dyndense/error.hpp"

namespace dyndense {

std::string_view to_string(AdversaryKind k) {
  switch (k) {
    case AdversaryKind::kNone: return "none";
    case AdversaryKind::kScripted: return "scripted";
    case AdversaryKind::kRandomChurn: return "random-churn";
    case AdversaryKind::kTargeted: return "targeted";
  }
  return "none";
}

AdversaryKind adversary_kind_from(std::string_view s) {
  if (s == "none") return AdversaryKind::kNone;
  if (s == "scripted") return AdversaryKind::kScripted;
  if (s == "random-churn") return AdversaryKind::kRandomChurn;
  if (s == "targeted") return AdversaryKind::kTargeted;
  throw Error(ErrorCode::kConfig, "unknown adversary kind '" + std::string(s) + "'");
}

ScriptedAdversary::ScriptedAdversary(const Graph& initial, std::uint32_t churn_rate,
                                     std::map<std::uint64_t, std::vector<EdgeEdit>> batches)
    : batches_(std::move(batches)) {
  // Replay the script once so that no-op edits fail at load time.
  Graph g = initial;
  for (const auto& [round, edits] : batches_) {
    try {
      validate_batch(g, edits, churn_rate);
    } catch (const Error& e) {
      throw Error(e.code(), "script round " + std::to_string(round) + ": " + e.what());
    }
    for (const EdgeEdit& e : edits) {
      if (e.kind == EditKind::kAdd) {
        g.add_edge(e.u, e.v);
      } else {
        g.remove_edge(e.u, e.v);
      }
    }
  }
}

ScriptedAdversary ScriptedAdversary::from_json(const Graph& initial, std::uint32_t churn_rate,
                                               const nlohmann::json& doc) {
  if (!doc.is_object() || !doc.contains("batches") || !doc["batches"].is_array()) {
    throw Error(ErrorCode::kConfig, "adversary script needs a 'batches' array");
  }
  for (const auto& [key, _] : doc.items()) {
    if (key != "batches") throw Error(ErrorCode::kConfig, "unknown script key '" + key + "'");
  }
  std::map<std::uint64_t, std::vector<EdgeEdit>> batches;
  for (const auto& b : doc["batches"]) {
    if (!b.is_object() || !b.contains("round") || !b.contains("edits")) {
      throw Error(ErrorCode::kConfig, "script batch needs 'round' and 'edits'");
    }
    for (const auto& [key, _] : b.items()) {
      if (key != "round" && key != "edits") {
        throw Error(ErrorCode::kConfig, "unknown script batch key '" + key + "'");
      }
    }
    const auto round = b["round"].get<std::uint64_t>();
    if (batches.count(round) != 0) {
      throw Error(ErrorCode::kConfig, "duplicate script round " + std::to_string(round));
    }
    auto& edits = batches[round];
    for (const auto& e : b["edits"]) {
      if (!e.is_array() || e.size() != 3) {
        throw Error(ErrorCode::kConfig, "script edit must be [op, u, v]");
      }
      const auto op = e[0].get<std::string>();
      EdgeEdit edit;
      if (op == "add") {
        edit.kind = EditKind::kAdd;
      } else if (op == "remove") {
        edit.kind = EditKind::kRemove;
      } else {
        throw Error(ErrorCode::kConfig, "script op must be add or remove, got '" + op + "'");
      }
      edit.u = e[1].get<NodeId>();
      edit.v = e[2].get<NodeId>();
      edits.push_back(edit);
    }
  }
  return ScriptedAdversary(initial, churn_rate, std::move(batches));
}

ScriptedAdversary ScriptedAdversary::from_file(const Graph& initial, std::uint32_t churn_rate,
                                               const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIo, "cannot open adversary script " + path);
  nlohmann::json doc;
  try {
    in >> doc;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kParse, path + ": " + e.what());
  }
  return from_json(initial, churn_rate, doc);
}

std::vector<EdgeEdit> ScriptedAdversary::next_batch(const Graph&, std::uint64_t round) {
  const auto it = batches_.find(round);
  return it == batches_.end() ? std::vector<EdgeEdit>{} : it->second;
}

namespace {

// Up to `want` distinct pairs drawn uniformly, toggled against g.
void add_toggles(const Graph& g, Rng& rng, std::uint32_t want, std::set<Edge>& used,
                 std::vector<EdgeEdit>& out) {
  const std::size_t n = g.node_count();
  if (n < 2) return;
  const std::uint64_t pairs = static_cast<std::uint64_t>(n) * (n - 1) / 2;
  for (std::uint32_t tries = 0; want > 0 && used.size() < pairs && tries < 64 * (want + 1);
       ++tries) {
    const auto u = static_cast<NodeId>(rng.below(n));
    const auto v = static_cast<NodeId>(rng.below(n));
    if (u == v) continue;
    const Edge e = Edge::of(u, v);
    if (!used.insert(e).second) continue;
    out.push_back({g.has_edge(u, v) ? EditKind::kRemove : EditKind::kAdd, e.u, e.v});
    --want;
  }
}

}  // namespace

std::vector<EdgeEdit> RandomChurn::next_batch(const Graph& g, std::uint64_t) {
  std::vector<EdgeEdit> out;
  std::set<Edge> used;
  add_toggles(g, rng_, r_, used, out);
  return out;
}

std::vector<EdgeEdit> TargetedAdversary::next_batch(const Graph& g, std::uint64_t) {
  std::vector<EdgeEdit> out;
  std::set<Edge> used;
  std::uint32_t uniform = 0;
  for (std::uint32_t i = 0; i < r_; ++i) {
    bool done = false;
    if (target_.size() >= 2 && rng_.below(4) != 0) {
      for (int tries = 0; tries < 64 && !done; ++tries) {
        const NodeId u = target_[rng_.below(target_.size())];
        const NodeId v = target_[rng_.below(target_.size())];
        if (u == v || !g.has_edge(u, v)) continue;
        const Edge e = Edge::of(u, v);
        if (!used.insert(e).second) continue;
        out.push_back({EditKind::kRemove, e.u, e.v});
        done = true;
      }
    }
    if (!done) ++uniform;
  }
  add_toggles(g, rng_, uniform, used, out);
  return out;
}

std::vector<EdgeEdit> diff_edges(const Graph& from, const Graph& to) {
  if (from.node_count() != to.node_count()) {
    throw Error(ErrorCode::kInvalidArgument, "trace snapshots differ in node count");
  }
  std::vector<EdgeEdit> out;
  for (const Edge& e : from.edges()) {
    if (!to.has_edge(e.u, e.v)) out.push_back({EditKind::kRemove, e.u, e.v});
  }
  for (const Edge& e : to.edges()) {
    if (!from.has_edge(e.u, e.v)) out.push_back({EditKind::kAdd, e.u, e.v});
  }
  return out;
}

std::vector<EdgeEdit> TraceAdversary::next_batch(const Graph& g, std::uint64_t round) {
  if (round + 1 >= trace_.size()) return {};
  return diff_edges(g, trace_[round + 1]);
}

std::uint32_t TraceAdversary::max_churn() const {
  std::size_t best = 0;
  for (std::size_t i = 0; i + 1 < trace_.size(); ++i) {
    best = std::max(best, diff_edges(trace_[i], trace_[i + 1]).size());
  }
  return static_cast<std::uint32_t>(best);
}

}  // namespace dyndense
