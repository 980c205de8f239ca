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

#include "dyndense/graph.hpp"

#include <algorithm>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <set>
#include <sstream>

#include "dyndense/error.hpp"
#include "dyndense/rng.hpp"

namespace dyndense {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::kChurnBudgetExceeded: return "ChurnBudgetExceeded";
    case ErrorCode::kInvalidEdit: return "InvalidEdit";
    case ErrorCode::kEmptySubset: return "EmptySubset";
    case ErrorCode::kInvalidArgument: return "InvalidArgument";
    case ErrorCode::kHandlerPanic: return "HandlerPanic";
    case ErrorCode::kDesyncDetected: return "DesyncDetected";
    case ErrorCode::kNoCompleteFamily: return "NoCompleteFamily";
    case ErrorCode::kPaddingCapExceeded: return "PaddingCapExceeded";
    case ErrorCode::kUnknownSnapshot: return "UnknownSnapshot";
    case ErrorCode::kTooLargeForEnumeration: return "TooLargeForEnumeration";
    case ErrorCode::kConfig: return "ConfigError";
    case ErrorCode::kIo: return "IoError";
    case ErrorCode::kParse: return "ParseError";
  }
  return "Unknown";
}

Graph::Graph(std::size_t node_count) : adj_(node_count) {}

Graph Graph::from_edges(std::size_t node_count, std::span<const Edge> edges) {
  Graph g(node_count);
  std::vector<std::uint32_t> deg(node_count, 0);
  for (const Edge& e : edges) {
    g.check_pair(e.u, e.v);
    ++deg[e.u];
    ++deg[e.v];
  }
  for (NodeId v = 0; v < node_count; ++v) g.adj_[v].reserve(deg[v]);
  for (const Edge& e : edges) {
    g.adj_[e.u].push_back(e.v);
    g.adj_[e.v].push_back(e.u);
  }
  for (NodeId v = 0; v < node_count; ++v) {
    auto& a = g.adj_[v];
    std::sort(a.begin(), a.end());
    if (std::adjacent_find(a.begin(), a.end()) != a.end()) {
      throw Error(ErrorCode::kInvalidEdit, "repeated edge at node " + std::to_string(v));
    }
  }
  g.edge_count_ = edges.size();
  return g;
}

void Graph::check_pair(NodeId u, NodeId v) const {
  if (u >= adj_.size() || v >= adj_.size()) {
    throw Error(ErrorCode::kInvalidEdit,
                "node id out of range (" + std::to_string(u) + "," + std::to_string(v) + ")");
  }
  if (u == v) throw Error(ErrorCode::kInvalidEdit, "self-loop at node " + std::to_string(u));
}

bool Graph::has_edge(NodeId u, NodeId v) const {
  if (u >= adj_.size() || v >= adj_.size() || u == v) return false;
  const auto& a = adj_[u].size() <= adj_[v].size() ? adj_[u] : adj_[v];
  const NodeId other = adj_[u].size() <= adj_[v].size() ? v : u;
  return std::binary_search(a.begin(), a.end(), other);
}

void Graph::add_edge(NodeId u, NodeId v) {
  check_pair(u, v);
  auto& au = adj_[u];
  auto it = std::lower_bound(au.begin(), au.end(), v);
  if (it != au.end() && *it == v) {
    throw Error(ErrorCode::kInvalidEdit,
                "edge already present (" + std::to_string(u) + "," + std::to_string(v) + ")");
  }
  au.insert(it, v);
  auto& av = adj_[v];
  av.insert(std::lower_bound(av.begin(), av.end(), u), u);
  ++edge_count_;
}

void Graph::remove_edge(NodeId u, NodeId v) {
  check_pair(u, v);
  auto& au = adj_[u];
  auto it = std::lower_bound(au.begin(), au.end(), v);
  if (it == au.end() || *it != v) {
    throw Error(ErrorCode::kInvalidEdit,
                "edge absent (" + std::to_string(u) + "," + std::to_string(v) + ")");
  }
  au.erase(it);
  auto& av = adj_[v];
  av.erase(std::lower_bound(av.begin(), av.end(), u));
  --edge_count_;
}

std::vector<Edge> Graph::edges() const {
  std::vector<Edge> out;
  out.reserve(edge_count_);
  for (NodeId u = 0; u < adj_.size(); ++u) {
    for (const NodeId v : adj_[u]) {
      if (u < v) out.push_back({u, v});
    }
  }
  return out;
}

std::size_t Graph::max_degree() const {
  std::size_t best = 0;
  for (const auto& a : adj_) best = std::max(best, a.size());
  return best;
}

std::uint64_t Graph::content_hash() const {
  std::uint64_t h = splitmix64(adj_.size());
  for (NodeId u = 0; u < adj_.size(); ++u) {
    for (const NodeId v : adj_[u]) {
      if (u < v) h = splitmix64(h ^ ((static_cast<std::uint64_t>(u) << 32) | v));
    }
  }
  return h;
}

SubsetDensity induced_density(const Graph& g, std::span<const NodeId> subset) {
  if (subset.empty()) throw Error(ErrorCode::kEmptySubset, "density of an empty node set");
  std::vector<bool> flags(g.node_count(), false);
  for (const NodeId v : subset) {
    if (v >= g.node_count()) throw Error(ErrorCode::kInvalidArgument, "subset node out of range");
    flags[v] = true;
  }
  return induced_density(g, flags);
}

std::int64_t induced_edge_count(const Graph& g, const std::vector<bool>& flags) {
  std::int64_t twice = 0;
  for (NodeId u = 0; u < g.node_count(); ++u) {
    if (!flags[u]) continue;
    for (const NodeId v : g.neighbors(u)) twice += flags[v] ? 1 : 0;
  }
  return twice / 2;
}

SubsetDensity induced_density(const Graph& g, const std::vector<bool>& flags) {
  SubsetDensity out;
  out.members = flags_to_ids(flags);
  if (out.members.empty()) throw Error(ErrorCode::kEmptySubset, "density of an empty node set");
  out.edge_count = induced_edge_count(g, flags);
  out.density = Rational(out.edge_count, static_cast<std::int64_t>(out.members.size()));
  return out;
}

std::vector<NodeId> flags_to_ids(const std::vector<bool>& flags) {
  std::vector<NodeId> ids;
  for (NodeId v = 0; v < flags.size(); ++v) {
    if (flags[v]) ids.push_back(v);
  }
  return ids;
}

std::vector<bool> ids_to_flags(std::size_t n, std::span<const NodeId> ids) {
  std::vector<bool> flags(n, false);
  for (const NodeId v : ids) flags.at(v) = true;
  return flags;
}

void validate_batch(const Graph& g, std::span<const EdgeEdit> batch, std::uint32_t churn_rate) {
  if (batch.size() > churn_rate) {
    throw Error(ErrorCode::kChurnBudgetExceeded, std::to_string(batch.size()) +
                                                     " edits exceed churn rate " +
                                                     std::to_string(churn_rate));
  }
  std::set<Edge> touched;
  for (const EdgeEdit& e : batch) {
    if (e.u >= g.node_count() || e.v >= g.node_count() || e.u == e.v) {
      throw Error(ErrorCode::kInvalidEdit,
                  "malformed edit (" + std::to_string(e.u) + "," + std::to_string(e.v) + ")");
    }
    if (!touched.insert(e.edge()).second) {
      throw Error(ErrorCode::kInvalidEdit, "edge edited twice in one batch (" +
                                               std::to_string(e.u) + "," + std::to_string(e.v) +
                                               ")");
    }
    const bool present = g.has_edge(e.u, e.v);
    if (e.kind == EditKind::kAdd && present) {
      throw Error(ErrorCode::kInvalidEdit,
                  "add of present edge (" + std::to_string(e.u) + "," + std::to_string(e.v) + ")");
    }
    if (e.kind == EditKind::kRemove && !present) {
      throw Error(ErrorCode::kInvalidEdit, "remove of absent edge (" + std::to_string(e.u) + "," +
                                               std::to_string(e.v) + ")");
    }
  }
}

DynamicGraph::DynamicGraph(Graph initial, std::uint32_t churn_rate)
    : graph_(std::move(initial)), churn_rate_(churn_rate) {}

void DynamicGraph::apply(std::span<const EdgeEdit> batch) {
  validate_batch(graph_, batch, churn_rate_);
  for (const EdgeEdit& e : batch) {
    if (e.kind == EditKind::kAdd) {
      graph_.add_edge(e.u, e.v);
    } else {
      graph_.remove_edge(e.u, e.v);
    }
  }
  last_.assign(batch.begin(), batch.end());
  if (logging_ && !batch.empty()) log_.push_back({time_, last_});
  ++time_;
}

DynamicGraph apply_churn(DynamicGraph g, std::span<const EdgeEdit> batch) {
  g.apply(batch);
  return g;
}

LoadedGraph read_edge_list(std::istream& in) {
  std::vector<std::pair<std::uint64_t, std::uint64_t>> raw;
  std::set<std::uint64_t> ids;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
    std::istringstream ls(line);
    std::uint64_t a = 0;
    std::uint64_t b = 0;
    if (!(ls >> a)) {
      std::string rest;
      ls.clear();
      if (ls >> rest) {
        throw Error(ErrorCode::kParse, "line " + std::to_string(line_no) + ": expected 'u v'");
      }
      continue;
    }
    std::string extra;
    if (!(ls >> b) || (ls >> extra)) {
      throw Error(ErrorCode::kParse, "line " + std::to_string(line_no) + ": expected 'u v'");
    }
    if (a == b) {
      throw Error(ErrorCode::kInvalidEdit, "line " + std::to_string(line_no) + ": self-loop");
    }
    raw.emplace_back(a, b);
    ids.insert(a);
    ids.insert(b);
  }
  LoadedGraph out;
  out.external_ids.assign(ids.begin(), ids.end());
  std::map<std::uint64_t, NodeId> dense;
  for (NodeId i = 0; i < out.external_ids.size(); ++i) dense[out.external_ids[i]] = i;
  out.graph = Graph(out.external_ids.size());
  for (const auto& [a, b] : raw) {
    const NodeId u = dense[a];
    const NodeId v = dense[b];
    // Both orientations of an edge are commonly listed; keep one.
    if (!out.graph.has_edge(u, v)) out.graph.add_edge(u, v);
  }
  return out;
}

LoadedGraph read_edge_list_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIo, "cannot open " + path);
  return read_edge_list(in);
}

void write_edge_list(std::ostream& out, const Graph& g) {
  out << "# nodes " << g.node_count() << " edges " << g.edge_count() << "\n";
  for (const Edge& e : g.edges()) out << e.u << ' ' << e.v << '\n';
}

}  // namespace dyndense
