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
#include <fstream>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "dyndense/graph.hpp"
#include "dyndense/rng.hpp"
#include "dyndense/tuples.hpp"

namespace dyndense {

// Logical channels multiplexed into one broadcast per node per round. The
// bandwidth ledger keeps one table per channel.
enum class Channel : std::uint8_t {
  kNodeCoarse,
  kNodeFine,
  kEdgeCoarse,
  kEdgeFine,
  kMembership,
  kDropFlag,
  kPadCoarse,
  kPadFine,
  kFlood,
  kUser,
};
inline constexpr std::size_t kChannelCount = 10;
std::string_view channel_name(Channel c);

struct BitPayload {
  bool value = false;
};
struct GeoPayload {
  GeoRef tuple;
};
struct ExpPayload {
  ExpRef tuple;
};
// One coordinate of an exponential tuple (strict CONGEST serialization).
struct ExpCoordPayload {
  std::uint32_t index = 0;
  std::uint32_t length = 1;
  double value = 0;
};
struct WeightPayload {
  WeightRef set;
};
struct BytesPayload {
  std::string bytes;
};
using Payload =
    std::variant<BitPayload, GeoPayload, ExpPayload, ExpCoordPayload, WeightPayload, BytesPayload>;

struct Part {
  Channel channel = Channel::kUser;
  Payload payload;
};

struct RoundMessage {
  std::vector<Part> parts;

  bool empty() const { return parts.empty(); }
  void add(Channel c, Payload p) { parts.push_back(Part{c, std::move(p)}); }
  void clear() { parts.clear(); }
};

// Bits a part occupies on the wire, recomputed from the payload. Throws
// kInvalidArgument for payloads that would be zero bits.
std::uint32_t part_bits(const Part& part, std::size_t node_count);
std::uint64_t part_hash(const Part& part);

// Per-channel maxima plus a histogram so that bound violations can be listed
// exhaustively. Detail mode additionally keeps one entry per (edge, round).
class BandwidthLedger {
 public:
  struct ChannelStats {
    std::uint64_t deliveries = 0;
    std::uint64_t total_bits = 0;
    std::uint32_t max_bits = 0;
    std::uint64_t max_round = 0;
    NodeId max_sender = 0;
    std::map<std::uint32_t, std::uint64_t> histogram;  // bits -> deliveries
  };
  struct EdgeEntry {
    std::uint64_t round = 0;
    NodeId from = 0;
    NodeId to = 0;
    std::uint32_t bits = 0;
  };

  void set_detail(bool on) { detail_ = on; }
  bool detail() const { return detail_; }

  void record_part(Channel c, std::uint64_t round, NodeId sender, std::uint32_t bits,
                   std::size_t fanout);
  void record_message(std::uint64_t round, NodeId sender, std::uint32_t bits,
                      std::span<const NodeId> receivers);

  const ChannelStats& stats(Channel c) const { return channels_[static_cast<std::size_t>(c)]; }
  std::uint32_t max_edge_bits() const { return max_edge_bits_; }
  std::uint64_t total_deliveries() const { return deliveries_; }
  std::uint64_t total_bits() const { return total_bits_; }
  const std::vector<EdgeEntry>& entries() const { return entries_; }

 private:
  bool detail_ = false;
  ChannelStats channels_[kChannelCount];
  std::uint32_t max_edge_bits_ = 0;
  std::uint64_t deliveries_ = 0;
  std::uint64_t total_bits_ = 0;
  std::vector<EdgeEntry> entries_;
};

struct BandwidthRow {
  Channel channel = Channel::kUser;
  std::uint64_t deliveries = 0;
  std::uint32_t max_bits = 0;
  double bound_bits = 0;
  bool pass = true;
  // (bits, deliveries) for every histogram bucket above the bound.
  std::vector<std::pair<std::uint32_t, std::uint64_t>> violations;
};
struct BandwidthReport {
  std::vector<BandwidthRow> rows;  // channels with traffic or a bound
  bool pass = true;
};

// Channels missing from `bounds` are reported without a pass/fail verdict.
BandwidthReport assert_bandwidth(const BandwidthLedger& ledger,
                                 const std::map<Channel, double>& bounds);

// Newline-delimited JSON event records with a rolling FNV-1a digest.
class EventLog {
 public:
  EventLog() = default;
  EventLog(const EventLog&) = delete;
  EventLog& operator=(const EventLog&) = delete;

  void open(const std::string& path);
  void write_header(const std::string& json_object);
  void record(std::uint64_t round, std::int64_t node, std::string_view event,
              std::uint64_t payload_hash, std::uint64_t bits);
  void flush();

  std::uint64_t digest() const { return digest_; }
  std::uint64_t line_count() const { return lines_; }
  void set_send_events(bool on) { send_events_ = on; }
  bool send_events() const { return send_events_; }

 private:
  void emit(const std::string& line);

  std::ofstream out_;
  std::uint64_t digest_ = 0xcbf29ce484222325ull;
  std::uint64_t lines_ = 0;
  bool send_events_ = true;
};

std::string hex64(std::uint64_t v);

class Simulator;

// Messages delivered at the end of the previous round, as seen by one node.
// Senders are the node's neighbours in the round-start topology of that
// round, reconstructed from the current graph and the last churn batch.
class InboxView {
 public:
  template <typename F>
  void for_each(F&& f) const;
  std::size_t count() const;

 private:
  friend class NodeContext;
  friend class Simulator;
  InboxView(const Simulator& sim, NodeId v) : sim_(&sim), v_(v) {}
  const Simulator* sim_;
  NodeId v_;
};

// Everything a node may look at during its compute step.
class NodeContext {
 public:
  NodeId id() const { return id_; }
  std::uint64_t round() const { return round_; }
  std::size_t neighbor_count() const;
  std::size_t node_count() const;
  InboxView inbox() const { return InboxView(*sim_, id_); }
  Rng& rng() { return *rng_; }
  Pools& pools() { return *pools_; }

 private:
  friend class Simulator;
  NodeContext(Simulator& sim, NodeId id, std::uint64_t round, Rng& rng, Pools& pools)
      : sim_(&sim), id_(id), round_(round), rng_(&rng), pools_(&pools) {}
  Simulator* sim_;
  NodeId id_;
  std::uint64_t round_;
  Rng* rng_;
  Pools* pools_;
};

class NodeProgram {
 public:
  virtual ~NodeProgram() = default;
  // Called exactly once per round. Leave `out` empty to stay silent.
  virtual void step(NodeContext& ctx, RoundMessage& out) = 0;
};

class Adversary {
 public:
  virtual ~Adversary() = default;
  // Edits applied at the end of `round`, producing G_{round+1}.
  virtual std::vector<EdgeEdit> next_batch(const Graph& g, std::uint64_t round) = 0;
  virtual std::string kind() const = 0;
};

enum class Phase : std::uint8_t { kCompute, kDeliver, kChurn };

struct SimOptions {
  std::uint64_t seed = 0;
  bool ledger_detail = false;
};

// Lock-step round engine. Each round runs compute (every node steps once
// against last round's deliveries), deliver (broadcasts go to neighbours in
// the round-start topology, the ledger is charged), then churn.
class Simulator {
 public:
  Simulator(DynamicGraph graph, SimOptions options);
  ~Simulator();

  void set_program(NodeId v, std::unique_ptr<NodeProgram> program);
  void set_adversary(std::unique_ptr<Adversary> adversary) { adversary_ = std::move(adversary); }

  void compute();
  void deliver();
  void churn();
  void run_round() {
    compute();
    deliver();
    churn();
  }
  void run(std::uint64_t rounds) {
    for (std::uint64_t i = 0; i < rounds; ++i) run_round();
  }

  std::uint64_t round() const { return round_; }
  Phase next_phase() const { return phase_; }
  const DynamicGraph& dynamic_graph() const { return graph_; }
  const Graph& graph() const { return graph_.graph(); }
  std::size_t node_count() const { return graph_.graph().node_count(); }
  NodeProgram& program(NodeId v) { return *programs_[v]; }
  const RoundMessage& staged(NodeId v) const { return out_[v]; }
  InboxView inbox(NodeId v) const { return InboxView(*this, v); }

  BandwidthLedger& ledger() { return ledger_; }
  const BandwidthLedger& ledger() const { return ledger_; }
  EventLog& log() { return log_; }
  Pools& pools() { return pools_; }
  std::uint64_t seed() const { return options_.seed; }

 private:
  friend class InboxView;
  friend class NodeContext;

  DynamicGraph graph_;
  SimOptions options_;
  std::unique_ptr<Adversary> adversary_;
  std::vector<std::unique_ptr<NodeProgram>> programs_;
  std::vector<Rng> rngs_;
  std::vector<RoundMessage> out_;   // staged this round
  std::vector<RoundMessage> prev_;  // delivered at the end of last round
  // Inverse of the last churn batch, per touched node: neighbours added
  // (skip) and removed (include) relative to the round-start topology.
  std::vector<std::uint8_t> touched_;
  std::vector<std::pair<NodeId, NodeId>> added_;
  std::vector<std::pair<NodeId, NodeId>> removed_;
  std::uint64_t round_ = 0;
  Phase phase_ = Phase::kCompute;
  BandwidthLedger ledger_;
  EventLog log_;
  Pools pools_;
};

template <typename F>
void InboxView::for_each(F&& f) const {
  const Simulator& s = *sim_;
  const auto& prev = s.prev_;
  const auto nbrs = s.graph_.graph().neighbors(v_);
  if (!s.touched_[v_]) {
    for (const NodeId u : nbrs) {
      if (!prev[u].empty()) f(u, prev[u]);
    }
    return;
  }
  auto in = [&](const std::vector<std::pair<NodeId, NodeId>>& list, NodeId u) {
    for (const auto& [a, b] : list) {
      if (a == v_ && b == u) return true;
    }
    return false;
  };
  for (const NodeId u : nbrs) {
    if (!prev[u].empty() && !in(s.added_, u)) f(u, prev[u]);
  }
  for (const auto& [a, b] : s.removed_) {
    if (a == v_ && !prev[b].empty()) f(b, prev[b]);
  }
}

// Floods a marker from `origins` for `rounds` rounds over a dynamic graph
// (churn from `adversary`, may be null). Returns the informed set.
std::vector<bool> flood(DynamicGraph graph, std::unique_ptr<Adversary> adversary,
                        std::span<const NodeId> origins, std::uint32_t rounds);
// Same over an explicit trace G_0, G_1, ...; the last snapshot persists.
std::vector<bool> flood_trace(const std::vector<Graph>& trace, std::span<const NodeId> origins,
                              std::uint32_t rounds);

}  // namespace dyndense
