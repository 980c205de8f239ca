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

#include "dyndense/sim.hpp"

#include <algorithm>
#include <bit>
#include <cstring>

#include "dyndense/adversary.hpp"
#include "dyndense/error.hpp"

namespace dyndense {

std::string_view channel_name(Channel c) {
  switch (c) {
    case Channel::kNodeCoarse: return "count_nodes_coarse";
    case Channel::kNodeFine: return "count_nodes_fine";
    case Channel::kEdgeCoarse: return "count_edges_coarse";
    case Channel::kEdgeFine: return "count_edges_fine";
    case Channel::kMembership: return "membership";
    case Channel::kDropFlag: return "drop_flag";
    case Channel::kPadCoarse: return "padding_coarse";
    case Channel::kPadFine: return "padding_fine";
    case Channel::kFlood: return "flood";
    case Channel::kUser: return "user";
  }
  return "user";
}

namespace {

std::uint32_t width(std::uint64_t v) { return v == 0 ? 1 : static_cast<std::uint32_t>(std::bit_width(v)); }

}  // namespace

std::uint32_t part_bits(const Part& part, std::size_t node_count) {
  struct Visitor {
    std::size_t n;
    std::uint32_t operator()(const BitPayload&) const { return 1; }
    std::uint32_t operator()(const GeoPayload& p) const {
      if (!p.tuple) throw Error(ErrorCode::kInvalidArgument, "null geometric tuple");
      return std::max<std::uint32_t>(1, p.tuple->bits);
    }
    std::uint32_t operator()(const ExpPayload& p) const {
      if (!p.tuple || p.tuple->z.empty()) {
        throw Error(ErrorCode::kInvalidArgument, "empty exponential tuple");
      }
      return static_cast<std::uint32_t>(64 * p.tuple->z.size());
    }
    std::uint32_t operator()(const ExpCoordPayload& p) const {
      return 64 + width(p.length == 0 ? 0 : p.length - 1);
    }
    std::uint32_t operator()(const WeightPayload& p) const {
      if (!p.set) throw Error(ErrorCode::kInvalidArgument, "null weight set");
      const std::uint32_t per = width(n == 0 ? 0 : n - 1) + width(p.set->max_weight);
      return std::max<std::uint32_t>(1, p.set->support * per);
    }
    std::uint32_t operator()(const BytesPayload& p) const {
      if (p.bytes.empty()) throw Error(ErrorCode::kInvalidArgument, "empty byte payload");
      return static_cast<std::uint32_t>(8 * p.bytes.size());
    }
  };
  return std::visit(Visitor{node_count}, part.payload);
}

std::uint64_t part_hash(const Part& part) {
  struct Visitor {
    std::uint64_t operator()(const BitPayload& p) const { return p.value ? 1 : 2; }
    std::uint64_t operator()(const GeoPayload& p) const { return p.tuple->hash; }
    std::uint64_t operator()(const ExpPayload& p) const { return p.tuple->hash; }
    std::uint64_t operator()(const ExpCoordPayload& p) const {
      std::uint64_t bits;
      std::memcpy(&bits, &p.value, sizeof bits);
      return splitmix64(bits ^ (static_cast<std::uint64_t>(p.index) << 32 | p.length));
    }
    std::uint64_t operator()(const WeightPayload& p) const { return p.set->hash; }
    std::uint64_t operator()(const BytesPayload& p) const { return fnv1a64(p.bytes); }
  };
  const std::uint64_t h = std::visit(Visitor{}, part.payload);
  return splitmix64(h ^ (static_cast<std::uint64_t>(part.channel) << 56) ^
                    (static_cast<std::uint64_t>(part.payload.index()) << 48));
}

void BandwidthLedger::record_part(Channel c, std::uint64_t round, NodeId sender,
                                  std::uint32_t bits, std::size_t fanout) {
  if (fanout == 0) return;
  ChannelStats& s = channels_[static_cast<std::size_t>(c)];
  s.deliveries += fanout;
  s.total_bits += static_cast<std::uint64_t>(bits) * fanout;
  if (bits > s.max_bits) {
    s.max_bits = bits;
    s.max_round = round;
    s.max_sender = sender;
  }
  s.histogram[bits] += fanout;
}

void BandwidthLedger::record_message(std::uint64_t round, NodeId sender, std::uint32_t bits,
                                     std::span<const NodeId> receivers) {
  if (receivers.empty()) return;
  deliveries_ += receivers.size();
  total_bits_ += static_cast<std::uint64_t>(bits) * receivers.size();
  max_edge_bits_ = std::max(max_edge_bits_, bits);
  if (detail_) {
    for (const NodeId v : receivers) entries_.push_back({round, sender, v, bits});
  }
}

BandwidthReport assert_bandwidth(const BandwidthLedger& ledger,
                                 const std::map<Channel, double>& bounds) {
  BandwidthReport report;
  for (std::size_t i = 0; i < kChannelCount; ++i) {
    const auto c = static_cast<Channel>(i);
    const auto& s = ledger.stats(c);
    const auto bound = bounds.find(c);
    if (s.deliveries == 0 && bound == bounds.end()) continue;
    BandwidthRow row;
    row.channel = c;
    row.deliveries = s.deliveries;
    row.max_bits = s.max_bits;
    if (bound != bounds.end()) {
      row.bound_bits = bound->second;
      for (const auto& [bits, count] : s.histogram) {
        if (static_cast<double>(bits) > bound->second) row.violations.emplace_back(bits, count);
      }
      row.pass = row.violations.empty();
    }
    report.pass = report.pass && row.pass;
    report.rows.push_back(std::move(row));
  }
  return report;
}

std::size_t NodeContext::neighbor_count() const { return sim_->graph().degree(id_); }
std::size_t NodeContext::node_count() const { return sim_->node_count(); }

std::size_t InboxView::count() const {
  std::size_t c = 0;
  for_each([&](NodeId, const RoundMessage&) { ++c; });
  return c;
}

Simulator::Simulator(DynamicGraph graph, SimOptions options)
    : graph_(std::move(graph)), options_(options) {
  const std::size_t n = graph_.graph().node_count();
  programs_.resize(n);
  rngs_.reserve(n);
  for (std::size_t v = 0; v < n; ++v) rngs_.emplace_back(derive_seed(options_.seed, "node", v));
  out_.resize(n);
  prev_.resize(n);
  touched_.assign(n, 0);
  ledger_.set_detail(options_.ledger_detail);
}

Simulator::~Simulator() = default;

void Simulator::set_program(NodeId v, std::unique_ptr<NodeProgram> program) {
  programs_.at(v) = std::move(program);
}

void Simulator::compute() {
  if (phase_ != Phase::kCompute) throw Error(ErrorCode::kInvalidArgument, "compute out of phase");
  const std::size_t n = node_count();
  for (NodeId v = 0; v < n; ++v) {
    out_[v].clear();
    if (!programs_[v]) continue;
    NodeContext ctx(*this, v, round_, rngs_[v], pools_);
    try {
      programs_[v]->step(ctx, out_[v]);
    } catch (const Error& e) {
      throw Error(ErrorCode::kHandlerPanic, "node " + std::to_string(v) + " round " +
                                                std::to_string(round_) + " seed " +
                                                std::to_string(options_.seed) + ": " + e.what());
    } catch (const std::exception& e) {
      throw Error(ErrorCode::kHandlerPanic, "node " + std::to_string(v) + " round " +
                                                std::to_string(round_) + " seed " +
                                                std::to_string(options_.seed) + ": " + e.what());
    }
  }
  phase_ = Phase::kDeliver;
}

void Simulator::deliver() {
  if (phase_ != Phase::kDeliver) throw Error(ErrorCode::kInvalidArgument, "deliver out of phase");
  const Graph& g = graph();
  const std::size_t n = node_count();
  for (NodeId v = 0; v < n; ++v) {
    const RoundMessage& m = out_[v];
    if (m.empty()) continue;
    const auto receivers = g.neighbors(v);
    std::uint32_t total = 0;
    std::uint64_t h = 0;
    for (const Part& p : m.parts) {
      const std::uint32_t bits = part_bits(p, n);
      total += bits;
      h = splitmix64(h ^ part_hash(p));
      ledger_.record_part(p.channel, round_, v, bits, receivers.size());
    }
    ledger_.record_message(round_, v, total, receivers);
    if (log_.send_events()) log_.record(round_, v, "send", h, total);
  }
  phase_ = Phase::kChurn;
}

void Simulator::churn() {
  if (phase_ != Phase::kChurn) throw Error(ErrorCode::kInvalidArgument, "churn out of phase");
  for (const auto& [a, _] : added_) touched_[a] = 0;
  for (const auto& [a, _] : removed_) touched_[a] = 0;
  added_.clear();
  removed_.clear();
  if (adversary_) {
    const std::vector<EdgeEdit> batch = adversary_->next_batch(graph(), round_);
    graph_.apply(batch);
    if (!batch.empty()) {
      std::uint64_t h = 0;
      for (const EdgeEdit& e : batch) {
        h = splitmix64(h ^ (static_cast<std::uint64_t>(e.kind) << 62) ^
                       (static_cast<std::uint64_t>(e.u) << 31) ^ e.v);
        auto& list = e.kind == EditKind::kAdd ? added_ : removed_;
        list.emplace_back(e.u, e.v);
        list.emplace_back(e.v, e.u);
        touched_[e.u] = 1;
        touched_[e.v] = 1;
      }
      log_.record(round_, -1, "churn", h, batch.size());
    }
  } else {
    graph_.apply({});
  }
  std::swap(prev_, out_);
  ++round_;
  phase_ = Phase::kCompute;
}

namespace {

class FloodProgram final : public NodeProgram {
 public:
  FloodProgram(bool informed, std::uint32_t rounds) : informed_(informed), rounds_(rounds) {}
  void step(NodeContext& ctx, RoundMessage& out) override {
    ctx.inbox().for_each([&](NodeId, const RoundMessage&) { informed_ = true; });
    if (informed_ && ctx.round() < rounds_) out.add(Channel::kFlood, BitPayload{true});
  }
  bool informed() const { return informed_; }

 private:
  bool informed_;
  std::uint32_t rounds_;
};

}  // namespace

std::vector<bool> flood(DynamicGraph graph, std::unique_ptr<Adversary> adversary,
                        std::span<const NodeId> origins, std::uint32_t rounds) {
  if (rounds == 0) throw Error(ErrorCode::kInvalidArgument, "flood needs at least one round");
  const std::size_t n = graph.graph().node_count();
  std::vector<bool> start(n, false);
  for (const NodeId v : origins) start.at(v) = true;
  Simulator sim(std::move(graph), SimOptions{});
  sim.log().set_send_events(false);
  sim.set_adversary(std::move(adversary));
  for (NodeId v = 0; v < n; ++v) sim.set_program(v, std::make_unique<FloodProgram>(start[v], rounds));
  sim.run(rounds);
  sim.compute();  // absorb the deliveries of the last round
  std::vector<bool> reached(n);
  for (NodeId v = 0; v < n; ++v) reached[v] = static_cast<FloodProgram&>(sim.program(v)).informed();
  return reached;
}

std::vector<bool> flood_trace(const std::vector<Graph>& trace, std::span<const NodeId> origins,
                              std::uint32_t rounds) {
  if (trace.empty()) throw Error(ErrorCode::kInvalidArgument, "empty trace");
  auto adversary = std::make_unique<TraceAdversary>(trace);
  const std::uint32_t r = adversary->max_churn();
  return flood(DynamicGraph(trace.front(), r), std::move(adversary), origins, rounds);
}

}  // namespace dyndense
