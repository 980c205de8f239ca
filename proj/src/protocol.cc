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

#include "dyndense/protocol.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "dyndense/error.hpp"

namespace dyndense {

std::uint32_t default_p_cap(std::size_t n, double epsilon) {
  const double delta = epsilon / 24.0;
  if (n <= 1) return 1;
  return static_cast<std::uint32_t>(std::ceil(std::log(static_cast<double>(n)) / std::log1p(delta))) + 1;
}

std::uint32_t default_padding_cap(std::size_t n) {
  if (n <= 1) return 1;
  return std::max<std::uint32_t>(1, static_cast<std::uint32_t>(std::ceil(8.0 * std::log(static_cast<double>(n)))));
}

CountingParams counting_params(const ProtocolParams& p) {
  CountingParams c;
  c.D = p.D;
  c.epsilon = p.counting_epsilon > 0 ? p.counting_epsilon : p.delta();
  c.delta_fail = p.delta();
  c.c = p.c;
  c.max_tuple_length = p.max_tuple_length;
  c.exact = p.exact_counting;
  c.strict = p.strict_congest;
  return c;
}

std::uint32_t select_level(const std::vector<LevelRecord>& records, std::uint32_t k) {
  if (records.empty()) throw Error(ErrorCode::kNoCompleteFamily, "empty family");
  std::uint32_t best = 0;
  double best_ratio = -1;
  for (std::uint32_t i = 0; i < records.size(); ++i) {
    const double denom = std::max(static_cast<double>(k), records[i].n);
    const double ratio = denom > 0 ? records[i].m / denom : 0.0;
    if (ratio > best_ratio) {
      best_ratio = ratio;
      best = i;
    }
  }
  return best;
}

ProtocolNode::ProtocolNode(const ProtocolParams& params, std::size_t n)
    : params_(params), count_params_(counting_params(params)), n_(n) {
  if (params.D == 0) throw Error(ErrorCode::kInvalidArgument, "D must be at least 1");
  if (!(params.epsilon > 0) || params.epsilon > 1) {
    throw Error(ErrorCode::kInvalidArgument, "epsilon must be in (0, 1]");
  }
  pad_params_ = count_params_;
  pad_params_.epsilon = params.delta();
  p_cap_ = params.p_cap > 0 ? params.p_cap : default_p_cap(n, params.epsilon);
  pad_cap_ = params.padding_cap > 0 ? params.padding_cap : default_padding_cap(n);
  multiplier_ = peel_multiplier(params.threshold_factor, params.delta());
}

bool ProtocolNode::membership(std::uint64_t query_id) const {
  auto it = answers_.find(query_id);
  if (it == answers_.end()) {
    throw Error(ErrorCode::kUnknownSnapshot, "unknown snapshot " + std::to_string(query_id));
  }
  return it->second;
}

void ProtocolNode::step(NodeContext& ctx, RoundMessage& out) {
  std::uint32_t member_bits = 0;
  bool drop_heard = false;
  ctx.inbox().for_each([&](NodeId, const RoundMessage& m) {
    for (const Part& p : m.parts) {
      switch (p.channel) {
        case Channel::kNodeCoarse:
        case Channel::kNodeFine:
          nodes_.absorb(p);
          break;
        case Channel::kEdgeCoarse:
        case Channel::kEdgeFine:
          edges_.absorb(p);
          break;
        case Channel::kMembership:
          if (std::get<BitPayload>(p.payload).value) ++member_bits;
          break;
        case Channel::kDropFlag:
          drop_heard |= std::get<BitPayload>(p.payload).value;
          break;
        case Channel::kPadCoarse:
        case Channel::kPadFine:
          pad_.absorb(p);
          break;
        default:
          break;
      }
    }
  });
  level_completed_ = false;
  published_now_ = false;
  query_finished_now_ = false;
  maintain(ctx, member_bits, drop_heard, out);
  run_query(ctx, out);
}

void ProtocolNode::maintain(NodeContext& ctx, std::uint32_t member_bits, bool drop_heard,
                            RoundMessage& out) {
  const std::uint64_t t = ctx.round();
  if (stage_ == Stage::kInit) {
    j_ = 0;
    in_ = true;
    flags_.assign(1, true);
    level_set_at_ = t;
    drop_or_ = false;
    reset_pending_ = false;
    nodes_.start(t, ctx.id(), 1, count_params_);
    stage_ = Stage::kNodes;
  } else if (stage_ == Stage::kThreshold) {
    const bool next = in_ && static_cast<double>(member_bits) >= threshold_;
    drop_or_ = in_ && !next;
    in_ = next;
    ++j_;
    flags_.push_back(in_);
    level_set_at_ = t;
    reset_pending_ = false;
    nodes_.start(t, ctx.id(), in_ ? 1 : 0, count_params_);
    stage_ = Stage::kNodes;
  }

  if (stage_ == Stage::kNodes) {
    const bool coarse_before = nodes_.coarse_done();
    if (!coarse_before) drop_or_ |= drop_heard;
    nodes_.step(t, ctx.node_count(), ctx.rng(), ctx.pools(), out);
    if (!coarse_before && nodes_.coarse_done()) {
      reset_pending_ = nodes_.coarse() == 0 || (j_ > 0 && !drop_or_) || j_ >= p_cap_;
    }
    if (!nodes_.coarse_done() && drop_or_) out.add(Channel::kDropFlag, BitPayload{true});
    if (!nodes_.done() && nodes_.coarse_done() && t + 1 == nodes_.end_round()) {
      // Warm-up for the edge count: neighbours learn who is in V_j.
      out.add(Channel::kMembership, BitPayload{reset_pending_ || in_});
    }
    if (nodes_.done()) {
      double n = nodes_.result();
      if (reset_pending_) {
        if (j_ > 0) {
          Family f;
          f.id = ++family_counter_;
          f.records = records_;
          f.flags.assign(flags_.begin(), flags_.begin() + j_);
          f.started = pass_start_;
          f.published = t;
          served_ = std::move(f);
          published_now_ = true;
        }
        pass_start_ = t;
        j_ = 0;
        in_ = true;
        flags_.assign(1, true);
        records_.clear();
        level_set_at_ = t;
        n = n0_;
      } else if (first_level_) {
        n0_ = n;
        pass_start_ = t;
      }
      first_level_ = false;
      reset_pending_ = false;
      cur_n_ = n;
      edge_start_ = t;
      edges_.start(t, ctx.id(), in_ ? member_bits : 0, count_params_);
      stage_ = Stage::kEdges;
    }
  }

  if (stage_ == Stage::kEdges) {
    edges_.step(t, ctx.node_count(), ctx.rng(), ctx.pools(), out);
    if (edges_.done()) {
      const double m = edges_.result() / 2.0;
      records_.push_back(LevelRecord{m, cur_n_, edge_start_, level_set_at_});
      threshold_ = peel_threshold(multiplier_, m, cur_n_);
      if (in_) out.add(Channel::kMembership, BitPayload{true});
      level_completed_ = true;
      stage_ = Stage::kThreshold;
    }
  }
}

void ProtocolNode::run_query(NodeContext& ctx, RoundMessage& out) {
  const std::uint64_t t = ctx.round();
  if (pending_) {
    const QueryRequest q = *pending_;
    pending_.reset();
    begin_query(ctx, q, out);
    return;
  }
  if (!query_ || query_->status != QueryStatus::kRunning) return;
  pad_.step(t, ctx.node_count(), ctx.rng(), ctx.pools(), out);
  if (!pad_.done()) return;
  NodeQuery& q = *query_;
  const double est = pad_.result();
  ++q.attempts;
  q.estimates.push_back(est);
  q.coins.push_back(coin_);
  if (est >= q.lower && est <= q.upper) {
    q.chosen_attempt = q.attempts - 1;
    q.member = q.in_level || coin_;
    finish_query(t);
    return;
  }
  if (q.attempts >= pad_cap_) {
    // Fall back to the closest attempt: the smallest estimate at or above
    // the lower bound, else the largest one.
    std::optional<std::uint32_t> pick;
    for (std::uint32_t a = 0; a < q.estimates.size(); ++a) {
      if (q.estimates[a] >= q.lower && (!pick || q.estimates[a] < q.estimates[*pick])) pick = a;
    }
    if (!pick) {
      pick = 0;
      for (std::uint32_t a = 1; a < q.estimates.size(); ++a) {
        if (q.estimates[a] > q.estimates[*pick]) pick = a;
      }
    }
    q.chosen_attempt = *pick;
    q.member = q.in_level || q.coins[*pick];
    q.cap_hit = true;
    finish_query(t);
    return;
  }
  start_attempt(ctx, out);
}

void ProtocolNode::begin_query(NodeContext& ctx, const QueryRequest& req, RoundMessage& out) {
  const std::uint64_t t = ctx.round();
  NodeQuery q;
  q.id = req.id;
  q.k = req.k;
  q.issued = t;
  if (!served_) {
    q.status = QueryStatus::kNoCompleteFamily;
    q.finished = t;
    query_ = std::move(q);
    query_finished_now_ = true;
    return;
  }
  const Family& f = *served_;
  q.family_id = f.id;
  q.level = select_level(f.records, req.k);
  q.in_level = f.flags[q.level];
  const double delta = params_.delta();
  const double n_i = f.records[q.level].n;
  const double target = (1.0 + delta) * static_cast<double>(req.k);
  if (req.k == 0 || n_i >= target) {
    q.member = q.in_level;
    query_ = std::move(q);
    finish_query(t);
    return;
  }
  q.padded = true;
  q.Delta = target - n_i;
  q.lower = (1.0 + delta) * q.Delta;
  const double n0 = f.records.front().n;
  const double outside = std::max(1.0, n0 - n_i);
  if (params_.padding_mode == PaddingMode::kLiteral) {
    q.upper = (1.0 + 2.0 * delta) * q.Delta;
    q.coin_p = std::min(1.0, q.Delta / std::max(1.0, n0));
  } else {
    q.upper = std::max((1.0 + 2.0 * delta) * q.Delta, q.lower + std::sqrt(q.lower) + 1.0);
    q.coin_p = std::min(1.0, 0.5 * (q.lower + q.upper) / outside);
  }
  query_ = std::move(q);
  start_attempt(ctx, out);
}

void ProtocolNode::start_attempt(NodeContext& ctx, RoundMessage& out) {
  NodeQuery& q = *query_;
  coin_ = !q.in_level && ctx.rng().bernoulli(q.coin_p);
  pad_.start(ctx.round(), ctx.id(), coin_ ? 1 : 0, pad_params_);
  pad_.step(ctx.round(), ctx.node_count(), ctx.rng(), ctx.pools(), out);
}

void ProtocolNode::finish_query(std::uint64_t round) {
  NodeQuery& q = *query_;
  q.status = QueryStatus::kDone;
  q.finished = round;
  answers_[q.id] = q.member;
  query_finished_now_ = true;
}

// ---------------------------------------------------------------------------

ProtocolRunner::ProtocolRunner(DynamicGraph graph, const ProtocolParams& params,
                               std::uint64_t seed, std::unique_ptr<Adversary> adversary,
                               bool ledger_detail)
    : params_(params), sim_(std::move(graph), SimOptions{seed, ledger_detail}) {
  const std::size_t n = sim_.node_count();
  if (n == 0) throw Error(ErrorCode::kInvalidArgument, "empty graph");
  sim_.set_adversary(std::move(adversary));
  for (NodeId v = 0; v < n; ++v) sim_.set_program(v, std::make_unique<ProtocolNode>(params, n));
  p_cap_ = params.p_cap > 0 ? params.p_cap : default_p_cap(n, params.epsilon);
  pad_cap_ = params.padding_cap > 0 ? params.padding_cap : default_padding_cap(n);
}

const ProtocolNode& ProtocolRunner::node(NodeId v) const {
  return static_cast<const ProtocolNode&>(const_cast<Simulator&>(sim_).program(v));
}

ProtocolNode& ProtocolRunner::mut_node(NodeId v) {
  return static_cast<ProtocolNode&>(sim_.program(v));
}

std::uint64_t ProtocolRunner::request_query(std::uint32_t k) {
  const std::uint64_t id = next_query_id_++;
  queue_.push_back(QueryRequest{id, k});
  return id;
}

void ProtocolRunner::desync(const std::string& what) const {
  throw Error(ErrorCode::kDesyncDetected, what + " at round " + std::to_string(sim_.round()) +
                                              " (seed " + std::to_string(sim_.seed()) + ")");
}

void ProtocolRunner::step() {
  const std::size_t n = sim_.node_count();
  if (!in_flight_ && !queue_.empty()) {
    const QueryRequest q = queue_.front();
    queue_.pop_front();
    for (NodeId v = 0; v < n; ++v) mut_node(v).inject_query(q);
    in_flight_ = true;
  }
  sim_.compute();
  const std::uint64_t t = sim_.round();
  const ProtocolNode& lead = node(0);
  if (lead.level_completed()) check_level(t);
  if (lead.published()) collect_family(t);
  if (lead.query_finished_now()) collect_query(t);
  for (NodeId v = 1; v < n; ++v) {
    const ProtocolNode& x = node(v);
    if (x.level_completed() != lead.level_completed() || x.published() != lead.published() ||
        x.query_finished_now() != lead.query_finished_now()) {
      desync("node " + std::to_string(v) + " out of phase");
    }
  }
  sim_.deliver();
  sim_.churn();
}

void ProtocolRunner::check_level(std::uint64_t round) {
  const ProtocolNode& lead = node(0);
  const LevelRecord& ref = lead.records().back();
  for (NodeId v = 1; v < sim_.node_count(); ++v) {
    const ProtocolNode& x = node(v);
    if (x.level() != lead.level() || x.records().empty() || !(x.records().back() == ref)) {
      desync("level scalars differ at node " + std::to_string(v));
    }
  }
  if (seen_level_) level_lengths_.push_back(round - last_level_round_);
  seen_level_ = true;
  last_level_round_ = round;
  const std::uint64_t h = fnv1a64(std::to_string(ref.m) + "/" + std::to_string(ref.n));
  sim_.log().record(round, -1, "level", h, lead.level());
  if (on_level) on_level(round, ref, lead.level());
}

void ProtocolRunner::collect_family(std::uint64_t round) {
  const std::size_t n = sim_.node_count();
  const auto& ref = *node(0).served();
  FamilyView view;
  view.id = ref.id;
  view.records = ref.records;
  view.started = ref.started;
  view.published = ref.published;
  view.levels.assign(ref.records.size(), std::vector<bool>(n, false));
  for (NodeId v = 0; v < n; ++v) {
    const auto& f = node(v).served();
    if (!f || f->id != ref.id || f->records != ref.records || f->flags.size() != ref.records.size()) {
      desync("published family differs at node " + std::to_string(v));
    }
    for (std::size_t l = 0; l < f->flags.size(); ++l) view.levels[l][v] = f->flags[l];
  }
  sim_.log().record(round, -1, "publish", view.id, view.records.size());
  families_.push_back(std::move(view));
  if (on_publish) on_publish(families_.back());
}

void ProtocolRunner::collect_query(std::uint64_t round) {
  const std::size_t n = sim_.node_count();
  const NodeQuery& ref = *node(0).query();
  QueryOutcome o;
  o.id = ref.id;
  o.k = ref.k;
  o.issued = ref.issued;
  o.finished = round;
  o.no_family = ref.status == QueryStatus::kNoCompleteFamily;
  o.family_id = ref.family_id;
  o.level = ref.level;
  o.padded = ref.padded;
  o.Delta = ref.Delta;
  o.lower = ref.lower;
  o.upper = ref.upper;
  o.attempts = ref.attempts;
  o.cap_hit = ref.cap_hit;
  o.estimates = ref.estimates;
  o.members.assign(n, false);
  for (NodeId v = 0; v < n; ++v) {
    const auto& q = node(v).query();
    if (!q || q->id != ref.id || q->status != ref.status || q->level != ref.level ||
        q->attempts != ref.attempts || q->estimates != ref.estimates) {
      desync("query state differs at node " + std::to_string(v));
    }
    o.members[v] = q->member;
  }
  if (!o.no_family) {
    auto it = std::find_if(families_.begin(), families_.end(),
                           [&](const FamilyView& f) { return f.id == o.family_id; });
    if (it == families_.end()) desync("query refers to an unknown family");
    o.record = it->records[o.level];
    o.pass_length = it->length();
  }
  in_flight_ = false;
  sim_.log().record(round, -1, "query", o.id, o.attempts);
  queries_.push_back(std::move(o));
  if (on_query) on_query(queries_.back(), sim_.graph());
}

}  // namespace dyndense
