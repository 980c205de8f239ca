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

#include "dyndense/counting.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>

#include "dyndense/error.hpp"
#include "dyndense/kernels.hpp"

namespace dyndense {

std::uint32_t geo_length(double delta_fail) {
  if (!(delta_fail > 0 && delta_fail < 1)) {
    throw Error(ErrorCode::kInvalidArgument, "delta_fail must lie in (0,1)");
  }
  return std::max<std::uint32_t>(1, static_cast<std::uint32_t>(std::ceil(65.0 * std::log(1.0 / delta_fail))));
}

std::uint32_t exp_length(double epsilon, double c, double upper_bound) {
  if (!(epsilon > 0)) throw Error(ErrorCode::kInvalidArgument, "epsilon must be positive");
  if (upper_bound <= 1) return 1;
  const double l = std::ceil(27.0 * (2.0 + 2.0 * c) * std::log(upper_bound) / (epsilon * epsilon));
  if (l >= 1e9) throw Error(ErrorCode::kInvalidArgument, "tuple length overflow");
  return std::max<std::uint32_t>(1, static_cast<std::uint32_t>(l));
}

std::uint32_t fine_length(const CountingParams& p, double upper_bound) {
  const std::uint32_t l = exp_length(p.epsilon, p.c, upper_bound);
  return p.max_tuple_length > 0 ? std::min(l, p.max_tuple_length) : l;
}

GeoTuple sample_geo(Rng& rng, std::uint64_t copies, std::uint32_t l, std::uint64_t* truncated) {
  GeoTuple t;
  t.x.resize(l);
  if (copies == 0) return t;
  for (std::uint32_t i = 0; i < l; ++i) {
    std::uint32_t x;
    if (copies == 1) {
      // Tosses until the first head, one bit per toss.
      const std::uint64_t word = rng.next_u64();
      x = word == 0 ? kMaxTosses : static_cast<std::uint32_t>(std::countr_zero(word)) + 1;
    } else {
      const double u = rng.uniform_open0();
      const double tail = -std::expm1(std::log(u) / static_cast<double>(copies));
      const double v = tail <= 0 ? kMaxTosses : std::ceil(-std::log2(tail));
      x = v >= kMaxTosses ? kMaxTosses : std::max<std::uint32_t>(1, static_cast<std::uint32_t>(v));
    }
    if (x == kMaxTosses && truncated != nullptr) ++*truncated;
    t.x[i] = static_cast<std::uint8_t>(x);
  }
  return t;
}

ExpTuple sample_exp(Rng& rng, std::uint64_t copies, std::uint32_t l) {
  ExpTuple t;
  t.z.assign(l, std::numeric_limits<double>::infinity());
  if (copies == 0) return t;
  const double rate = static_cast<double>(copies);
  for (std::uint32_t i = 0; i < l; ++i) t.z[i] = rng.exponential(rate);
  return t;
}

double geo_estimate(const GeoTuple& t) {
  if (t.empty()) return 0;
  std::vector<std::uint8_t> x = t.x;
  const std::size_t mid = (x.size() - 1) / 2;
  std::nth_element(x.begin(), x.begin() + static_cast<std::ptrdiff_t>(mid), x.end());
  return std::ldexp(1.0, x[mid]);
}

double exp_estimate(const ExpTuple& t) {
  if (t.empty()) return 0;
  const double sum = kernels::active().sum_f64(t.z.data(), t.z.size());
  return static_cast<double>(t.z.size()) / sum;
}

void TwoStageCounter::start(std::uint64_t round, NodeId self, std::uint64_t weight,
                            const CountingParams& params, bool coarse_only) {
  if (params.D == 0) throw Error(ErrorCode::kInvalidArgument, "D must be at least 1");
  params_ = params;
  state_ = State::kCoarse;
  coarse_only_ = coarse_only;
  self_ = self;
  weight_ = weight;
  start_ = round;
  end_ = round + (coarse_only ? params.D : 2ull * params.D);
  coarse_known_ = false;
  coarse_ = 0;
  result_ = 0;
  fine_l_ = 0;
  geo_.reset();
  exp_.reset();
  weights_.reset();
  scratch_ = false;
  changed_ = false;
  reset_seen();
  strict_z_.clear();
}

void TwoStageCounter::begin_coarse(std::size_t n, Rng& rng, Pools&) {
  if (params_.exact) {
    WeightSet s;
    s.w.assign(n, 0);
    if (weight_ > 0) {
      s.w[self_] = static_cast<std::uint32_t>(std::min<std::uint64_t>(weight_, UINT32_MAX));
    }
    s.seal();
    weights_ = s.empty() ? nullptr : std::make_shared<const WeightSet>(std::move(s));
    return;
  }
  if (weight_ == 0) return;
  const std::uint32_t l = geo_length(params_.delta_fail);
  GeoTuple t = params_.geo_source ? params_.geo_source(self_, weight_, l)
                                  : sample_geo(rng, weight_, l, &truncated_);
  t.seal();
  geo_ = std::make_shared<const GeoTuple>(std::move(t));
}

void TwoStageCounter::begin_fine(std::size_t n, Rng& rng, Pools& pools) {
  scratch_ = false;
  changed_ = false;
  reset_seen();
  if (params_.exact) {
    fine_l_ = 0;
    begin_coarse(n, rng, pools);  // same payload kind, fresh flood
    return;
  }
  fine_l_ = fine_length(params_, 2.0 * coarse_);
  if (params_.strict) end_ = start_ + params_.D + static_cast<std::uint64_t>(fine_l_) * params_.D;
  if (weight_ == 0) {
    if (params_.strict) strict_z_.assign(fine_l_, std::numeric_limits<double>::infinity());
    return;
  }
  ExpTuple t = params_.exp_source ? params_.exp_source(self_, weight_, fine_l_)
                                  : sample_exp(rng, weight_, fine_l_);
  if (params_.strict) {
    strict_z_ = std::move(t.z);
    return;
  }
  t.seal();
  exp_ = std::make_shared<const ExpTuple>(std::move(t));
}

bool TwoStageCounter::first_sight(const void* ref) {
  // Converged floods repeat one pointer, fresh ones are all distinct.
  if (ref == last_seen_) return false;
  last_seen_ = ref;
  if (2 * (seen_count_ + 1) > seen_.size()) {
    std::vector<const void*> old(std::max<std::size_t>(64, 2 * seen_.size()), nullptr);
    old.swap(seen_);
    seen_count_ = 0;
    for (const void* p : old) {
      if (p != nullptr) first_sight_slot(p);
    }
  }
  return first_sight_slot(ref);
}

bool TwoStageCounter::first_sight_slot(const void* ref) {
  const std::size_t mask = seen_.size() - 1;
  std::size_t i = (reinterpret_cast<std::uintptr_t>(ref) >> 4) * 0x9E3779B97F4A7C15ull >> 20 & mask;
  while (seen_[i] != nullptr) {
    if (seen_[i] == ref) return false;
    i = (i + 1) & mask;
  }
  seen_[i] = ref;
  ++seen_count_;
  return true;
}

void TwoStageCounter::reset_seen() {
  if (seen_count_ > 0) std::fill(seen_.begin(), seen_.end(), nullptr);
  seen_count_ = 0;
  last_seen_ = nullptr;
}

void TwoStageCounter::absorb(const Part& p) {
  const bool coarse = state_ == State::kCoarse && p.channel == coarse_ch_;
  const bool fine = state_ == State::kFine && p.channel == fine_ch_ && fine_l_ != UINT32_MAX;
  if (!coarse && !fine) return;
  if (const auto* w = std::get_if<WeightPayload>(&p.payload)) {
    const WeightRef& ref = w->set;
    if (ref == weights_ || !first_sight(ref.get())) return;
    if (!weights_ && !scratch_) {
      weights_ = ref;
      return;
    }
    if (!scratch_) {
      weight_scratch_.w = weights_->w;
      scratch_ = true;
    }
    if (ref->w.size() != weight_scratch_.w.size()) {
      throw Error(ErrorCode::kDesyncDetected, "weight set size mismatch");
    }
    changed_ |= kernels::active().max_merge_u32(weight_scratch_.w.data(), ref->w.data(), ref->w.size());
    return;
  }
  if (coarse) {
    const auto* g = std::get_if<GeoPayload>(&p.payload);
    if (g == nullptr) return;
    const GeoRef& ref = g->tuple;
    if (ref == geo_ || !first_sight(ref.get())) return;
    if (!geo_ && !scratch_) {
      geo_ = ref;
      return;
    }
    if (!scratch_) {
      geo_scratch_.x = geo_->x;
      scratch_ = true;
    }
    if (ref->x.size() != geo_scratch_.x.size()) {
      throw Error(ErrorCode::kDesyncDetected, "geometric tuple length mismatch");
    }
    changed_ |= kernels::active().max_merge_u8(geo_scratch_.x.data(), ref->x.data(), ref->x.size());
    return;
  }
  if (const auto* c = std::get_if<ExpCoordPayload>(&p.payload)) {
    if (c->index >= strict_z_.size()) {
      throw Error(ErrorCode::kDesyncDetected, "coordinate index out of range");
    }
    strict_z_[c->index] = std::min(strict_z_[c->index], c->value);
    return;
  }
  const auto* e = std::get_if<ExpPayload>(&p.payload);
  if (e == nullptr) return;
  const ExpRef& ref = e->tuple;
  if (ref == exp_ || !first_sight(ref.get())) return;
  if (!exp_ && !scratch_) {
    exp_ = ref;
    return;
  }
  if (!scratch_) {
    exp_scratch_.z = exp_->z;
    scratch_ = true;
  }
  if (ref->z.size() != exp_scratch_.z.size()) {
    throw Error(ErrorCode::kDesyncDetected, "exponential tuple length mismatch");
  }
  changed_ |= kernels::active().min_merge_f64(exp_scratch_.z.data(), ref->z.data(), ref->z.size());
}

void TwoStageCounter::commit(Pools& pools) {
  if (scratch_ && changed_) {
    if (params_.exact) {
      weights_ = pools.weights.intern(std::move(weight_scratch_));
      weight_scratch_ = WeightSet{};
    } else if (state_ == State::kCoarse) {
      geo_ = pools.geo.intern(std::move(geo_scratch_));
      geo_scratch_ = GeoTuple{};
    } else {
      exp_ = pools.exp.intern(std::move(exp_scratch_));
      exp_scratch_ = ExpTuple{};
    }
  }
  scratch_ = false;
  changed_ = false;
  reset_seen();
}

double TwoStageCounter::current_estimate() const {
  if (params_.exact) return weights_ ? static_cast<double>(weights_->total) : 0.0;
  if (state_ == State::kCoarse) return geo_ ? geo_estimate(*geo_) : 0.0;
  if (params_.strict) {
    if (strict_z_.empty() || std::isinf(strict_z_[0])) return 0.0;
    const double sum = kernels::active().sum_f64(strict_z_.data(), strict_z_.size());
    return static_cast<double>(strict_z_.size()) / sum;
  }
  return exp_ ? exp_estimate(*exp_) : 0.0;
}

void TwoStageCounter::broadcast(std::uint64_t round, RoundMessage& out) {
  const Channel ch = state_ == State::kCoarse ? coarse_ch_ : fine_ch_;
  if (params_.exact) {
    if (weights_ && !weights_->empty()) out.add(ch, WeightPayload{weights_});
    return;
  }
  if (state_ == State::kCoarse) {
    if (geo_ && !geo_->empty()) out.add(ch, GeoPayload{geo_});
    return;
  }
  if (params_.strict) {
    const auto i = static_cast<std::uint32_t>((round - start_ - params_.D) / params_.D);
    if (i < strict_z_.size() && !std::isinf(strict_z_[i])) {
      out.add(ch, ExpCoordPayload{i, static_cast<std::uint32_t>(strict_z_.size()), strict_z_[i]});
    }
    return;
  }
  if (exp_ && !exp_->empty()) out.add(ch, ExpPayload{exp_});
}

void TwoStageCounter::step(std::uint64_t round, std::size_t node_count, Rng& rng, Pools& pools,
                           RoundMessage& out) {
  if (!active()) return;
  if (round < start_) return;
  const std::uint64_t o = round - start_;
  const std::uint32_t D = params_.D;
  if (o == 0) {
    begin_coarse(node_count, rng, pools);
    broadcast(round, out);
    return;
  }
  commit(pools);
  if (state_ == State::kCoarse) {
    if (o < D) {
      broadcast(round, out);
      return;
    }
    coarse_ = current_estimate();
    coarse_known_ = true;
    if (coarse_only_) {
      result_ = coarse_;
      state_ = State::kDone;
      return;
    }
    state_ = State::kFine;
    if (coarse_ == 0) {
      // Empty subset: nothing to refine, the schedule still runs its 2D rounds.
      fine_l_ = UINT32_MAX;
      return;
    }
    begin_fine(node_count, rng, pools);
    broadcast(round, out);
    return;
  }
  if (round < end_) {
    if (fine_l_ != UINT32_MAX) broadcast(round, out);
    return;
  }
  result_ = fine_l_ == UINT32_MAX ? 0.0 : current_estimate();
  if (fine_l_ == UINT32_MAX) fine_l_ = 0;
  state_ = State::kDone;
}

namespace {

enum class CountMode : std::uint8_t { kNodes, kCoarse, kEdges };

class CountProgram final : public NodeProgram {
 public:
  CountProgram(CountMode mode, bool member, const CountingParams& params)
      : mode_(mode), member_(member), params_(params),
        counter_(mode == CountMode::kEdges ? Channel::kEdgeCoarse : Channel::kNodeCoarse,
                 mode == CountMode::kEdges ? Channel::kEdgeFine : Channel::kNodeFine) {}

  void step(NodeContext& ctx, RoundMessage& out) override {
    std::uint64_t members_heard = 0;
    ctx.inbox().for_each([&](NodeId, const RoundMessage& m) {
      for (const Part& p : m.parts) {
        if (p.channel == Channel::kMembership) {
          members_heard += std::get<BitPayload>(p.payload).value ? 1 : 0;
        } else {
          counter_.absorb(p);
        }
      }
    });
    const std::uint64_t r = ctx.round();
    if (mode_ == CountMode::kEdges) {
      if (r == 0) {
        if (member_) out.add(Channel::kMembership, BitPayload{true});
        return;
      }
      if (r == 1) counter_.start(1, ctx.id(), member_ ? members_heard : 0, params_);
    } else if (r == 0) {
      counter_.start(0, ctx.id(), member_ ? 1 : 0, params_, mode_ == CountMode::kCoarse);
    }
    counter_.step(r, ctx.node_count(), ctx.rng(), ctx.pools(), out);
  }

  const TwoStageCounter& counter() const { return counter_; }

 private:
  CountMode mode_;
  bool member_;
  CountingParams params_;
  TwoStageCounter counter_;
};

CountRun run_count(CountMode mode, const Graph& g, const std::vector<bool>& members,
                   const CountingParams& params, std::uint64_t seed,
                   std::unique_ptr<Adversary> adversary) {
  const std::size_t n = g.node_count();
  if (members.size() != n) throw Error(ErrorCode::kInvalidArgument, "member flags size mismatch");
  if (n == 0) throw Error(ErrorCode::kInvalidArgument, "empty graph");
  CountRun run;
  run.true_value = mode == CountMode::kEdges
                       ? static_cast<double>(induced_edge_count(g, members))
                       : static_cast<double>(std::count(members.begin(), members.end(), true));
  std::uint32_t churn = 0;
  if (adversary) churn = UINT32_MAX;
  Simulator sim(DynamicGraph(g, churn), SimOptions{seed, false});
  sim.log().set_send_events(false);
  sim.set_adversary(std::move(adversary));
  for (NodeId v = 0; v < n; ++v) {
    sim.set_program(v, std::make_unique<CountProgram>(mode, members[v], params));
  }
  auto prog = [&](NodeId v) -> const TwoStageCounter& {
    return static_cast<CountProgram&>(sim.program(v)).counter();
  };
  const std::uint64_t limit = 4 + 2ull * params.D +
                              static_cast<std::uint64_t>(params.D) *
                                  (params.strict ? (params.max_tuple_length > 0 ? params.max_tuple_length : 1u << 24) : 1);
  for (;;) {
    sim.compute();
    if (prog(0).done()) break;
    if (sim.round() > limit) throw Error(ErrorCode::kInvalidArgument, "counter did not finish");
    sim.deliver();
    sim.churn();
  }
  const TwoStageCounter& c0 = prog(0);
  run.coarse = c0.coarse();
  run.geo_l = params.exact ? 0 : geo_length(params.delta_fail);
  run.exp_l = c0.fine_tuple_length();
  run.rounds = c0.end_round() - c0.start_round();
  if (mode == CountMode::kEdges) run.rounds += 1;
  const double r0 = c0.result();
  for (NodeId v = 0; v < n; ++v) {
    const TwoStageCounter& c = prog(v);
    if (!c.done() || c.result() != r0) run.agreed = false;
    run.truncated += c.truncated();
  }
  run.estimate = mode == CountMode::kEdges ? r0 / 2.0 : r0;
  return run;
}

}  // namespace

CountRun run_count_nodes(const Graph& g, const std::vector<bool>& members,
                         const CountingParams& params, std::uint64_t seed,
                         std::unique_ptr<Adversary> adversary) {
  return run_count(CountMode::kNodes, g, members, params, seed, std::move(adversary));
}

CountRun run_count_nodes_coarse(const Graph& g, const std::vector<bool>& members,
                                const CountingParams& params, std::uint64_t seed,
                                std::unique_ptr<Adversary> adversary) {
  return run_count(CountMode::kCoarse, g, members, params, seed, std::move(adversary));
}

CountRun run_count_edges(const Graph& g, const std::vector<bool>& members,
                         const CountingParams& params, std::uint64_t seed,
                         std::unique_ptr<Adversary> adversary) {
  return run_count(CountMode::kEdges, g, members, params, seed, std::move(adversary));
}

void write_trace_csv(std::ostream& out, const std::vector<TraceRow>& rows) {
  out << "trial,true_value,estimate,l,rounds\n";
  char buf[160];
  for (const TraceRow& r : rows) {
    std::snprintf(buf, sizeof buf, "%llu,%.17g,%.17g,%u,%llu\n",
                  static_cast<unsigned long long>(r.trial), r.true_value, r.estimate, r.l,
                  static_cast<unsigned long long>(r.rounds));
    out << buf;
  }
}

}  // namespace dyndense
