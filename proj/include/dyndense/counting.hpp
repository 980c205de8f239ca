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
#include <functional>
#include <iosfwd>
#include <memory>
#include <optional>
#include <vector>

#include "dyndense/graph.hpp"
#include "dyndense/rng.hpp"
#include "dyndense/sim.hpp"
#include "dyndense/tuples.hpp"

namespace dyndense {

inline constexpr std::uint8_t kMaxTosses = 64;

struct CountingParams {
  std::uint32_t D = 1;
  double epsilon = 0.3;     // accuracy of the fine (exponential) stage
  double delta_fail = 0.1;  // failure probability of the coarse (geometric) stage
  double c = 1.0;
  std::uint32_t max_tuple_length = 0;  // 0 keeps the formula length
  bool exact = false;                  // flood (id, weight) sets instead of estimating
  bool strict = false;                 // one exponential coordinate per message

  // Test hooks replacing the node's own draws. Arguments: node, copies, l.
  std::function<GeoTuple(NodeId, std::uint64_t, std::uint32_t)> geo_source;
  std::function<ExpTuple(NodeId, std::uint64_t, std::uint32_t)> exp_source;
};

// ceil(65 ln(1/delta)), at least 1.
std::uint32_t geo_length(double delta_fail);
// ceil(27 (2+2c) ln(N) / eps^2), at least 1.
std::uint32_t exp_length(double epsilon, double c, double upper_bound);
std::uint32_t fine_length(const CountingParams& p, double upper_bound);

// Coordinate-wise maximum over `copies` independent toss counts. A single
// copy uses the toss loop directly; more copies sample the maximum through
// its CDF (1 - 2^-x)^copies. Toss counts are capped at 64; `truncated`
// counts coordinates that hit the cap.
GeoTuple sample_geo(Rng& rng, std::uint64_t copies, std::uint32_t l,
                    std::uint64_t* truncated = nullptr);
// Coordinate-wise minimum over `copies` Exp(1) draws, i.e. Exp(copies).
ExpTuple sample_exp(Rng& rng, std::uint64_t copies, std::uint32_t l);

// Lower median of 2^X_i; 0 for an empty tuple.
double geo_estimate(const GeoTuple& t);
// l / sum(Z_i); 0 for an empty tuple.
double exp_estimate(const ExpTuple& t);

// Coarse-then-fine counter for one node. The coarse stage floods geometric
// maxima for D rounds and yields N = 2 * estimate; the fine stage floods
// exponential minima for D rounds (l*D in strict mode). Call absorb() for
// each incoming part on this counter's channels, then step() once per round.
class TwoStageCounter {
 public:
  TwoStageCounter(Channel coarse, Channel fine) : coarse_ch_(coarse), fine_ch_(fine) {}

  void start(std::uint64_t round, NodeId self, std::uint64_t weight, const CountingParams& params,
             bool coarse_only = false);
  void absorb(const Part& p);
  void step(std::uint64_t round, std::size_t node_count, Rng& rng, Pools& pools,
            RoundMessage& out);

  bool active() const { return state_ != State::kIdle && state_ != State::kDone; }
  bool done() const { return state_ == State::kDone; }
  bool coarse_done() const { return coarse_known_; }
  double coarse() const { return coarse_; }
  double result() const { return result_; }
  std::uint64_t start_round() const { return start_; }
  // Round whose compute step produces the result; valid after the coarse stage.
  std::uint64_t end_round() const { return end_; }
  std::uint32_t fine_tuple_length() const { return fine_l_; }
  std::uint64_t truncated() const { return truncated_; }
  Channel coarse_channel() const { return coarse_ch_; }
  Channel fine_channel() const { return fine_ch_; }

 private:
  enum class State : std::uint8_t { kIdle, kCoarse, kFine, kDone };

  void begin_coarse(std::size_t n, Rng& rng, Pools& pools);
  void begin_fine(std::size_t n, Rng& rng, Pools& pools);
  void commit(Pools& pools);
  void broadcast(std::uint64_t round, RoundMessage& out);
  double current_estimate() const;
  bool first_sight(const void* ref);

  Channel coarse_ch_;
  Channel fine_ch_;
  CountingParams params_;
  State state_ = State::kIdle;
  bool coarse_only_ = false;
  NodeId self_ = 0;
  std::uint64_t weight_ = 0;
  std::uint64_t start_ = 0;
  std::uint64_t end_ = 0;
  bool coarse_known_ = false;
  double coarse_ = 0;
  double result_ = 0;
  std::uint32_t fine_l_ = 0;
  std::uint64_t truncated_ = 0;

  // Shared current value plus a private scratch copy while merging.
  GeoRef geo_;
  ExpRef exp_;
  WeightRef weights_;
  GeoTuple geo_scratch_;
  ExpTuple exp_scratch_;
  WeightSet weight_scratch_;
  bool scratch_ = false;
  bool changed_ = false;
  // Open-addressing set of absorbed tuple pointers; cleared per stage.
  std::vector<const void*> seen_;
  std::size_t seen_count_ = 0;
  const void* last_seen_ = nullptr;
  void reset_seen();
  bool first_sight_slot(const void* ref);
  // Strict mode keeps the exponential tuple unshared.
  std::vector<double> strict_z_;
};

struct CountRun {
  double estimate = 0;
  double coarse = 0;
  double true_value = 0;
  std::uint32_t geo_l = 0;
  std::uint32_t exp_l = 0;
  std::uint64_t rounds = 0;  // rounds from the first send to the result
  bool agreed = true;        // every node computed the same result
  std::uint64_t truncated = 0;
};

// Stand-alone runs on a fresh simulator. `members` selects V'.
CountRun run_count_nodes(const Graph& g, const std::vector<bool>& members,
                         const CountingParams& params, std::uint64_t seed,
                         std::unique_ptr<Adversary> adversary = nullptr);
CountRun run_count_nodes_coarse(const Graph& g, const std::vector<bool>& members,
                                const CountingParams& params, std::uint64_t seed,
                                std::unique_ptr<Adversary> adversary = nullptr);
// One membership round, then the two-stage counter over degree-weighted
// copies; the result is halved.
CountRun run_count_edges(const Graph& g, const std::vector<bool>& members,
                         const CountingParams& params, std::uint64_t seed,
                         std::unique_ptr<Adversary> adversary = nullptr);

struct TraceRow {
  std::uint64_t trial = 0;
  double true_value = 0;
  double estimate = 0;
  std::uint32_t l = 0;
  std::uint64_t rounds = 0;
};
void write_trace_csv(std::ostream& out, const std::vector<TraceRow>& rows);

}  // namespace dyndense
