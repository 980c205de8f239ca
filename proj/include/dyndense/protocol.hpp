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
#include <deque>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <vector>

#include "dyndense/counting.hpp"
#include "dyndense/graph.hpp"
#include "dyndense/sim.hpp"

namespace dyndense {

enum class PaddingMode : std::uint8_t {
  // Coin probability aimed at the acceptance window and a window at least
  // one integer and sqrt(L) wide.
  kCalibrated,
  // Probability Delta/n_0 and window [(1+d)Delta, (1+2d)Delta] as written.
  kLiteral,
};

struct ProtocolParams {
  double epsilon = 0.5;
  std::uint32_t D = 1;
  std::uint32_t p_cap = 0;  // 0: ceil(log_{1+delta} n) + 1
  double threshold_factor = 1.0;
  bool exact_counting = false;
  bool strict_congest = false;
  double c = 1.0;
  double counting_epsilon = 0;  // 0: delta
  std::uint32_t max_tuple_length = 0;
  std::uint32_t padding_cap = 0;  // 0: ceil(8 ln n)
  PaddingMode padding_mode = PaddingMode::kCalibrated;

  double delta() const { return epsilon / 24.0; }
};

std::uint32_t default_p_cap(std::size_t n, double epsilon);
std::uint32_t default_padding_cap(std::size_t n);
// Rounds per level with D-round counting stages: 2D + 2D + 1.
constexpr std::uint64_t level_round_cost(std::uint32_t D) { return 4ull * D + 1; }
// Both the protocol and the centralized reference evaluate the peeling
// predicate through these, so the comparisons agree bit for bit.
inline double peel_multiplier(double threshold_factor, double delta) {
  return threshold_factor * (1.0 + delta);
}
inline double peel_threshold(double multiplier, double m, double n) { return multiplier * (m / n); }

CountingParams counting_params(const ProtocolParams& p);

struct LevelRecord {
  double m = 0;
  double n = 0;
  std::uint64_t edge_start = 0;   // round the edge count of this level began
  std::uint64_t computed_at = 0;  // round the level's membership was fixed
  friend bool operator==(const LevelRecord&, const LevelRecord&) = default;
};

struct QueryRequest {
  std::uint64_t id = 0;
  std::uint32_t k = 0;
};

enum class QueryStatus : std::uint8_t { kRunning, kDone, kNoCompleteFamily };

// One node's view of a query.
struct NodeQuery {
  std::uint64_t id = 0;
  std::uint32_t k = 0;
  QueryStatus status = QueryStatus::kRunning;
  std::uint64_t issued = 0;
  std::uint64_t finished = 0;
  std::uint64_t family_id = 0;
  std::uint32_t level = 0;
  bool in_level = false;
  bool padded = false;
  double Delta = 0;
  double lower = 0;
  double upper = 0;
  double coin_p = 0;
  std::uint32_t attempts = 0;
  std::vector<double> estimates;
  std::vector<bool> coins;
  bool member = false;
  bool cap_hit = false;
  std::uint32_t chosen_attempt = 0;
};

// Selects argmax_i m_i / max(k, n_i); ties go to the smallest index.
std::uint32_t select_level(const std::vector<LevelRecord>& records, std::uint32_t k);

class ProtocolNode final : public NodeProgram {
 public:
  struct Family {
    std::uint64_t id = 0;
    std::vector<LevelRecord> records;
    std::vector<bool> flags;  // this node's membership per level
    std::uint64_t started = 0;
    std::uint64_t published = 0;
  };

  ProtocolNode(const ProtocolParams& params, std::size_t n);

  void step(NodeContext& ctx, RoundMessage& out) override;
  void inject_query(const QueryRequest& q) { pending_ = q; }

  // Read-only state for the harness.
  std::uint32_t level() const { return j_; }
  bool in_current() const { return in_; }
  const std::vector<LevelRecord>& records() const { return records_; }
  const std::vector<bool>& flags() const { return flags_; }
  const std::optional<Family>& served() const { return served_; }
  bool level_completed() const { return level_completed_; }
  bool published() const { return published_now_; }
  const std::optional<NodeQuery>& query() const { return query_; }
  bool query_finished_now() const { return query_finished_now_; }
  bool reset_pending() const { return reset_pending_; }
  // Local flag for an answered query; throws kUnknownSnapshot.
  bool membership(std::uint64_t query_id) const;

 private:
  enum class Stage : std::uint8_t { kInit, kNodes, kEdges, kThreshold };

  void maintain(NodeContext& ctx, std::uint32_t member_bits, bool drop_heard, RoundMessage& out);
  void run_query(NodeContext& ctx, RoundMessage& out);
  void begin_query(NodeContext& ctx, const QueryRequest& q, RoundMessage& out);
  void start_attempt(NodeContext& ctx, RoundMessage& out);
  void finish_query(std::uint64_t round);

  ProtocolParams params_;
  CountingParams count_params_;
  CountingParams pad_params_;
  std::size_t n_;
  std::uint32_t p_cap_;
  std::uint32_t pad_cap_;
  double multiplier_;

  Stage stage_ = Stage::kInit;
  std::uint32_t j_ = 0;
  bool in_ = true;
  bool first_level_ = true;
  bool drop_or_ = false;
  bool reset_pending_ = false;
  double n0_ = 0;
  double cur_n_ = 0;
  double threshold_ = 0;
  std::uint64_t level_set_at_ = 0;
  std::uint64_t edge_start_ = 0;
  std::uint64_t pass_start_ = 0;
  std::uint64_t family_counter_ = 0;
  std::vector<LevelRecord> records_;
  std::vector<bool> flags_;
  std::optional<Family> served_;
  TwoStageCounter nodes_{Channel::kNodeCoarse, Channel::kNodeFine};
  TwoStageCounter edges_{Channel::kEdgeCoarse, Channel::kEdgeFine};
  bool level_completed_ = false;
  bool published_now_ = false;

  std::optional<QueryRequest> pending_;
  std::optional<NodeQuery> query_;
  TwoStageCounter pad_{Channel::kPadCoarse, Channel::kPadFine};
  bool coin_ = false;
  bool query_finished_now_ = false;
  std::map<std::uint64_t, bool> answers_;
};

// Harness-side view of a published family: the agreed scalars plus every
// node's flags, gathered after verifying that all nodes agree.
struct FamilyView {
  std::uint64_t id = 0;
  std::vector<LevelRecord> records;
  std::vector<std::vector<bool>> levels;
  std::uint64_t started = 0;
  std::uint64_t published = 0;
  std::uint64_t length() const { return published - started; }
};

struct QueryOutcome {
  std::uint64_t id = 0;
  std::uint32_t k = 0;
  bool no_family = false;
  std::uint64_t issued = 0;
  std::uint64_t finished = 0;  // t: the answer refers to G_t
  std::uint64_t family_id = 0;
  std::uint32_t level = 0;
  LevelRecord record;      // t' = record.computed_at, t'' = record.edge_start
  std::uint64_t pass_length = 0;
  bool padded = false;
  double Delta = 0;
  double lower = 0;
  double upper = 0;
  std::uint32_t attempts = 0;
  bool cap_hit = false;
  std::vector<double> estimates;
  std::vector<bool> members;
  std::vector<NodeId> member_ids() const { return flags_to_ids(members); }
};

// Drives a simulator whose every node runs ProtocolNode, checks scalar
// agreement after each level, and surfaces families and query answers.
class ProtocolRunner {
 public:
  ProtocolRunner(DynamicGraph graph, const ProtocolParams& params, std::uint64_t seed,
                 std::unique_ptr<Adversary> adversary, bool ledger_detail = false);

  // Queued; issued at the start of the next free round.
  std::uint64_t request_query(std::uint32_t k);
  void step();
  void run(std::uint64_t rounds) {
    for (std::uint64_t i = 0; i < rounds; ++i) step();
  }

  std::function<void(const FamilyView&)> on_publish;
  // Invoked between compute and delivery of the answer round, so graph()
  // is exactly G_t.
  std::function<void(const QueryOutcome&, const Graph&)> on_query;
  std::function<void(std::uint64_t round, const LevelRecord&, std::uint32_t level)> on_level;

  Simulator& sim() { return sim_; }
  const Graph& graph() const { return sim_.graph(); }
  std::uint64_t round() const { return sim_.round(); }
  const ProtocolParams& params() const { return params_; }
  std::uint32_t p_cap() const { return p_cap_; }
  std::uint32_t padding_cap() const { return pad_cap_; }
  const std::vector<FamilyView>& families() const { return families_; }
  const std::vector<QueryOutcome>& queries() const { return queries_; }
  // Rounds between consecutive level completions.
  const std::vector<std::uint64_t>& level_lengths() const { return level_lengths_; }
  bool query_busy() const { return in_flight_ || !queue_.empty(); }
  const ProtocolNode& node(NodeId v) const;
  bool membership(NodeId v, std::uint64_t query_id) const { return node(v).membership(query_id); }

 private:
  ProtocolNode& mut_node(NodeId v);
  void check_level(std::uint64_t round);
  void collect_family(std::uint64_t round);
  void collect_query(std::uint64_t round);
  [[noreturn]] void desync(const std::string& what) const;

  ProtocolParams params_;
  Simulator sim_;
  std::uint32_t p_cap_;
  std::uint32_t pad_cap_;
  std::deque<QueryRequest> queue_;
  bool in_flight_ = false;
  std::uint64_t next_query_id_ = 1;
  std::vector<FamilyView> families_;
  std::vector<QueryOutcome> queries_;
  std::vector<std::uint64_t> level_lengths_;
  std::uint64_t last_level_round_ = 0;
  bool seen_level_ = false;
};

}  // namespace dyndense
