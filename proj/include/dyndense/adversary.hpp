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
#include <map>
#include <memory>
#include <string>
#include <vector>

#include <json.hpp>

#include "dyndense/graph.hpp"
#include "dyndense/rng.hpp"
#include "dyndense/sim.hpp"

namespace dyndense {

enum class AdversaryKind : std::uint8_t { kNone, kScripted, kRandomChurn, kTargeted };
std::string_view to_string(AdversaryKind k);
AdversaryKind adversary_kind_from(std::string_view s);

class NoChurn final : public Adversary {
 public:
  std::vector<EdgeEdit> next_batch(const Graph&, std::uint64_t) override { return {}; }
  std::string kind() const override { return "none"; }
};

// Fixed per-round edit lists. Validated against the initial graph at
// construction: every batch must respect r and must not contain no-ops.
class ScriptedAdversary final : public Adversary {
 public:
  ScriptedAdversary(const Graph& initial, std::uint32_t churn_rate,
                    std::map<std::uint64_t, std::vector<EdgeEdit>> batches);

  // {"batches": [{"round": t, "edits": [["add"|"remove", u, v], ...]}, ...]}
  static ScriptedAdversary from_json(const Graph& initial, std::uint32_t churn_rate,
                                     const nlohmann::json& doc);
  static ScriptedAdversary from_file(const Graph& initial, std::uint32_t churn_rate,
                                     const std::string& path);

  std::vector<EdgeEdit> next_batch(const Graph& g, std::uint64_t round) override;
  std::string kind() const override { return "scripted"; }
  const std::map<std::uint64_t, std::vector<EdgeEdit>>& batches() const { return batches_; }

 private:
  std::map<std::uint64_t, std::vector<EdgeEdit>> batches_;
};

// Each round toggles r distinct node pairs drawn uniformly; every toggle is
// a legal edit (add if absent, remove if present).
class RandomChurn final : public Adversary {
 public:
  RandomChurn(std::uint32_t churn_rate, std::uint64_t seed) : r_(churn_rate), rng_(seed) {}
  std::vector<EdgeEdit> next_batch(const Graph& g, std::uint64_t round) override;
  std::string kind() const override { return "random-churn"; }

 private:
  std::uint32_t r_;
  Rng rng_;
};

// Spends three quarters of its budget deleting edges inside `target`
// (normally the planted or current densest set), the rest on uniform toggles.
class TargetedAdversary final : public Adversary {
 public:
  TargetedAdversary(std::uint32_t churn_rate, std::vector<NodeId> target, std::uint64_t seed)
      : r_(churn_rate), target_(std::move(target)), rng_(seed) {}
  std::vector<EdgeEdit> next_batch(const Graph& g, std::uint64_t round) override;
  std::string kind() const override { return "targeted"; }
  void set_target(std::vector<NodeId> target) { target_ = std::move(target); }

 private:
  std::uint32_t r_;
  std::vector<NodeId> target_;
  Rng rng_;
};

// Replays an explicit snapshot sequence; the last snapshot persists.
class TraceAdversary final : public Adversary {
 public:
  explicit TraceAdversary(std::vector<Graph> trace) : trace_(std::move(trace)) {}
  std::vector<EdgeEdit> next_batch(const Graph& g, std::uint64_t round) override;
  std::string kind() const override { return "trace"; }
  // Largest symmetric difference between consecutive snapshots.
  std::uint32_t max_churn() const;

 private:
  std::vector<Graph> trace_;
};

std::vector<EdgeEdit> diff_edges(const Graph& from, const Graph& to);

}  // namespace dyndense
