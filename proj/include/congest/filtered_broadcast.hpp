#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "congest/engine.hpp"
#include "congest/graph.hpp"
#include "congest/scheduler.hpp"

namespace congest {

/// Nested between-node levels B_0 = B ⊇ B_1 ⊇ ... ⊇ B_{L+1} = ∅ with
/// L = ceil(log2 n). Each member flips its own coins; no communication.
struct BetweenHierarchy {
  /// levels[j] is B_j, sorted; levels.size() == L + 2 and levels.back() is empty.
  std::vector<std::vector<NodeId>> levels;
  /// top_level[v] = largest j with v ∈ B_j, or -1 when v ∉ B.
  std::vector<int> top_level;

  int top() const noexcept { return static_cast<int>(levels.size()) - 2; }
  bool contains(int level, NodeId v) const noexcept { return top_level[static_cast<std::size_t>(v)] >= level; }
};

BetweenHierarchy sample_between_hierarchy(std::span<const NodeId> between, NodeId n, std::uint64_t seed);

/// Payload of M(s, b): the between node and its estimate dhat(s, b).
struct Offer {
  NodeId between = kNoNode;
  Distance dhat = kInfinity;
};

/// Per-node filter state. `dist_from_between[b]` is the node's exact
/// knowledge of dist(b, owner).
struct FilterState {
  NodeId owner = kNoNode;
  Distance output = kInfinity;
  Offer best;
  std::span<const Distance> dist_from_between;
};

struct FilterDecision {
  std::optional<Offer> forward;
  Distance output = kInfinity;
};

/// Picks b* minimizing dhat(s, b) + dist(b, owner) over the candidates (ties
/// to the lowest id) and forwards M(s, b*) iff that strictly beats the
/// current output.
FilterDecision filter_decision(const FilterState& state, std::span<const Offer> candidates);

/// One node's side of a filtered-broadcast instance.
class FilteredBroadcastInstance final : public InstanceProgram {
 public:
  /// `top_level` is the node's highest between level (-1 if not a between
  /// node); `dhat` is its own estimate, used only when it is a between node.
  FilteredBroadcastInstance(NodeId self, NodeId source, int top_level, Distance dhat,
                            std::span<const Distance> dist_from_between, int levels);

  void begin_iteration(int iteration) override;
  void receive(const ProtocolMessage& msg, NodeId from) override;
  bool step() override;
  std::optional<ProtocolMessage> outgoing() override;

  Distance output() const noexcept { return state_.output; }
  NodeId best_between() const noexcept { return state_.best.between; }
  /// FB_OFFER emissions of this node, indexed by iteration.
  const std::vector<std::uint32_t>& emissions() const noexcept { return emissions_; }
  /// Values dhat + dist of every emitted offer, in emission order.
  const std::vector<Distance>& emitted_values() const noexcept { return emitted_values_; }

 private:
  NodeId source_;
  int top_level_;
  Distance dhat_;
  int iteration_ = -1;
  bool self_offer_ = false;
  bool have_incoming_ = false;
  Offer incoming_;
  Distance incoming_value_ = kInfinity;
  FilterState state_;
  std::vector<std::uint32_t> emissions_;
  std::vector<Distance> emitted_values_;
};

struct FilteredBroadcastOptions {
  IterationPolicy policy = IterationPolicy::kFixed;
  /// Rounds per iteration under kFixed; 0 selects n. A smaller window is valid
  /// when every relevant shortest path from B has at most `window - 1` edges.
  Round window = 0;
  bool record_boundaries = false;
  /// When set, every dist_tables entry for b ∈ B is checked against it.
  const DistanceMatrix* validate_against = nullptr;
  Transcript* transcript = nullptr;
  Round round_limit = 0;
};

struct FilteredBroadcastResult {
  std::vector<Distance> output;
  std::vector<NodeId> best_between;
  /// emissions[v][j]: FB_OFFER messages node v sent in iteration j.
  std::vector<std::vector<std::uint32_t>> emissions;
  /// Emitted values per node, in order.
  std::vector<std::vector<Distance>> emitted_values;
  /// boundary_output[j][v]: output of v when iteration j ended (if recorded).
  std::vector<std::vector<Distance>> boundary_output;
  std::vector<Round> boundary_round;
  BetweenHierarchy hierarchy;
  RunMetrics metrics;
};

/// Computes output(v) = min_{b ∈ B} dhat[b] + dist(b, v) at every node.
/// dist_tables[v][b] must be the exact dist(b, v) for each b ∈ B; dhat is
/// indexed by node id and may hold arbitrary extended reals.
FilteredBroadcastResult filtered_broadcast(const Graph& g, NodeId source, std::span<const NodeId> between,
                                           std::span<const Distance> dhat,
                                           std::span<const std::vector<Distance>> dist_tables,
                                           CommunicationMode mode, std::uint64_t seed,
                                           const FilteredBroadcastOptions& options = {});

/// One source of a batched run. The hierarchy over B is sampled from `seed`,
/// so a job reproduces the solo run filtered_broadcast(..., job.seed).
struct FilteredBroadcastJob {
  NodeId source = kNoNode;
  std::vector<Distance> dhat;
  std::uint64_t seed = 0;
};

struct ParallelFilteredBroadcastResult {
  /// output[k][v] for job k.
  std::vector<std::vector<Distance>> output;
  /// Largest per-node per-iteration emission count of any job.
  std::uint32_t max_iteration_emissions = 0;
  ScheduleResult schedule;
};

/// All jobs share B and the knowledge tables and run as one scheduler batch.
ParallelFilteredBroadcastResult filtered_broadcast_parallel(const Graph& g, std::span<const FilteredBroadcastJob> jobs,
                                                            std::span<const NodeId> between,
                                                            std::span<const std::vector<Distance>> dist_tables,
                                                            CommunicationMode mode, std::uint64_t seed,
                                                            const SchedulerOptions& options = {});

/// dist_tables[v][b] = dist(b, v), built from a distance matrix.
std::vector<std::vector<Distance>> knowledge_from_matrix(const DistanceMatrix& dist);

/// Centralized reference: min over b ∈ B of dhat[b] + dist(b, v), per v.
std::vector<Distance> dist_through_oracle(std::span<const Distance> dhat, const DistanceMatrix& dist,
                                          std::span<const NodeId> between);

}  // namespace congest
