#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "congest/engine.hpp"
#include "congest/graph.hpp"
#include "congest/oracle.hpp"
#include "congest/scheduler.hpp"

namespace congest {

/// S_0 = V, S_1 .. S_k sampled independently (not nested), S_{k+1} = ∅.
struct LevelHierarchy {
  int k = 0;
  /// sets[i] for i = 0 .. k+1, each sorted.
  std::vector<std::vector<NodeId>> sets;

  bool contains(int i, NodeId v) const;
};

/// k = ceil(log2 n); node v joins S_i with probability 2^-i.
LevelHierarchy sample_levels(NodeId n, std::uint64_t seed);

/// Bellman-Ford depth of phase i: ceil(c * 2^(i+1) * ln n), between 1 and n.
int phase_depth(NodeId n, int i, double c);

/// table(v, s) is node v's estimate of dist(s, v). Only rows of known sources
/// are meaningful; the others stay infinite.
class PhaseTables {
 public:
  PhaseTables() = default;
  explicit PhaseTables(NodeId n) : n_(n), data_(static_cast<std::size_t>(n) * n, kInfinity), known_(n, 0) {}

  NodeId size() const noexcept { return n_; }
  Distance& operator()(NodeId v, NodeId s) noexcept { return data_[static_cast<std::size_t>(v) * n_ + s]; }
  Distance operator()(NodeId v, NodeId s) const noexcept { return data_[static_cast<std::size_t>(v) * n_ + s]; }
  bool known(NodeId s) const noexcept { return known_[static_cast<std::size_t>(s)] != 0; }
  void mark_known(NodeId s) noexcept { known_[static_cast<std::size_t>(s)] = 1; }
  std::vector<NodeId> sources() const;

  /// Per node v, the vector over b of dist(b, v) as v knows it.
  std::vector<std::vector<Distance>> knowledge() const;
  /// dist(u, v) = table(v, u).
  DistanceMatrix to_matrix() const;
  static PhaseTables from_matrix(const DistanceMatrix& dist);

 private:
  NodeId n_ = 0;
  std::vector<Distance> data_;
  std::vector<char> known_;
};

enum class WindowPolicy : std::uint8_t { kQuiescent, kFixed };

struct PhaseResult {
  PhaseTables tables;
  /// d-hat and d-bar of this phase, indexed [v][s] like the tables.
  PhaseTables bellman_ford;
  PhaseTables through;
  RunMetrics metrics;
  Round bf_rounds = 0;
  Round fb_rounds = 0;
};

struct PhaseOptions {
  WindowPolicy window_policy = WindowPolicy::kQuiescent;
  Transcript* transcript = nullptr;
  Round round_limit = 0;
};

/// One phase: Bellman-Ford from S_i, filtered broadcasts through S_{i+1}
/// for every s in S_i, then the local minimum. Requires non-negative weights.
PhaseResult run_phase(const Graph& g, int i, const LevelHierarchy& levels, const PhaseTables& prior, double c,
                      CommunicationMode mode, std::uint64_t seed, const PhaseOptions& options = {});

class NegativeCycleError : public Error {
 public:
  explicit NegativeCycleError(NegativeCycle cycle);
  const NegativeCycle& cycle() const noexcept { return cycle_; }

 private:
  NegativeCycle cycle_;
};

struct Potentials {
  std::vector<Distance> phi;
};

struct Reweighting {
  Potentials potentials;
  Graph reweighted;
  RunMetrics metrics;
};

/// Virtual-source Bellman-Ford, pipelined broadcast of every potential, and
/// w'(x, y) = phi(x) + w(x, y) - phi(y). Requires bidirectional communication.
std::variant<Reweighting, NegativeCycle> johnson_reweight(const Graph& g, CommunicationMode mode, std::uint64_t seed);

struct ApspConfig {
  double c = 4.0;
  CommunicationMode mode;
  std::uint64_t seed = 0;
  WindowPolicy window_policy = WindowPolicy::kQuiescent;
  Round round_limit = 0;
  Transcript* transcript = nullptr;
  /// Called after each phase with i and its result.
  std::function<void(int, const PhaseResult&)> on_phase;
};

struct ApspResult {
  /// dist(u, v) as known at node v.
  DistanceMatrix dist;
  RunMetrics metrics;
  /// Rounds of phase k first, down to phase 0.
  std::vector<Round> rounds_per_phase;
  Round reweight_rounds = 0;
  LevelHierarchy levels;
  std::optional<Potentials> potentials;
};

/// Throws NegativeCycleError when the input has a negative cycle, and
/// PreconditionError for negative weights without bidirectional communication.
ApspResult run_apsp(const Graph& g, const ApspConfig& config = {});

struct Verdict {
  bool consistent = true;
  /// Nodes that found a relaxable entry.
  std::vector<NodeId> violators;
  /// Nodes that learned about some violation, violators included.
  std::vector<NodeId> informed;
  RunMetrics metrics;
};

/// Each node streams its n entries to its neighbors, one per round, and
/// checks that no received entry relaxes one of its own. Violations are then
/// flooded. Catches overestimates that a neighbor can relax; underestimates
/// may pass.
Verdict las_vegas_verify(const Graph& g, const DistanceMatrix& tables, CommunicationMode mode, std::uint64_t seed);

}  // namespace congest
