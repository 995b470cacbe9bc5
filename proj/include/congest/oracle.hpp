#pragma once

#include <optional>
#include <variant>
#include <vector>

#include "congest/graph.hpp"

namespace congest {

/// A closed walk (first == last) of negative total weight, rotated to start at
/// its smallest node id.
struct NegativeCycle {
  std::vector<NodeId> cycle;
  Distance weight = 0;
};

/// Centralized shortest-path reference. All functions here are pure and are
/// used to check the distributed protocols, never by them.
namespace oracle {

/// Exact all-pairs distances (Floyd-Warshall), or a witness cycle.
std::variant<DistanceMatrix, NegativeCycle> apsp(const Graph& g);

/// Minimum weight over paths with at most h edges. Requires non-negative weights.
DistanceMatrix hop_bounded(const Graph& g, int h);

std::optional<NegativeCycle> find_negative_cycle(const Graph& g);

/// Distances together with hop(u, v): the edge count of the canonical shortest
/// path (minimum weight, then minimum edges, then lexicographically smallest
/// node sequence).
struct ShortestPaths {
  DistanceMatrix dist;
  HopMatrix hops;

  /// Canonical node sequence u .. v, empty when v is unreachable from u.
  std::vector<NodeId> canonical_path(const Graph& g, NodeId u, NodeId v) const;
};

/// Throws PreconditionError when the graph has a negative cycle.
ShortestPaths shortest_paths(const Graph& g);

/// dist pulled out of the variant; throws when a negative cycle exists.
DistanceMatrix apsp_or_throw(const Graph& g);

}  // namespace oracle
}  // namespace congest
