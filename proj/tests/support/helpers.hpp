#pragma once

#include <algorithm>
#include <cstdint>
#include <vector>

#include "congest/graph.hpp"
#include "congest/random.hpp"

namespace testing {

using namespace congest;

inline Graph random_graph(NodeId n, double p, std::uint64_t seed, Distance lo = 0, Distance hi = 100,
                          bool directed = true) {
  RandomGraphParams rp;
  rp.n = n;
  rp.edge_probability = p;
  rp.weight_low = lo;
  rp.weight_high = hi;
  rp.seed = seed;
  rp.directed = directed;
  rp.integer_weights = true;
  return generate_random_graph(rp);
}

/// Sets roughly `fraction` of the arcs to weight 0.
inline Graph with_zero_weights(const Graph& g, double fraction, std::uint64_t seed) {
  return g.map_weights([&](const Edge& e) {
    CounterRng rng(derive_key(seed, StreamPurpose::kGraphGeneration,
                              {0x5a5aULL, static_cast<std::uint64_t>(e.tail), static_cast<std::uint64_t>(e.head)}));
    return rng.uniform01() < fraction ? 0.0 : e.weight;
  });
}

inline Graph path_graph(NodeId n, Distance w = 1, bool directed = true) {
  std::vector<Edge> es;
  for (NodeId v = 0; v + 1 < n; ++v) es.push_back({v, v + 1, w});
  return Graph(n, directed, es);
}

inline std::vector<NodeId> random_subset(NodeId n, double p, std::uint64_t seed) {
  CounterRng rng(seed);
  std::vector<NodeId> out;
  for (NodeId v = 0; v < n; ++v)
    if (rng.uniform01() < p) out.push_back(v);
  return out;
}

}  // namespace testing
