#include "congest/oracle.hpp"

#include <algorithm>

namespace congest::oracle {

namespace {

struct LexResult {
  DistanceMatrix dist;
  HopMatrix hops;
  bool negative_cycle = false;
};

LexResult lex_floyd_warshall(const Graph& g) {
  const NodeId n = g.node_count();
  LexResult r{DistanceMatrix(n), HopMatrix(n)};
  for (NodeId v = 0; v < n; ++v) {
    r.dist(v, v) = 0;
    r.hops(v, v) = 0;
  }
  for (const Edge& e : g.edges()) {
    r.dist(e.tail, e.head) = e.weight;
    r.hops(e.tail, e.head) = 1;
  }
  for (NodeId k = 0; k < n; ++k) {
    for (NodeId i = 0; i < n; ++i) {
      const Distance dik = r.dist(i, k);
      if (dik == kInfinity) continue;
      const std::int32_t hik = r.hops(i, k);
      for (NodeId j = 0; j < n; ++j) {
        const Distance dkj = r.dist(k, j);
        if (dkj == kInfinity) continue;
        const Distance cand = dik + dkj;
        const std::int32_t ch = hik + r.hops(k, j);
        Distance& cur = r.dist(i, j);
        if (cand < cur || (cand == cur && ch < r.hops(i, j))) {
          cur = cand;
          r.hops(i, j) = ch;
        }
      }
    }
    if (r.dist(k, k) < 0) {
      r.negative_cycle = true;
      return r;
    }
  }
  for (NodeId v = 0; v < n; ++v)
    if (r.dist(v, v) < 0) r.negative_cycle = true;
  return r;
}

NegativeCycle normalize(std::vector<NodeId> cyc, const Graph& g) {
  // cyc is open (no repeated endpoint); rotate to the smallest id
  auto it = std::min_element(cyc.begin(), cyc.end());
  std::rotate(cyc.begin(), it, cyc.end());
  NegativeCycle out;
  out.weight = 0;
  for (std::size_t i = 0; i < cyc.size(); ++i) {
    NodeId a = cyc[i];
    NodeId b = cyc[(i + 1) % cyc.size()];
    out.weight += g.weight(a, b).value_or(kInfinity);
  }
  out.cycle = std::move(cyc);
  out.cycle.push_back(out.cycle.front());
  return out;
}

}  // namespace

std::optional<NegativeCycle> find_negative_cycle(const Graph& g) {
  // Bellman-Ford from a virtual source with an edge of weight 0 to every node.
  const NodeId n = g.node_count();
  std::vector<Distance> d(static_cast<std::size_t>(n), 0.0);
  std::vector<NodeId> pred(static_cast<std::size_t>(n), kNoNode);
  NodeId relaxed = kNoNode;
  for (NodeId pass = 0; pass <= n; ++pass) {
    relaxed = kNoNode;
    for (const Edge& e : g.edges()) {
      const Distance cand = d[static_cast<std::size_t>(e.tail)] + e.weight;
      if (cand < d[static_cast<std::size_t>(e.head)]) {
        d[static_cast<std::size_t>(e.head)] = cand;
        pred[static_cast<std::size_t>(e.head)] = e.tail;
        relaxed = e.head;
      }
    }
    if (relaxed == kNoNode) return std::nullopt;
  }
  NodeId x = relaxed;
  for (NodeId i = 0; i < n; ++i) x = pred[static_cast<std::size_t>(x)];
  std::vector<NodeId> cyc;
  NodeId y = x;
  do {
    cyc.push_back(y);
    y = pred[static_cast<std::size_t>(y)];
  } while (y != x);
  std::reverse(cyc.begin(), cyc.end());
  return normalize(std::move(cyc), g);
}

std::variant<DistanceMatrix, NegativeCycle> apsp(const Graph& g) {
  LexResult r = lex_floyd_warshall(g);
  if (r.negative_cycle) {
    auto cyc = find_negative_cycle(g);
    if (cyc) return *cyc;
  }
  return std::move(r.dist);
}

DistanceMatrix apsp_or_throw(const Graph& g) {
  auto r = apsp(g);
  if (auto* cyc = std::get_if<NegativeCycle>(&r)) {
    (void)cyc;
    throw PreconditionError("graph has a negative cycle");
  }
  return std::get<DistanceMatrix>(std::move(r));
}

DistanceMatrix hop_bounded(const Graph& g, int h) {
  if (h < 0) throw PreconditionError("hop bound must be non-negative");
  if (g.has_negative_weight()) throw PreconditionError("hop-bounded oracle requires non-negative weights");
  const NodeId n = g.node_count();
  DistanceMatrix cur(n);
  for (NodeId v = 0; v < n; ++v) cur(v, v) = 0;
  // with non-negative weights no shortest path needs more than n-1 edges
  const int rounds = std::min(h, static_cast<int>(n) - 1);
  DistanceMatrix next = cur;
  for (int t = 0; t < rounds; ++t) {
    for (NodeId u = 0; u < n; ++u) {
      for (const Edge& e : g.edges()) {
        const Distance du = cur(u, e.tail);
        if (du == kInfinity) continue;
        const Distance cand = du + e.weight;
        if (cand < next(u, e.head)) next(u, e.head) = cand;
      }
    }
    cur = next;
  }
  return cur;
}

ShortestPaths shortest_paths(const Graph& g) {
  LexResult r = lex_floyd_warshall(g);
  if (r.negative_cycle) throw PreconditionError("graph has a negative cycle");
  return ShortestPaths{std::move(r.dist), std::move(r.hops)};
}

std::vector<NodeId> ShortestPaths::canonical_path(const Graph& g, NodeId u, NodeId v) const {
  if (dist(u, v) == kInfinity) return {};
  std::vector<NodeId> path{u};
  NodeId x = u;
  while (x != v) {
    NodeId next = kNoNode;
    // out arcs are sorted by head, so the first match is the smallest id
    for (const Arc& a : g.out_arcs(x)) {
      if (hops(a.node, v) == kInfiniteHops) continue;
      if (a.weight + dist(a.node, v) == dist(x, v) && hops(a.node, v) + 1 == hops(x, v)) {
        next = a.node;
        break;
      }
    }
    if (next == kNoNode) throw Error("canonical path reconstruction failed");
    path.push_back(next);
    x = next;
  }
  return path;
}

}  // namespace congest::oracle
