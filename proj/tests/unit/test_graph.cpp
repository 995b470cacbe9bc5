#include <cmath>
#include <functional>
#include <sstream>

#include "doctest.h"
#include "helpers.hpp"

#include "congest/oracle.hpp"

using namespace congest;
using testing::random_graph;

TEST_SUITE("graph") {

TEST_CASE("parse a small directed graph") {
  const Graph g = load_graph_text("3 2 directed\n0 1 1.0\n1 2 2.0");
  CHECK(g.node_count() == 3);
  CHECK(g.directed());
  REQUIRE(g.edge_count() == 2);
  CHECK(g.edges()[0] == Edge{0, 1, 1.0});
  CHECK(g.edges()[1] == Edge{1, 2, 2.0});
}

TEST_CASE("single node without edges") {
  const Graph g = load_graph_text("1 0 directed");
  CHECK(g.node_count() == 1);
  CHECK(g.edge_count() == 0);
}

TEST_CASE("ids outside 0..n-1 are rejected with their line") {
  try {
    load_graph_text("2 1 directed\n0 5 1.0");
    FAIL("expected an error");
  } catch (const IdOutOfRangeError& e) {
    CHECK(e.line() == 2);
  }
}

TEST_CASE("malformed inputs") {
  CHECK_THROWS_AS(load_graph_text("2 1 directed\n2 1 directed\n0 1 1"), ParseError);
  CHECK_THROWS_AS(load_graph_text("2 1 directed\n0 1 abc"), ParseError);
  CHECK_THROWS_AS(load_graph_text("2 2 directed\n0 1 1"), ParseError);
  CHECK_THROWS_AS(load_graph_text("2 1 sideways\n0 1 1"), ParseError);
  CHECK_THROWS_AS(load_graph_text(""), ParseError);
  CHECK_THROWS_AS(load_graph_text("2 1 directed\n0 0 1"), Error);
  try {
    load_graph_text("# header next\n\n3 1 directed\n0 1 x1");
    FAIL("expected an error");
  } catch (const ParseError& e) {
    CHECK(e.line() == 4);
  }
}

TEST_CASE("comments, undirected edges and parallel edges") {
  const Graph g = load_graph_text("# tiny\n3 3 undirected\n0 1 5 # trailing\n\n1 0 2\n1 2 1.5\n");
  CHECK_FALSE(g.directed());
  CHECK(g.weight(0, 1) == 2.0);
  CHECK(g.weight(1, 0) == 2.0);
  CHECK(g.weight(2, 1) == 1.5);
  CHECK_FALSE(g.weight(0, 2).has_value());
}

TEST_CASE("write and reload round trip") {
  const Graph g = random_graph(20, 0.2, 4);
  std::ostringstream out;
  write_graph(out, g);
  CHECK(load_graph_text(out.str()) == g);
}

TEST_CASE("random generator: p = 1 forces every pair") {
  RandomGraphParams p;
  p.n = 2;
  p.edge_probability = 1.0;
  p.weight_low = p.weight_high = 3.0;
  p.seed = 99;
  const Graph g = generate_random_graph(p);
  REQUIRE(g.edge_count() == 2);
  CHECK(g.edges()[0] == Edge{0, 1, 3.0});
  CHECK(g.edges()[1] == Edge{1, 0, 3.0});
}

TEST_CASE("random generator preconditions and determinism") {
  RandomGraphParams p;
  p.n = 4;
  p.edge_probability = 0;
  CHECK_THROWS_AS(generate_random_graph(p), PreconditionError);
  p.edge_probability = 0.5;
  p.weight_low = 2;
  p.weight_high = 1;
  CHECK_THROWS_AS(generate_random_graph(p), PreconditionError);
  CHECK(random_graph(30, 0.3, 11) == random_graph(30, 0.3, 11));
  CHECK_FALSE(random_graph(30, 0.3, 11) == random_graph(30, 0.3, 12));
}

TEST_CASE("random generator edge count concentrates") {
  RandomGraphParams p;
  p.n = 64;
  p.edge_probability = 0.1;
  p.weight_low = 0;
  p.weight_high = 100;
  p.seed = 7;
  const Graph g = generate_random_graph(p);
  const double mean = 64 * 63 * 0.1;
  const double sigma = std::sqrt(64 * 63 * 0.1 * 0.9);
  CHECK(std::abs(static_cast<double>(g.edge_count()) - mean) <= 5 * sigma);
  for (const Edge& e : g.edges()) {
    CHECK(e.weight >= 0);
    CHECK(e.weight <= 100);
  }
}

TEST_CASE("matrix csv round trip and format") {
  DistanceMatrix m(2);
  m(0, 0) = 0;
  m(0, 1) = 2.5;
  m(1, 1) = 0;
  std::ostringstream out;
  write_matrix_csv(out, m);
  CHECK(out.str() == "0,2.5\ninf,0\n");
  std::istringstream in(out.str());
  CHECK(read_matrix_csv(in) == m);
  std::istringstream bad("0,1\n0\n");
  CHECK_THROWS(read_matrix_csv(bad));
}

}  // TEST_SUITE

TEST_SUITE("oracle") {

TEST_CASE("path distances and unreachable pairs") {
  const Graph g(3, true, {{0, 1, 1}, {1, 2, 2}});
  const DistanceMatrix d = oracle::apsp_or_throw(g);
  CHECK(d(0, 2) == 3);
  CHECK(d(2, 0) == kInfinity);
  CHECK(d(1, 1) == 0);
}

TEST_CASE("negative two-cycle is reported") {
  const Graph g(2, true, {{0, 1, 1}, {1, 0, -2}});
  auto r = oracle::apsp(g);
  REQUIRE(std::holds_alternative<NegativeCycle>(r));
  const auto& c = std::get<NegativeCycle>(r);
  CHECK(c.cycle == std::vector<NodeId>{0, 1, 0});
  CHECK(c.weight == -1);
}

// Independent reference: minimum over all simple paths by exhaustive DFS.
DistanceMatrix exhaustive(const Graph& g) {
  const NodeId n = g.node_count();
  DistanceMatrix d(n);
  std::vector<char> on(static_cast<std::size_t>(n), 0);
  std::function<void(NodeId, NodeId, Distance)> dfs = [&](NodeId s, NodeId v, Distance w) {
    d(s, v) = std::min(d(s, v), w);
    on[static_cast<std::size_t>(v)] = 1;
    for (const Arc& a : g.out_arcs(v))
      if (!on[static_cast<std::size_t>(a.node)]) dfs(s, a.node, w + a.weight);
    on[static_cast<std::size_t>(v)] = 0;
  };
  for (NodeId s = 0; s < n; ++s) dfs(s, s, 0);
  return d;
}

TEST_CASE("floyd-warshall equals exhaustive simple-path enumeration on 8 nodes") {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const Graph g = random_graph(8, 0.35, seed);
    CHECK(oracle::apsp_or_throw(g) == exhaustive(g));
  }
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const Graph g = random_graph(8, 0.3, 100 + seed, -5, 20);
    auto r = oracle::apsp(g);
    if (std::holds_alternative<DistanceMatrix>(r)) CHECK(std::get<DistanceMatrix>(r) == exhaustive(g));
  }
}

TEST_CASE("relabeling invariance") {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const Graph g = random_graph(20, 0.15, seed);
    std::vector<NodeId> perm(20);
    for (NodeId v = 0; v < 20; ++v) perm[static_cast<std::size_t>(v)] = (v * 7 + 3) % 20;
    std::vector<Edge> es;
    for (const Edge& e : g.edges()) es.push_back({perm[static_cast<std::size_t>(e.tail)], perm[static_cast<std::size_t>(e.head)], e.weight});
    const Graph h(20, true, es);
    const DistanceMatrix dg = oracle::apsp_or_throw(g);
    const DistanceMatrix dh = oracle::apsp_or_throw(h);
    for (NodeId u = 0; u < 20; ++u)
      for (NodeId v = 0; v < 20; ++v) CHECK(dg(u, v) == dh(perm[static_cast<std::size_t>(u)], perm[static_cast<std::size_t>(v)]));
  }
}

TEST_CASE("hop-bounded examples") {
  const Graph g(3, true, {{0, 1, 1}, {1, 2, 2}});
  const DistanceMatrix h0 = oracle::hop_bounded(g, 0);
  for (NodeId u = 0; u < 3; ++u)
    for (NodeId v = 0; v < 3; ++v) CHECK(h0(u, v) == (u == v ? 0 : kInfinity));
  CHECK(oracle::hop_bounded(g, 1)(0, 2) == kInfinity);
  CHECK(oracle::hop_bounded(g, 2)(0, 2) == 3);
  CHECK_THROWS_AS(oracle::hop_bounded(Graph(2, true, {{0, 1, -1}}), 1), PreconditionError);
}

TEST_CASE("hop-bounded is monotone in h and reaches apsp at n-1") {
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    const Graph g = random_graph(16, 0.15, seed);
    const DistanceMatrix full = oracle::apsp_or_throw(g);
    DistanceMatrix prev = oracle::hop_bounded(g, 0);
    for (int h = 1; h <= 15; ++h) {
      const DistanceMatrix cur = oracle::hop_bounded(g, h);
      for (NodeId u = 0; u < 16; ++u)
        for (NodeId v = 0; v < 16; ++v) {
          CHECK(prev(u, v) >= cur(u, v));
          CHECK(cur(u, v) >= full(u, v));
        }
      prev = cur;
    }
    CHECK(prev == full);
  }
}

TEST_CASE("canonical paths realize distances with minimal hop counts") {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const Graph g = testing::with_zero_weights(random_graph(16, 0.2, seed, 1, 10), 0.2, seed);
    const auto sp = oracle::shortest_paths(g);
    std::vector<DistanceMatrix> bounded;
    for (int h = 0; h < 16; ++h) bounded.push_back(oracle::hop_bounded(g, h));
    for (NodeId u = 0; u < 16; ++u) {
      CHECK(sp.dist(u, u) == 0);
      CHECK(sp.hops(u, u) == 0);
      for (NodeId v = 0; v < 16; ++v) {
        const auto path = sp.canonical_path(g, u, v);
        if (sp.dist(u, v) == kInfinity) {
          CHECK(path.empty());
          CHECK(sp.hops(u, v) == kInfiniteHops);
          continue;
        }
        REQUIRE(path.size() == static_cast<std::size_t>(sp.hops(u, v)) + 1);
        CHECK(path.front() == u);
        CHECK(path.back() == v);
        Distance w = 0;
        for (std::size_t i = 0; i + 1 < path.size(); ++i) w += *g.weight(path[i], path[i + 1]);
        CHECK(w == sp.dist(u, v));
        if (sp.hops(u, v) > 0) CHECK(bounded[static_cast<std::size_t>(sp.hops(u, v) - 1)](u, v) > sp.dist(u, v));
      }
    }
  }
}

TEST_CASE("triangle inequality on oracle output") {
  const Graph g = random_graph(24, 0.2, 3);
  const DistanceMatrix d = oracle::apsp_or_throw(g);
  for (NodeId a = 0; a < 24; ++a)
    for (NodeId b = 0; b < 24; ++b)
      for (NodeId c = 0; c < 24; ++c) CHECK(d(a, c) <= saturating_add(d(a, b), d(b, c)));
}

}  // TEST_SUITE
