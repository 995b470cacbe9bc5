#include <deque>
#include <memory>
#include <set>
#include <sstream>

#include "doctest.h"
#include "helpers.hpp"

#include "congest/apsp.hpp"
#include "congest/engine.hpp"

using namespace congest;

namespace {

class Silent final : public NodeProgram {
 public:
  void on_receive(const ProtocolMessage&, NodeId) override {}
  void emit(Round, Outbox&) override {}
  bool idle() const override { return true; }
};

// Node 0 sends one message in round 1; everyone records what arrives when.
class OneShot final : public NodeProgram {
 public:
  void init(const LocalView& view, std::uint64_t) override { pending_ = view.id() == 0; }
  void on_round_start(Round r) override { round_ = r; }
  void on_receive(const ProtocolMessage& m, NodeId from) override { got.push_back({round_, from, m.value}); }
  void emit(Round, Outbox& out) override {
    if (!pending_) return;
    ProtocolMessage m;
    m.value = 42;
    out.broadcast(m);
    pending_ = false;
  }
  bool idle() const override { return !pending_; }

  struct Got {
    Round round;
    NodeId from;
    Distance value;
  };
  std::vector<Got> got;

 private:
  bool pending_ = false;
  Round round_ = 0;
};

// Flood from node 0: forward once on first receipt.
class Flood final : public NodeProgram {
 public:
  void init(const LocalView& view, std::uint64_t) override { pending_ = view.id() == 0; reached_ = pending_; }
  void on_receive(const ProtocolMessage&, NodeId) override {
    if (!reached_) reached_ = pending_ = true;
  }
  void on_round_start(Round r) override { round_ = r; }
  void emit(Round, Outbox& out) override {
    if (!pending_) return;
    if (first_ == 0) first_ = round_;
    out.broadcast(ProtocolMessage{});
    pending_ = false;
  }
  bool idle() const override { return !pending_; }
  bool reached() const { return reached_; }

 private:
  bool pending_ = false;
  bool reached_ = false;
  Round round_ = 0;
  Round first_ = 0;
};

class Chatty final : public NodeProgram {
 public:
  explicit Chatty(int per_round) : per_round_(per_round) {}
  void on_receive(const ProtocolMessage&, NodeId) override {}
  void emit(Round, Outbox& out) override {
    for (int i = 0; i < per_round_; ++i) out.broadcast(ProtocolMessage{});
  }
  bool idle() const override { return false; }

 private:
  int per_round_;
};

class Unicaster final : public NodeProgram {
 public:
  explicit Unicaster(std::vector<NodeId> targets) : targets_(std::move(targets)) {}
  void on_receive(const ProtocolMessage&, NodeId) override {}
  void emit(Round r, Outbox& out) override {
    if (r > 1) return;
    for (NodeId t : targets_) out.send(t, ProtocolMessage{});
    done_ = true;
  }
  bool idle() const override { return done_; }

 private:
  std::vector<NodeId> targets_;
  bool done_ = false;
};

template <typename P, typename... Args>
std::vector<std::unique_ptr<NodeProgram>> make_programs(NodeId n, Args... args) {
  std::vector<std::unique_ptr<NodeProgram>> ps;
  for (NodeId v = 0; v < n; ++v) ps.push_back(std::make_unique<P>(args...));
  return ps;
}

std::vector<Round> bfs_depths(const Graph& g) {
  std::vector<Round> d(static_cast<std::size_t>(g.node_count()), -1);
  std::deque<NodeId> q{0};
  d[0] = 0;
  while (!q.empty()) {
    const NodeId v = q.front();
    q.pop_front();
    auto visit = [&](NodeId w) {
      if (d[static_cast<std::size_t>(w)] < 0) {
        d[static_cast<std::size_t>(w)] = d[static_cast<std::size_t>(v)] + 1;
        q.push_back(w);
      }
    };
    for (const Arc& a : g.out_arcs(v)) visit(a.node);
    for (const Arc& a : g.in_arcs(v)) visit(a.node);
  }
  return d;
}

}  // namespace

TEST_SUITE("engine") {

TEST_CASE("no-op program on one node takes zero rounds") {
  const Graph g(1, true, {});
  Network net(g, {});
  auto ps = make_programs<Silent>(1);
  const RunMetrics m = run_simulation(net, ps, 1);
  CHECK(m.rounds == 0);
  CHECK(m.messages_total == 0);
}

TEST_CASE("a message emitted in round 1 arrives in round 2") {
  const Graph g(2, true, {{0, 1, 1}});
  Network net(g, {Direction::kUnidirectional, Discipline::kBroadcast});
  auto ps = make_programs<OneShot>(2);
  const RunMetrics m = run_simulation(net, ps, 1);
  const auto& got = static_cast<OneShot&>(*ps[1]).got;
  REQUIRE(got.size() == 1);
  CHECK(got[0].round == 2);
  CHECK(got[0].from == 0);
  CHECK(m.per_edge_load.at(Link{0, 1}) == 1);
  CHECK(m.per_edge_load.size() == 1);
  CHECK(m.rounds == 2);
  CHECK(static_cast<OneShot&>(*ps[0]).got.empty());
}

TEST_CASE("unidirectional never sends head to tail; bidirectional does") {
  const Graph g(2, true, {{1, 0, 1}});
  {
    Network net(g, {Direction::kUnidirectional, Discipline::kBroadcast});
    auto ps = make_programs<OneShot>(2);
    run_simulation(net, ps, 1);
    CHECK(static_cast<OneShot&>(*ps[1]).got.empty());
  }
  {
    Network net(g, {Direction::kBidirectional, Discipline::kBroadcast});
    auto ps = make_programs<OneShot>(2);
    run_simulation(net, ps, 1);
    CHECK(static_cast<OneShot&>(*ps[1]).got.size() == 1);
  }
}

TEST_CASE("flood reaches quiescence after the eccentricity of the origin") {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    Graph g = testing::random_graph(16, 0.15, seed, 1, 1, false);
    const auto depth = bfs_depths(g);
    if (std::find(depth.begin(), depth.end(), -1) != depth.end()) continue;
    const Round ecc = *std::max_element(depth.begin(), depth.end());
    Network net(g, {});
    auto ps = make_programs<Flood>(16);
    const RunMetrics m = run_simulation(net, ps, seed);
    // the farthest node forwards once more in round ecc+1, delivered in ecc+2
    CHECK(m.rounds == ecc + 2);
    for (const auto& p : ps) CHECK(static_cast<Flood&>(*p).reached());
    CHECK(m.messages_total == 16);
  }
}

TEST_CASE("a second broadcast in one round is a discipline violation") {
  const Graph g(2, true, {{0, 1, 1}});
  Network net(g, {});
  auto ps = make_programs<Chatty>(2, 2);
  CHECK_THROWS_AS(run_simulation(net, ps, 1), DisciplineViolation);
}

TEST_CASE("unicast: one message per link, only over real links") {
  const Graph g(3, true, {{0, 1, 1}, {0, 2, 1}});
  const CommunicationMode uni{Direction::kUnidirectional, Discipline::kUnicast};
  {
    Network net(g, uni);
    std::vector<std::unique_ptr<NodeProgram>> ps;
    ps.push_back(std::make_unique<Unicaster>(std::vector<NodeId>{1, 2}));
    ps.push_back(std::make_unique<Silent>());
    ps.push_back(std::make_unique<Silent>());
    const RunMetrics m = run_simulation(net, ps, 1);
    CHECK(m.messages_total == 2);
    CHECK(m.per_node_sent[0] == 2);
  }
  {
    Network net(g, uni);
    std::vector<std::unique_ptr<NodeProgram>> ps;
    ps.push_back(std::make_unique<Unicaster>(std::vector<NodeId>{1, 1}));
    ps.push_back(std::make_unique<Silent>());
    ps.push_back(std::make_unique<Silent>());
    CHECK_THROWS_AS(run_simulation(net, ps, 1), DisciplineViolation);
  }
  {
    Network net(g, uni);
    std::vector<std::unique_ptr<NodeProgram>> ps;
    ps.push_back(std::make_unique<Silent>());
    ps.push_back(std::make_unique<Unicaster>(std::vector<NodeId>{0}));
    ps.push_back(std::make_unique<Silent>());
    CHECK_THROWS_AS(run_simulation(net, ps, 1), DisciplineViolation);
  }
  {
    Network net(g, {});
    std::vector<std::unique_ptr<NodeProgram>> ps;
    ps.push_back(std::make_unique<Unicaster>(std::vector<NodeId>{1}));
    ps.push_back(std::make_unique<Silent>());
    ps.push_back(std::make_unique<Silent>());
    CHECK_THROWS_AS(run_simulation(net, ps, 1), DisciplineViolation);
  }
}

TEST_CASE("round limit error carries partial metrics") {
  const Graph g(2, true, {{0, 1, 1}});
  Network net(g, {});
  auto ps = make_programs<Chatty>(2, 1);
  SimulationOptions o;
  o.round_limit = 5;
  try {
    run_simulation(net, ps, 1, o);
    FAIL("expected RoundLimitExceeded");
  } catch (const RoundLimitExceeded& e) {
    CHECK(e.partial_metrics().rounds == 5);
    CHECK(e.partial_metrics().messages_total == 10);
  }
}

TEST_CASE("default round limit") {
  CHECK(default_round_limit(16) == 64 * 16 * 256);
  CHECK(default_round_limit(1) == 64);
}

TEST_CASE("record_congestion accumulates") {
  RunMetrics m;
  m = record_congestion(m, {0, 1});
  CHECK(m.per_edge_load.at({0, 1}) == 1);
  m = record_congestion(m, {0, 1});
  CHECK(m.per_edge_load.at({0, 1}) == 2);
  m = record_congestion(m, {1, 0}, 5);
  CHECK(m.max_edge_load() == 5);
}

TEST_CASE("full APSP run: transcript replay reproduces every counter") {
  const Graph g = testing::random_graph(32, 0.15, 5);
  Transcript t;
  ApspConfig cfg;
  cfg.seed = 5;
  cfg.transcript = &t;
  const ApspResult r = run_apsp(g, cfg);
  std::map<Link, std::uint64_t> load;
  for (const Delivery& d : t.deliveries()) ++load[{d.from, d.to}];
  CHECK(load == r.metrics.per_edge_load);
  std::uint64_t mx = 0;
  for (const auto& [l, c] : load) mx = std::max(mx, c);
  CHECK(mx == r.metrics.max_edge_load());

  // every delivery crosses a graph edge, one round after its emission
  for (const Delivery& d : t.deliveries()) {
    CHECK((g.weight(d.from, d.to) || g.weight(d.to, d.from)));
    CHECK(d.round >= 2);
  }
}

TEST_CASE("determinism: identical arguments give identical transcripts") {
  const Graph g = testing::random_graph(24, 0.2, 8);
  auto once = [&] {
    Transcript t;
    ApspConfig cfg;
    cfg.seed = 8;
    cfg.transcript = &t;
    const ApspResult r = run_apsp(g, cfg);
    std::ostringstream out;
    t.write_csv(out);
    return std::make_pair(out.str(), r.metrics.per_edge_load);
  };
  CHECK(once() == once());
}

TEST_CASE("transcript csv header and row format") {
  Transcript t;
  ProtocolMessage m;
  m.kind = MessageKind::kFbOffer;
  m.source = 3;
  m.between = 4;
  m.value = 7;
  m.instance = 1;
  m.iteration = 2;
  t.record(Delivery{5, 0, 1, m});
  std::ostringstream out;
  t.write_csv(out);
  CHECK(out.str() == "round,from,to,kind,source,between,value,instance,iteration\n5,0,1,FB_OFFER,3,4,7,1,2\n");
}

TEST_CASE("mode names") {
  CHECK(to_string(CommunicationMode{}) == "bidirectional-broadcast");
  CHECK(to_string(CommunicationMode{Direction::kUnidirectional, Discipline::kUnicast}) == "unidirectional-unicast");
}

}  // TEST_SUITE
