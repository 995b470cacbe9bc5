#pragma once

#include <deque>
#include <memory>
#include <vector>

#include "congest/engine.hpp"

namespace testing {

using namespace congest;

/// Unfiltered baseline: every node forwards each offer M(s, b) it has not
/// seen before, one per round. Computes the same minimum as the filtered
/// primitive, but every node carries about |B| messages.
class NaiveOfferNode final : public NodeProgram {
 public:
  NaiveOfferNode(NodeId n, Distance own_dhat, bool is_between, std::span<const Distance> dist_from_between)
      : seen_(static_cast<std::size_t>(n), 0), own_(own_dhat), between_(is_between), dist_(dist_from_between) {}

  void init(const LocalView& view, std::uint64_t) override {
    self_ = view.id();
    if (between_ && own_ != kInfinity) take(self_, own_);
  }
  void on_receive(const ProtocolMessage& m, NodeId) override { take(m.between, m.value); }
  void emit(Round, Outbox& out) override {
    if (queue_.empty()) return;
    out.broadcast(queue_.front());
    queue_.pop_front();
  }
  bool idle() const override { return queue_.empty(); }

  Distance output() const noexcept { return output_; }

 private:
  void take(NodeId b, Distance dhat) {
    if (seen_[static_cast<std::size_t>(b)]) return;
    seen_[static_cast<std::size_t>(b)] = 1;
    output_ = std::min(output_, saturating_add(dhat, dist_[static_cast<std::size_t>(b)]));
    ProtocolMessage m;
    m.kind = MessageKind::kFbOffer;
    m.between = b;
    m.value = dhat;
    queue_.push_back(m);
  }

  std::vector<char> seen_;
  Distance own_;
  bool between_;
  std::span<const Distance> dist_;
  NodeId self_ = kNoNode;
  Distance output_ = kInfinity;
  std::deque<ProtocolMessage> queue_;
};

struct NaiveResult {
  std::vector<Distance> output;
  RunMetrics metrics;
};

inline NaiveResult naive_broadcast(const Graph& g, std::span<const NodeId> between, std::span<const Distance> dhat,
                                   std::span<const std::vector<Distance>> tables, CommunicationMode mode) {
  const NodeId n = g.node_count();
  std::vector<char> in_b(static_cast<std::size_t>(n), 0);
  for (NodeId b : between) in_b[static_cast<std::size_t>(b)] = 1;
  Network net(g, mode);
  std::vector<std::unique_ptr<NodeProgram>> ps;
  std::vector<NaiveOfferNode*> nodes;
  for (NodeId v = 0; v < n; ++v) {
    auto p = std::make_unique<NaiveOfferNode>(n, dhat[static_cast<std::size_t>(v)], in_b[static_cast<std::size_t>(v)] != 0,
                                              tables[static_cast<std::size_t>(v)]);
    nodes.push_back(p.get());
    ps.push_back(std::move(p));
  }
  NaiveResult r;
  r.metrics = run_simulation(net, ps, 0);
  for (auto* p : nodes) r.output.push_back(p->output());
  return r;
}

}  // namespace testing
