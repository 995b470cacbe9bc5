#include "congest/primitives.hpp"

#include <algorithm>
#include <deque>
#include <memory>
#include <set>

namespace congest {

void BellmanFordInstance::begin_iteration(int) {
  if (is_source_) {
    estimate_ = 0;
    hops_ = 0;
    changed_ = true;
  }
}

void BellmanFordInstance::receive(const ProtocolMessage& msg, NodeId from) {
  // in bidirectional mode messages also arrive over reversed edges; those carry no path
  const auto w = view_->in_weight(from);
  if (!w || msg.hops >= hop_limit_) return;
  const Distance cand = saturating_add(msg.value, *w);
  const std::int32_t cand_hops = msg.hops + 1;
  if (cand < estimate_ || (cand == estimate_ && cand_hops < hops_)) {
    estimate_ = cand;
    hops_ = cand_hops;
    changed_ = true;
  }
}

bool BellmanFordInstance::step() {
  const bool send = changed_ && hops_ < hop_limit_;
  changed_ = false;
  return send;
}

std::optional<ProtocolMessage> BellmanFordInstance::outgoing() {
  if (hops_ >= hop_limit_) return std::nullopt;
  ProtocolMessage m;
  m.kind = MessageKind::kBfRelax;
  m.source = label_;
  m.value = estimate_;
  m.hops = hops_;
  return m;
}

DistanceTable BellmanFordResult::table(NodeId v) const {
  const std::size_t n = estimate.empty() ? 0 : estimate.front().size();
  DistanceTable t{v, std::vector<Distance>(n, kInfinity)};
  for (std::size_t i = 0; i < sources.size(); ++i)
    t.entries[static_cast<std::size_t>(sources[i])] = estimate[i][static_cast<std::size_t>(v)];
  return t;
}

BellmanFordResult distributed_bellman_ford(const Graph& g, std::span<const NodeId> sources, int h,
                                           CommunicationMode mode, std::uint64_t seed,
                                           const BellmanFordOptions& options) {
  if (h < 1) throw PreconditionError("Bellman-Ford depth must be positive");
  if (g.has_negative_weight()) throw PreconditionError("hop-bounded Bellman-Ford requires non-negative weights");
  const NodeId n = g.node_count();
  for (NodeId s : sources)
    if (s < 0 || s >= n) throw PreconditionError("source out of range");

  Network net(g, mode);
  const std::size_t k = sources.size();
  std::vector<std::vector<BellmanFordInstance>> programs(k);
  std::vector<InstanceDescriptor> instances(k);
  for (std::size_t i = 0; i < k; ++i) {
    programs[i].reserve(static_cast<std::size_t>(n));
    for (NodeId v = 0; v < n; ++v) programs[i].emplace_back(net.view(v), sources[i], v == sources[i], h);
    InstanceDescriptor& d = instances[i];
    d.id = sources[i];
    d.kind = InstanceKind::kBellmanFord;
    d.declared_dilation = std::min<Round>(h, n) + 1;
    d.declared_congestion = 1.0;
    for (auto& p : programs[i]) d.programs.push_back(&p);
  }
  SchedulerOptions so;
  so.delay_bound = options.delay_bound;
  so.round_limit = options.round_limit;
  so.transcript = options.transcript;
  ScheduleResult sched = schedule_parallel(net, instances, seed, so);

  BellmanFordResult r;
  r.sources.assign(sources.begin(), sources.end());
  r.estimate.assign(k, std::vector<Distance>(static_cast<std::size_t>(n), kInfinity));
  r.hops.assign(k, std::vector<std::int32_t>(static_cast<std::size_t>(n), kInfiniteHops));
  for (std::size_t i = 0; i < k; ++i) {
    for (NodeId v = 0; v < n; ++v) {
      r.estimate[i][static_cast<std::size_t>(v)] = programs[i][static_cast<std::size_t>(v)].estimate();
      r.hops[i][static_cast<std::size_t>(v)] = programs[i][static_cast<std::size_t>(v)].hops();
    }
  }
  r.metrics = std::move(sched.metrics);
  return r;
}

namespace {

class VirtualSourceNode final : public NodeProgram {
 public:
  void init(const LocalView& view, std::uint64_t) override {
    view_ = &view;
    last_round_ = view.node_count() + 1;
  }

  void on_round_start(Round round) override { round_ = round; }

  void on_receive(const ProtocolMessage& msg, NodeId from) override {
    const auto w = view_->in_weight(from);
    if (!w) return;
    const Distance cand = msg.value + *w;
    if (cand < estimate_) {
      estimate_ = cand;
      pred_ = from;
      changed_ = true;
      if (round_ == last_round_) probe_decrease_ = true;
    }
  }

  void emit(Round round, Outbox& out) override {
    const bool send = (round == 1) || (changed_ && round < last_round_);
    changed_ = false;
    if (!send) return;
    ProtocolMessage m;
    m.kind = MessageKind::kBfRelax;
    m.source = kNoNode;  // virtual label
    m.value = estimate_;
    out.broadcast(m);
  }

  bool idle() const override { return round_ >= 1 && (!changed_ || round_ >= last_round_); }

  Distance estimate() const noexcept { return estimate_; }
  NodeId pred() const noexcept { return pred_; }
  bool probe_decrease() const noexcept { return probe_decrease_; }

 private:
  const LocalView* view_ = nullptr;
  Round round_ = 0;
  Round last_round_ = 0;
  Distance estimate_ = 0;
  NodeId pred_ = kNoNode;
  bool changed_ = false;
  bool probe_decrease_ = false;
};

}  // namespace

VirtualSourceResult virtual_source_bellman_ford(const Graph& g, CommunicationMode mode, std::uint64_t seed,
                                                Transcript* transcript) {
  Network net(g, mode);
  const NodeId n = g.node_count();
  std::vector<std::unique_ptr<NodeProgram>> programs;
  std::vector<VirtualSourceNode*> nodes;
  for (NodeId v = 0; v < n; ++v) {
    auto p = std::make_unique<VirtualSourceNode>();
    nodes.push_back(p.get());
    programs.push_back(std::move(p));
  }
  SimulationOptions so;
  so.transcript = transcript;
  so.round_limit = static_cast<Round>(n) + 2;
  VirtualSourceResult r;
  r.metrics = run_simulation(net, programs, seed, so);
  r.potential.resize(static_cast<std::size_t>(n));
  for (NodeId v = 0; v < n; ++v) {
    r.potential[static_cast<std::size_t>(v)] = nodes[static_cast<std::size_t>(v)]->estimate();
    if (!r.witness && nodes[static_cast<std::size_t>(v)]->probe_decrease()) r.witness = v;
  }
  if (r.witness) {
    // Walking n predecessor steps back from a probe-round decrease lands on a
    // cycle of the predecessor graph, and such cycles are negative.
    NodeId x = *r.witness;
    bool ok = true;
    for (NodeId i = 0; i < n && ok; ++i) {
      x = nodes[static_cast<std::size_t>(x)]->pred();
      ok = x != kNoNode;
    }
    if (ok) {
      std::vector<NodeId> cyc;
      NodeId y = x;
      std::set<NodeId> seen;
      do {
        cyc.push_back(y);
        seen.insert(y);
        y = nodes[static_cast<std::size_t>(y)]->pred();
      } while (y != x && y != kNoNode && !seen.count(y));
      if (y == x) {
        std::reverse(cyc.begin(), cyc.end());
        Distance w = 0;
        for (std::size_t i = 0; i < cyc.size(); ++i) w += g.weight(cyc[i], cyc[(i + 1) % cyc.size()]).value_or(0);
        if (w < 0) {
          auto it = std::min_element(cyc.begin(), cyc.end());
          std::rotate(cyc.begin(), it, cyc.end());
          cyc.push_back(cyc.front());
          r.cycle = NegativeCycle{std::move(cyc), w};
        }
      }
    }
    if (!r.cycle) r.cycle = oracle::find_negative_cycle(g);
  }
  return r;
}

UnreachableNodesError::UnreachableNodesError(std::vector<NodeId> nodes)
    : Error([&] {
        std::string s = "unreachable nodes:";
        for (std::size_t i = 0; i < nodes.size() && i < 20; ++i) s += " " + std::to_string(nodes[i]);
        if (nodes.size() > 20) s += " ...";
        return s;
      }()),
      nodes_(std::move(nodes)) {}

namespace {

class BroadcastNode final : public NodeProgram {
 public:
  explicit BroadcastNode(std::vector<Distance> own) : own_(std::move(own)) {}

  void init(const LocalView& view, std::uint64_t) override {
    self_ = view.id();
    if (self_ == 0) {
      joined_ = true;
      depth_ = 0;
      ProtocolMessage join;
      join.kind = MessageKind::kBroadcast;
      join.source = 0;
      join.value = 0;
      join.iteration = static_cast<std::int32_t>(BroadcastStage::kJoin);
      out_.push_back(join);
      enqueue_own();
    }
  }

  void on_round_start(Round) override { join_from_ = kNoNode; }

  void on_receive(const ProtocolMessage& msg, NodeId from) override {
    switch (static_cast<BroadcastStage>(msg.iteration)) {
      case BroadcastStage::kJoin:
        if (!joined_ && (join_from_ == kNoNode || from < join_from_)) {
          join_from_ = from;
          join_depth_ = static_cast<Round>(msg.value) + 1;
        }
        break;
      case BroadcastStage::kUp:
        if (msg.between != self_) break;
        if (learn(msg)) {
          if (self_ == 0) {
            push_down(msg);
          } else {
            ProtocolMessage up = msg;
            up.between = parent_;
            out_.push_back(up);
          }
        }
        break;
      case BroadcastStage::kDown:
        if (from != parent_) break;
        learn(msg);
        if (forwarded_down_.insert({msg.source, msg.hops}).second) push_down(msg);
        break;
    }
  }

  void emit(Round, Outbox& out) override {
    if (!joined_ && join_from_ != kNoNode) {
      joined_ = true;
      parent_ = join_from_;
      depth_ = join_depth_;
      ProtocolMessage join;
      join.kind = MessageKind::kBroadcast;
      join.source = 0;
      join.value = static_cast<Distance>(depth_);
      join.iteration = static_cast<std::int32_t>(BroadcastStage::kJoin);
      out_.push_front(join);
      enqueue_own();
    }
    if (out_.empty()) return;
    out.broadcast(out_.front());
    out_.pop_front();
  }

  bool idle() const override { return out_.empty(); }
  std::size_t queue_depth() const override { return out_.size(); }

  bool joined() const noexcept { return joined_; }
  Round depth() const noexcept { return depth_; }
  std::vector<BroadcastItem> items() const {
    std::vector<BroadcastItem> v;
    for (const auto& [key, value] : known_) v.push_back(BroadcastItem{key.first, key.second, value});
    return v;
  }

 private:
  bool learn(const ProtocolMessage& m) { return known_.emplace(std::make_pair(m.source, m.hops), m.value).second; }

  void push_down(ProtocolMessage m) {
    m.between = kNoNode;
    m.iteration = static_cast<std::int32_t>(BroadcastStage::kDown);
    out_.push_back(m);
  }

  void enqueue_own() {
    for (std::size_t i = 0; i < own_.size(); ++i) {
      ProtocolMessage m;
      m.kind = MessageKind::kBroadcast;
      m.source = self_;
      m.hops = static_cast<std::int32_t>(i);
      m.value = own_[i];
      learn(m);
      if (self_ == 0) {
        push_down(m);
      } else {
        m.between = parent_;
        m.iteration = static_cast<std::int32_t>(BroadcastStage::kUp);
        out_.push_back(m);
      }
    }
  }

  std::vector<Distance> own_;
  NodeId self_ = kNoNode;
  bool joined_ = false;
  NodeId parent_ = kNoNode;
  Round depth_ = 0;
  NodeId join_from_ = kNoNode;
  Round join_depth_ = 0;
  std::deque<ProtocolMessage> out_;
  std::map<std::pair<NodeId, std::int32_t>, Distance> known_;
  std::set<std::pair<NodeId, std::int32_t>> forwarded_down_;
};

}  // namespace

BroadcastResult pipelined_broadcast(const Graph& g, const std::map<NodeId, std::vector<Distance>>& items,
                                    CommunicationMode mode, std::uint64_t seed, Transcript* transcript) {
  if (mode.direction != Direction::kBidirectional)
    throw PreconditionError("pipelined broadcast needs bidirectional communication");
  const NodeId n = g.node_count();
  Network net(g, mode);
  std::vector<std::unique_ptr<NodeProgram>> programs;
  std::vector<BroadcastNode*> nodes;
  for (NodeId v = 0; v < n; ++v) {
    auto it = items.find(v);
    auto p = std::make_unique<BroadcastNode>(it == items.end() ? std::vector<Distance>{} : it->second);
    nodes.push_back(p.get());
    programs.push_back(std::move(p));
  }
  SimulationOptions so;
  so.transcript = transcript;
  BroadcastResult r;
  r.metrics = run_simulation(net, programs, seed, so);
  std::vector<NodeId> missing;
  for (NodeId v = 0; v < n; ++v) {
    const BroadcastNode& b = *nodes[static_cast<std::size_t>(v)];
    if (!b.joined()) missing.push_back(v);
    r.tree_depth = std::max(r.tree_depth, b.depth());
    r.store.push_back(b.items());
  }
  if (!missing.empty()) throw UnreachableNodesError(std::move(missing));
  return r;
}

}  // namespace congest
