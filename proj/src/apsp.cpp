#include "congest/apsp.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <memory>
#include <set>

#include "congest/filtered_broadcast.hpp"
#include "congest/primitives.hpp"
#include "congest/random.hpp"

namespace congest {

bool LevelHierarchy::contains(int i, NodeId v) const {
  if (i < 0 || i >= static_cast<int>(sets.size())) return false;
  const auto& s = sets[static_cast<std::size_t>(i)];
  return std::binary_search(s.begin(), s.end(), v);
}

LevelHierarchy sample_levels(NodeId n, std::uint64_t seed) {
  if (n < 1) throw PreconditionError("hierarchy needs at least one node");
  LevelHierarchy h;
  h.k = ceil_log2(n);
  h.sets.assign(static_cast<std::size_t>(h.k) + 2, {});
  for (NodeId v = 0; v < n; ++v) h.sets[0].push_back(v);
  for (int i = 1; i <= h.k; ++i) {
    const double p = std::ldexp(1.0, -i);
    for (NodeId v = 0; v < n; ++v) {
      CounterRng rng(derive_key(seed, StreamPurpose::kLevelSampling,
                                {static_cast<std::uint64_t>(i), static_cast<std::uint64_t>(v)}));
      if (rng.uniform01() < p) h.sets[static_cast<std::size_t>(i)].push_back(v);
    }
  }
  return h;
}

int phase_depth(NodeId n, int i, double c) {
  if (n <= 1) return 1;
  const double d = std::ceil(c * std::ldexp(1.0, i + 1) * std::log(static_cast<double>(n)));
  if (!(d < static_cast<double>(n))) return n;
  return std::max(1, static_cast<int>(d));
}

std::vector<NodeId> PhaseTables::sources() const {
  std::vector<NodeId> s;
  for (NodeId v = 0; v < n_; ++v)
    if (known(v)) s.push_back(v);
  return s;
}

std::vector<std::vector<Distance>> PhaseTables::knowledge() const {
  std::vector<std::vector<Distance>> k(static_cast<std::size_t>(n_));
  for (NodeId v = 0; v < n_; ++v) {
    const auto* row = data_.data() + static_cast<std::size_t>(v) * n_;
    k[static_cast<std::size_t>(v)].assign(row, row + n_);
  }
  return k;
}

DistanceMatrix PhaseTables::to_matrix() const {
  DistanceMatrix m(n_);
  for (NodeId v = 0; v < n_; ++v)
    for (NodeId s = 0; s < n_; ++s) m(s, v) = (*this)(v, s);
  return m;
}

PhaseTables PhaseTables::from_matrix(const DistanceMatrix& dist) {
  PhaseTables t(dist.size());
  for (NodeId s = 0; s < dist.size(); ++s) {
    t.mark_known(s);
    for (NodeId v = 0; v < dist.size(); ++v) t(v, s) = dist(s, v);
  }
  return t;
}

PhaseResult run_phase(const Graph& g, int i, const LevelHierarchy& levels, const PhaseTables& prior, double c,
                      CommunicationMode mode, std::uint64_t seed, const PhaseOptions& options) {
  const NodeId n = g.node_count();
  if (i < 0 || i > levels.k) throw PreconditionError("phase index out of range");
  if (!(c > 0)) throw PreconditionError("c must be positive");
  const auto& sources = levels.sets[static_cast<std::size_t>(i)];
  const auto& between = levels.sets[static_cast<std::size_t>(i) + 1];

  PhaseResult r;
  r.tables = prior;
  r.bellman_ford = PhaseTables(n);
  r.through = PhaseTables(n);
  r.metrics.per_node_sent.assign(static_cast<std::size_t>(n), 0);
  if (sources.empty()) return r;

  BellmanFordOptions bo;
  bo.round_limit = options.round_limit;
  bo.transcript = options.transcript;
  const BellmanFordResult bf =
      distributed_bellman_ford(g, sources, phase_depth(n, i, c), mode,
                               derive_key(seed, StreamPurpose::kPhase, {static_cast<std::uint64_t>(i), 0}), bo);
  for (std::size_t k = 0; k < sources.size(); ++k) {
    r.bellman_ford.mark_known(sources[k]);
    for (NodeId v = 0; v < n; ++v) r.bellman_ford(v, sources[k]) = bf.estimate[k][static_cast<std::size_t>(v)];
  }
  r.bf_rounds = bf.metrics.rounds;
  r.metrics = bf.metrics;

  if (!between.empty()) {
    for (NodeId b : between)
      if (!prior.known(b)) throw PreconditionError("prior tables lack between node " + std::to_string(b));
    const auto knowledge = prior.knowledge();
    std::vector<FilteredBroadcastJob> jobs;
    jobs.reserve(sources.size());
    for (std::size_t k = 0; k < sources.size(); ++k) {
      FilteredBroadcastJob job;
      job.source = sources[k];
      job.dhat.assign(static_cast<std::size_t>(n), kInfinity);
      for (NodeId b : between) job.dhat[static_cast<std::size_t>(b)] = bf.estimate[k][static_cast<std::size_t>(b)];
      job.seed = derive_key(seed, StreamPurpose::kBetweenSampling,
                            {static_cast<std::uint64_t>(i), static_cast<std::uint64_t>(sources[k])});
      jobs.push_back(std::move(job));
    }
    SchedulerOptions so;
    so.policy = options.window_policy == WindowPolicy::kQuiescent ? IterationPolicy::kQuiescent : IterationPolicy::kFixed;
    so.round_limit = options.round_limit;
    so.transcript = options.transcript;
    const auto fb = filtered_broadcast_parallel(
        g, jobs, between, knowledge, mode, derive_key(seed, StreamPurpose::kPhase, {static_cast<std::uint64_t>(i), 1}),
        so);
    for (std::size_t k = 0; k < sources.size(); ++k) {
      r.through.mark_known(sources[k]);
      for (NodeId v = 0; v < n; ++v) r.through(v, sources[k]) = fb.output[k][static_cast<std::size_t>(v)];
    }
    r.fb_rounds = fb.schedule.metrics.rounds;
    r.metrics.append(fb.schedule.metrics);
  }

  for (NodeId s : sources) {
    const bool had = prior.known(s);
    r.tables.mark_known(s);
    for (NodeId v = 0; v < n; ++v) {
      Distance d = std::min(r.bellman_ford(v, s), r.through(v, s));
      if (had) d = std::min(d, prior(v, s));
      r.tables(v, s) = d;
    }
  }
  return r;
}

NegativeCycleError::NegativeCycleError(NegativeCycle cycle)
    : Error([&] {
        std::string s = "negative cycle:";
        for (NodeId v : cycle.cycle) s += " " + std::to_string(v);
        s += " (weight " + format_distance(cycle.weight) + ")";
        return s;
      }()),
      cycle_(std::move(cycle)) {}

std::variant<Reweighting, NegativeCycle> johnson_reweight(const Graph& g, CommunicationMode mode, std::uint64_t seed) {
  if (mode.direction != Direction::kBidirectional)
    throw PreconditionError("reweighting needs bidirectional communication");
  VirtualSourceResult vs = virtual_source_bellman_ford(g, mode, seed);
  if (vs.cycle) return *vs.cycle;

  std::map<NodeId, std::vector<Distance>> items;
  for (NodeId v = 0; v < g.node_count(); ++v) items[v] = {vs.potential[static_cast<std::size_t>(v)]};
  BroadcastResult bc = pipelined_broadcast(g, items, mode, seed);

  Reweighting r{Potentials{std::move(vs.potential)}, g.map_weights([](const Edge& e) { return e.weight; }),
                std::move(vs.metrics)};
  r.metrics.append(bc.metrics);
  const auto& phi = r.potentials.phi;
  // every node now holds all potentials; each tail rewrites its own out-arcs
  r.reweighted = g.map_weights([&](const Edge& e) {
    const Distance w = phi[static_cast<std::size_t>(e.tail)] + e.weight - phi[static_cast<std::size_t>(e.head)];
    return std::max<Distance>(0, w);
  });
  return r;
}

ApspResult run_apsp(const Graph& g, const ApspConfig& config) {
  const NodeId n = g.node_count();
  if (!(config.c > 0)) throw PreconditionError("c must be positive");
  ApspResult result;
  result.levels = sample_levels(n, config.seed);
  result.metrics.per_node_sent.assign(static_cast<std::size_t>(n), 0);
  if (n == 1) {
    result.dist = DistanceMatrix(1, 0);
    return result;
  }

  const Graph* work = &g;
  std::optional<Graph> reweighted;
  if (g.has_negative_weight()) {
    if (config.mode.direction != Direction::kBidirectional)
      throw PreconditionError("negative weights need bidirectional communication");
    auto rw = johnson_reweight(g, config.mode, derive_key(config.seed, StreamPurpose::kPhase, {~0ULL}));
    if (auto* cyc = std::get_if<NegativeCycle>(&rw)) throw NegativeCycleError(std::move(*cyc));
    auto& ok = std::get<Reweighting>(rw);
    result.reweight_rounds = ok.metrics.rounds;
    result.metrics.append(ok.metrics);
    result.potentials = std::move(ok.potentials);
    reweighted = std::move(ok.reweighted);
    work = &*reweighted;
  }

  PhaseOptions po;
  po.window_policy = config.window_policy;
  po.transcript = config.transcript;
  po.round_limit = config.round_limit;
  PhaseTables tables(n);
  for (int i = result.levels.k; i >= 0; --i) {
    PhaseResult phase = run_phase(*work, i, result.levels, tables, config.c, config.mode, config.seed, po);
    result.rounds_per_phase.push_back(phase.metrics.rounds);
    result.metrics.append(phase.metrics);
    if (config.on_phase) config.on_phase(i, phase);
    tables = std::move(phase.tables);
  }

  result.dist = tables.to_matrix();
  if (result.potentials) {
    const auto& phi = result.potentials->phi;
    for (NodeId s = 0; s < n; ++s)
      for (NodeId t = 0; t < n; ++t)
        if (is_finite(result.dist(s, t)))
          result.dist(s, t) += phi[static_cast<std::size_t>(t)] - phi[static_cast<std::size_t>(s)];
  }
  return result;
}

namespace {

enum class VerifyStage : std::int32_t { kEntry = 0, kViolation = 1 };

class VerifyNode final : public NodeProgram {
 public:
  explicit VerifyNode(const DistanceMatrix& tables) : tables_(&tables) {}

  void init(const LocalView& view, std::uint64_t) override {
    view_ = &view;
    self_ = view.id();
    for (NodeId s = 0; s < view.node_count(); ++s) {
      ProtocolMessage m;
      m.kind = MessageKind::kVerify;
      m.source = s;
      m.value = (*tables_)(s, self_);
      m.iteration = static_cast<std::int32_t>(VerifyStage::kEntry);
      stream_.push_back(m);
    }
    if ((*tables_)(self_, self_) > 0) flag();
  }

  void on_receive(const ProtocolMessage& msg, NodeId from) override {
    if (static_cast<VerifyStage>(msg.iteration) == VerifyStage::kViolation) {
      if (heard_.insert(msg.source).second) alerts_.push_back(msg);
      return;
    }
    const auto w = view_->in_weight(from);
    if (!w) return;
    if (saturating_add(msg.value, *w) < (*tables_)(msg.source, self_)) flag();
  }

  void emit(Round, Outbox& out) override {
    auto& q = alerts_.empty() ? stream_ : alerts_;
    if (q.empty()) return;
    out.broadcast(q.front());
    q.pop_front();
  }

  bool idle() const override { return stream_.empty() && alerts_.empty(); }
  std::size_t queue_depth() const override { return stream_.size() + alerts_.size(); }

  bool violated() const noexcept { return violated_; }
  bool informed() const noexcept { return !heard_.empty(); }

 private:
  void flag() {
    if (violated_) return;
    violated_ = true;
    heard_.insert(self_);
    ProtocolMessage m;
    m.kind = MessageKind::kVerify;
    m.source = self_;
    m.iteration = static_cast<std::int32_t>(VerifyStage::kViolation);
    alerts_.push_back(m);
  }

  const DistanceMatrix* tables_;
  const LocalView* view_ = nullptr;
  NodeId self_ = kNoNode;
  bool violated_ = false;
  std::deque<ProtocolMessage> stream_;
  std::deque<ProtocolMessage> alerts_;
  std::set<NodeId> heard_;
};

}  // namespace

Verdict las_vegas_verify(const Graph& g, const DistanceMatrix& tables, CommunicationMode mode, std::uint64_t seed) {
  const NodeId n = g.node_count();
  if (tables.size() != n) throw PreconditionError("table dimension does not match the graph");
  Network net(g, mode);
  std::vector<std::unique_ptr<NodeProgram>> programs;
  std::vector<VerifyNode*> nodes;
  for (NodeId v = 0; v < n; ++v) {
    auto p = std::make_unique<VerifyNode>(tables);
    nodes.push_back(p.get());
    programs.push_back(std::move(p));
  }
  Verdict verdict;
  verdict.metrics = run_simulation(net, programs, seed);
  for (NodeId v = 0; v < n; ++v) {
    if (nodes[static_cast<std::size_t>(v)]->violated()) verdict.violators.push_back(v);
    if (nodes[static_cast<std::size_t>(v)]->informed()) verdict.informed.push_back(v);
  }
  verdict.consistent = verdict.violators.empty();
  return verdict;
}

}  // namespace congest
