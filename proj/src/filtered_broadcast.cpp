#include "congest/filtered_broadcast.hpp"

#include <algorithm>

#include "congest/random.hpp"

namespace congest {

BetweenHierarchy sample_between_hierarchy(std::span<const NodeId> between, NodeId n, std::uint64_t seed) {
  const int top = ceil_log2(n);
  BetweenHierarchy h;
  h.levels.assign(static_cast<std::size_t>(top) + 2, {});
  h.top_level.assign(static_cast<std::size_t>(n), -1);
  std::vector<NodeId> sorted(between.begin(), between.end());
  std::sort(sorted.begin(), sorted.end());
  sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());
  for (NodeId b : sorted) {
    if (b < 0 || b >= n) throw PreconditionError("between node out of range");
    CounterRng rng(derive_key(seed, StreamPurpose::kBetweenSampling, {static_cast<std::uint64_t>(b)}));
    int level = 0;
    while (level < top && rng.coin()) ++level;
    h.top_level[static_cast<std::size_t>(b)] = level;
    for (int j = 0; j <= level; ++j) h.levels[static_cast<std::size_t>(j)].push_back(b);
  }
  return h;
}

FilterDecision filter_decision(const FilterState& state, std::span<const Offer> candidates) {
  FilterDecision d;
  d.output = state.output;
  NodeId best_b = kNoNode;
  Distance best_value = kInfinity;
  Offer best;
  for (const Offer& c : candidates) {
    const Distance v = saturating_add(c.dhat, state.dist_from_between[static_cast<std::size_t>(c.between)]);
    if (v == kInfinity) continue;
    if (best_b == kNoNode || v < best_value || (v == best_value && c.between < best_b)) {
      best_b = c.between;
      best_value = v;
      best = c;
    }
  }
  if (best_b != kNoNode && best_value < state.output) {
    d.forward = best;
    d.output = best_value;
  }
  return d;
}

FilteredBroadcastInstance::FilteredBroadcastInstance(NodeId self, NodeId source, int top_level, Distance dhat,
                                                     std::span<const Distance> dist_from_between, int levels)
    : source_(source), top_level_(top_level), dhat_(dhat), emissions_(static_cast<std::size_t>(levels), 0) {
  state_.owner = self;
  state_.dist_from_between = dist_from_between;
}

void FilteredBroadcastInstance::begin_iteration(int iteration) {
  iteration_ = iteration;
  // infinite estimates never win a minimum, so they are never offered
  self_offer_ = top_level_ >= iteration && dhat_ != kInfinity;
}

void FilteredBroadcastInstance::receive(const ProtocolMessage& msg, NodeId) {
  const Distance v = saturating_add(msg.value, state_.dist_from_between[static_cast<std::size_t>(msg.between)]);
  if (!have_incoming_ || v < incoming_value_ || (v == incoming_value_ && msg.between < incoming_.between)) {
    have_incoming_ = true;
    incoming_ = Offer{msg.between, msg.value};
    incoming_value_ = v;
  }
}

bool FilteredBroadcastInstance::step() {
  Offer cands[2];
  std::size_t count = 0;
  if (have_incoming_) cands[count++] = incoming_;
  if (self_offer_) cands[count++] = Offer{state_.owner, dhat_};
  have_incoming_ = false;
  self_offer_ = false;
  if (count == 0) return false;
  const FilterDecision d = filter_decision(state_, std::span<const Offer>(cands, count));
  if (!d.forward) return false;
  state_.output = d.output;
  state_.best = *d.forward;
  return true;
}

std::optional<ProtocolMessage> FilteredBroadcastInstance::outgoing() {
  if (state_.best.between == kNoNode) return std::nullopt;
  ProtocolMessage m;
  m.kind = MessageKind::kFbOffer;
  m.source = source_;
  m.between = state_.best.between;
  m.value = state_.best.dhat;
  m.iteration = iteration_;
  if (iteration_ >= 0) ++emissions_[static_cast<std::size_t>(iteration_)];
  emitted_values_.push_back(state_.output);
  return m;
}

std::vector<std::vector<Distance>> knowledge_from_matrix(const DistanceMatrix& dist) {
  const NodeId n = dist.size();
  std::vector<std::vector<Distance>> k(static_cast<std::size_t>(n), std::vector<Distance>(static_cast<std::size_t>(n)));
  for (NodeId b = 0; b < n; ++b)
    for (NodeId v = 0; v < n; ++v) k[static_cast<std::size_t>(v)][static_cast<std::size_t>(b)] = dist(b, v);
  return k;
}

std::vector<Distance> dist_through_oracle(std::span<const Distance> dhat, const DistanceMatrix& dist,
                                          std::span<const NodeId> between) {
  const NodeId n = dist.size();
  std::vector<Distance> out(static_cast<std::size_t>(n), kInfinity);
  for (NodeId v = 0; v < n; ++v)
    for (NodeId b : between)
      out[static_cast<std::size_t>(v)] =
          std::min(out[static_cast<std::size_t>(v)], saturating_add(dhat[static_cast<std::size_t>(b)], dist(b, v)));
  return out;
}

FilteredBroadcastResult filtered_broadcast(const Graph& g, NodeId source, std::span<const NodeId> between,
                                           std::span<const Distance> dhat,
                                           std::span<const std::vector<Distance>> dist_tables,
                                           CommunicationMode mode, std::uint64_t seed,
                                           const FilteredBroadcastOptions& options) {
  const NodeId n = g.node_count();
  if (source < 0 || source >= n) throw PreconditionError("source out of range");
  if (dhat.size() != static_cast<std::size_t>(n)) throw PreconditionError("dhat must have one entry per node");
  if (dist_tables.size() != static_cast<std::size_t>(n)) throw PreconditionError("need one distance table per node");
  for (const auto& t : dist_tables)
    if (t.size() != static_cast<std::size_t>(n)) throw PreconditionError("distance tables must be indexed by node id");
  if (options.validate_against) {
    for (NodeId b : between)
      for (NodeId v = 0; v < n; ++v)
        if (dist_tables[static_cast<std::size_t>(v)][static_cast<std::size_t>(b)] != (*options.validate_against)(b, v))
          throw PreconditionError("dist table of node " + std::to_string(v) + " is wrong for between node " +
                                  std::to_string(b));
  }

  Network net(g, mode);
  FilteredBroadcastResult r;
  r.hierarchy = sample_between_hierarchy(between, n, seed);
  const int levels = r.hierarchy.top() + 1;

  std::vector<FilteredBroadcastInstance> nodes;
  nodes.reserve(static_cast<std::size_t>(n));
  for (NodeId v = 0; v < n; ++v)
    nodes.emplace_back(v, source, r.hierarchy.top_level[static_cast<std::size_t>(v)], dhat[static_cast<std::size_t>(v)],
                       dist_tables[static_cast<std::size_t>(v)], levels);

  InstanceDescriptor d;
  d.id = source;
  d.kind = InstanceKind::kFilteredBroadcast;
  d.iterations = levels;
  d.initial_delay = 0;
  d.declared_dilation = static_cast<Round>(levels) * (options.window > 0 ? options.window : n);
  d.declared_congestion = static_cast<double>(levels);
  for (auto& p : nodes) d.programs.push_back(&p);

  if (options.record_boundaries) {
    r.boundary_output.assign(static_cast<std::size_t>(levels), {});
    r.boundary_round.assign(static_cast<std::size_t>(levels), 0);
  }
  SchedulerOptions so;
  so.policy = options.policy;
  so.window = options.window;
  so.round_limit = options.round_limit;
  so.transcript = options.transcript;
  so.delay_bound = 0;
  if (options.record_boundaries) {
    so.on_iteration_end = [&](std::size_t, int iteration, Round round) {
      auto& snap = r.boundary_output[static_cast<std::size_t>(iteration)];
      snap.resize(static_cast<std::size_t>(n));
      for (NodeId v = 0; v < n; ++v) snap[static_cast<std::size_t>(v)] = nodes[static_cast<std::size_t>(v)].output();
      r.boundary_round[static_cast<std::size_t>(iteration)] = round;
    };
  }
  ScheduleResult sched = schedule_parallel(net, {d}, seed, so);
  r.metrics = std::move(sched.metrics);
  for (const auto& p : nodes) {
    r.output.push_back(p.output());
    r.best_between.push_back(p.best_between());
    r.emissions.push_back(p.emissions());
    r.emitted_values.push_back(p.emitted_values());
  }
  return r;
}

ParallelFilteredBroadcastResult filtered_broadcast_parallel(const Graph& g, std::span<const FilteredBroadcastJob> jobs,
                                                            std::span<const NodeId> between,
                                                            std::span<const std::vector<Distance>> dist_tables,
                                                            CommunicationMode mode, std::uint64_t seed,
                                                            const SchedulerOptions& options) {
  const NodeId n = g.node_count();
  if (dist_tables.size() != static_cast<std::size_t>(n)) throw PreconditionError("need one distance table per node");
  Network net(g, mode);
  const int levels = ceil_log2(n) + 1;
  std::vector<std::vector<FilteredBroadcastInstance>> programs(jobs.size());
  std::vector<InstanceDescriptor> instances(jobs.size());
  for (std::size_t k = 0; k < jobs.size(); ++k) {
    const FilteredBroadcastJob& job = jobs[k];
    if (job.source < 0 || job.source >= n) throw PreconditionError("source out of range");
    if (job.dhat.size() != static_cast<std::size_t>(n)) throw PreconditionError("dhat must have one entry per node");
    const BetweenHierarchy h = sample_between_hierarchy(between, n, job.seed);
    programs[k].reserve(static_cast<std::size_t>(n));
    for (NodeId v = 0; v < n; ++v)
      programs[k].emplace_back(v, job.source, h.top_level[static_cast<std::size_t>(v)],
                               job.dhat[static_cast<std::size_t>(v)], dist_tables[static_cast<std::size_t>(v)], levels);
    InstanceDescriptor& d = instances[k];
    d.id = job.source;
    d.kind = InstanceKind::kFilteredBroadcast;
    d.iterations = levels;
    d.declared_dilation = static_cast<Round>(levels) * (options.window > 0 ? options.window : n);
    d.declared_congestion = static_cast<double>(levels);
    for (auto& p : programs[k]) d.programs.push_back(&p);
  }

  ParallelFilteredBroadcastResult r;
  r.schedule = schedule_parallel(net, instances, seed, options);
  r.output.resize(jobs.size());
  for (std::size_t k = 0; k < jobs.size(); ++k) {
    for (const auto& p : programs[k]) {
      r.output[k].push_back(p.output());
      for (std::uint32_t e : p.emissions()) r.max_iteration_emissions = std::max(r.max_iteration_emissions, e);
    }
  }
  return r;
}

}  // namespace congest
