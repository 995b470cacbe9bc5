#include "congest/engine.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <ostream>

#include "congest/random.hpp"

namespace congest {

std::string_view to_string(MessageKind kind) {
  switch (kind) {
    case MessageKind::kBfRelax: return "BF_RELAX";
    case MessageKind::kFbOffer: return "FB_OFFER";
    case MessageKind::kBroadcast: return "BCAST";
    case MessageKind::kVerify: return "VERIFY";
  }
  return "?";
}

std::string to_string(const CommunicationMode& mode) {
  std::string s = mode.direction == Direction::kBidirectional ? "bidirectional" : "unidirectional";
  s += mode.discipline == Discipline::kBroadcast ? "-broadcast" : "-unicast";
  return s;
}

std::uint64_t RunMetrics::max_node_sent() const noexcept {
  return per_node_sent.empty() ? 0 : *std::max_element(per_node_sent.begin(), per_node_sent.end());
}

std::uint64_t RunMetrics::max_edge_load() const noexcept {
  std::uint64_t m = 0;
  for (const auto& [link, c] : per_edge_load) m = std::max(m, c);
  return m;
}

void RunMetrics::append(const RunMetrics& later) {
  rounds += later.rounds;
  messages_total += later.messages_total;
  if (per_node_sent.size() < later.per_node_sent.size()) per_node_sent.resize(later.per_node_sent.size(), 0);
  for (std::size_t i = 0; i < later.per_node_sent.size(); ++i) per_node_sent[i] += later.per_node_sent[i];
  for (const auto& [link, c] : later.per_edge_load) per_edge_load[link] += c;
  max_queue_depth = std::max(max_queue_depth, later.max_queue_depth);
}

RunMetrics record_congestion(RunMetrics metrics, Link link, std::uint64_t count) {
  metrics.per_edge_load[link] += count;
  return metrics;
}

std::optional<Distance> LocalView::in_weight(NodeId from) const noexcept {
  auto it = std::lower_bound(in_.begin(), in_.end(), from, [](const Arc& a, NodeId f) { return a.node < f; });
  if (it == in_.end() || it->node != from) return std::nullopt;
  return it->weight;
}

Network::Network(const Graph& g, CommunicationMode mode) : graph_(&g), mode_(mode) {
  const NodeId n = g.node_count();
  offsets_.assign(static_cast<std::size_t>(n) + 1, 0);
  std::vector<NodeId> scratch;
  for (NodeId v = 0; v < n; ++v) {
    scratch.clear();
    for (const Arc& a : g.out_arcs(v)) scratch.push_back(a.node);
    if (mode.direction == Direction::kBidirectional) {
      for (const Arc& a : g.in_arcs(v)) scratch.push_back(a.node);
      std::sort(scratch.begin(), scratch.end());
      scratch.erase(std::unique(scratch.begin(), scratch.end()), scratch.end());
    }
    recipients_.insert(recipients_.end(), scratch.begin(), scratch.end());
    offsets_[static_cast<std::size_t>(v) + 1] = recipients_.size();
  }
  views_.resize(static_cast<std::size_t>(n));
  for (NodeId v = 0; v < n; ++v) {
    LocalView& lv = views_[static_cast<std::size_t>(v)];
    lv.id_ = v;
    lv.n_ = n;
    lv.in_ = g.in_arcs(v);
    lv.out_ = g.out_arcs(v);
    const std::size_t b = offsets_[static_cast<std::size_t>(v)];
    const std::size_t e = offsets_[static_cast<std::size_t>(v) + 1];
    lv.recipients_ = std::span<const NodeId>(recipients_.data() + b, e - b);
  }
}

std::optional<std::size_t> Network::link_index(NodeId from, NodeId to) const noexcept {
  const auto b = recipients_.begin() + static_cast<std::ptrdiff_t>(offsets_[static_cast<std::size_t>(from)]);
  const auto e = recipients_.begin() + static_cast<std::ptrdiff_t>(offsets_[static_cast<std::size_t>(from) + 1]);
  auto it = std::lower_bound(b, e, to);
  if (it == e || *it != to) return std::nullopt;
  return static_cast<std::size_t>(it - recipients_.begin());
}

RoundLimitExceeded::RoundLimitExceeded(Round limit, RunMetrics partial, std::string detail)
    : Error("round limit " + std::to_string(limit) + " exceeded" + (detail.empty() ? "" : ": " + detail)),
      partial_(std::move(partial)) {}

void Outbox::reset(NodeId self, Round round) {
  self_ = self;
  round_ = round;
  broadcasted_ = false;
  used_links_.clear();
}

void Outbox::broadcast(const ProtocolMessage& msg) {
  if (net_->mode().discipline == Discipline::kUnicast) {
    // unicast mode: the same message on every outgoing link
    for (NodeId to : net_->view(self_).recipients()) send(to, msg);
    return;
  }
  if (broadcasted_)
    throw DisciplineViolation("node " + std::to_string(self_) + " emitted twice in round " + std::to_string(round_));
  broadcasted_ = true;
  sink_->push_back(Emission{self_, kNoNode, msg});
}

void Outbox::send(NodeId to, const ProtocolMessage& msg) {
  if (net_->mode().discipline == Discipline::kBroadcast)
    throw DisciplineViolation("unicast send from node " + std::to_string(self_) + " under broadcast discipline");
  if (!net_->link_index(self_, to))
    throw DisciplineViolation("node " + std::to_string(self_) + " has no link to " + std::to_string(to));
  if (std::find(used_links_.begin(), used_links_.end(), to) != used_links_.end())
    throw DisciplineViolation("node " + std::to_string(self_) + " sent twice to " + std::to_string(to) +
                              " in round " + std::to_string(round_));
  used_links_.push_back(to);
  sink_->push_back(Emission{self_, to, msg});
}

void Transcript::write_csv(std::ostream& out) const {
  out << "round,from,to,kind,source,between,value,instance,iteration\n";
  for (const Delivery& d : deliveries_) {
    out << d.round << ',' << d.from << ',' << d.to << ',' << to_string(d.msg.kind) << ',' << d.msg.source << ','
        << d.msg.between << ',' << format_distance(d.msg.value) << ',' << d.msg.instance << ',' << d.msg.iteration
        << '\n';
  }
}

Round default_round_limit(NodeId n) {
  if (const char* env = std::getenv("CONGEST_APSP_ROUND_LIMIT"); env && *env) {
    char* end = nullptr;
    long long v = std::strtoll(env, &end, 10);
    if (end && *end == '\0' && v > 0) return static_cast<Round>(v);
  }
  const Round lg = std::max<Round>(1, static_cast<Round>(std::ceil(std::log2(static_cast<double>(n)))));
  return 64 * static_cast<Round>(n) * lg * lg * lg * lg;
}

RunMetrics Simulation::run(const Network& net, std::span<const std::unique_ptr<NodeProgram>> programs,
                           std::uint64_t seed, const SimulationOptions& options) {
  const NodeId n = net.node_count();
  if (programs.size() != static_cast<std::size_t>(n)) throw PreconditionError("need exactly one program per node");
  const Round limit = options.round_limit > 0 ? options.round_limit : default_round_limit(n);

  for (NodeId v = 0; v < n; ++v)
    programs[static_cast<std::size_t>(v)]->init(net.view(v), splitmix64(seed ^ splitmix64(static_cast<std::uint64_t>(v))));

  RunMetrics metrics;
  metrics.per_node_sent.assign(static_cast<std::size_t>(n), 0);
  std::vector<std::uint64_t> link_load(net.link_count(), 0);

  std::vector<Emission> in_flight;
  std::vector<Emission> next;
  Outbox outbox(net, next);

  auto all_idle = [&] {
    for (const auto& p : programs)
      if (!p->idle()) return false;
    return true;
  };
  auto finalize = [&](Round rounds) {
    metrics.rounds = rounds;
    for (NodeId v = 0; v < n; ++v) {
      const std::size_t b = net.link_offset(v);
      auto rec = net.view(v).recipients();
      for (std::size_t i = 0; i < rec.size(); ++i)
        if (link_load[b + i]) metrics.per_edge_load[Link{v, rec[i]}] = link_load[b + i];
    }
  };
  auto observer_finished = [&] { return options.observer == nullptr || options.observer->finished(); };

  if (all_idle() && observer_finished()) {
    finalize(0);
    return metrics;
  }

  Round round = 0;
  while (true) {
    ++round;
    if (round > limit) {
      finalize(round - 1);
      throw RoundLimitExceeded(limit, metrics, options.observer ? options.observer->describe_stall() : std::string{});
    }
    if (options.observer) options.observer->before_round(round);
    for (const auto& p : programs) p->on_round_start(round);

    for (const Emission& e : in_flight) {
      if (e.to == kNoNode) {
        for (NodeId to : net.view(e.from).recipients()) {
          programs[static_cast<std::size_t>(to)]->on_receive(e.msg, e.from);
          if (options.transcript) options.transcript->record(Delivery{round, e.from, to, e.msg});
        }
      } else {
        programs[static_cast<std::size_t>(e.to)]->on_receive(e.msg, e.from);
        if (options.transcript) options.transcript->record(Delivery{round, e.from, e.to, e.msg});
      }
    }

    next.clear();
    for (NodeId v = 0; v < n; ++v) {
      const std::size_t before = next.size();
      outbox.reset(v, round);
      programs[static_cast<std::size_t>(v)]->emit(round, outbox);
      for (std::size_t i = before; i < next.size(); ++i) {
        const Emission& e = next[i];
        ++metrics.per_node_sent[static_cast<std::size_t>(v)];
        ++metrics.messages_total;
        if (e.to == kNoNode) {
          const std::size_t b = net.link_offset(v);
          const std::size_t deg = net.view(v).recipients().size();
          for (std::size_t k = 0; k < deg; ++k) ++link_load[b + k];
        } else {
          ++link_load[*net.link_index(v, e.to)];
        }
      }
      metrics.max_queue_depth =
          std::max<std::uint64_t>(metrics.max_queue_depth, programs[static_cast<std::size_t>(v)]->queue_depth());
    }
    if (options.observer) options.observer->after_round(round);
    std::swap(in_flight, next);

    if (in_flight.empty() && all_idle() && observer_finished()) break;
  }
  finalize(round);
  return metrics;
}

RunMetrics run_simulation(const Network& net, std::span<const std::unique_ptr<NodeProgram>> programs,
                          std::uint64_t seed, const SimulationOptions& options) {
  return Simulation::run(net, programs, seed, options);
}

}  // namespace congest
