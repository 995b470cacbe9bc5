#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "congest/graph.hpp"
#include "congest/types.hpp"

namespace congest {

enum class MessageKind : std::uint8_t { kBfRelax, kFbOffer, kBroadcast, kVerify };

std::string_view to_string(MessageKind kind);

/// One CONGEST message. A message carries a single distance value plus a
/// handful of O(log n)-bit tags, so it fits one link in one round.
///
/// Field use by kind:
///   kBfRelax    source = Bellman-Ford label, value = estimate, hops = edges used
///   kFbOffer    M(s, b): source = s, between = b, value = dhat(s, b); never
///               altered while forwarded
///   kBroadcast  see primitives.hpp (tree join / upcast / downcast stages)
///   kVerify     source = label, value = the sender's estimate for it
struct ProtocolMessage {
  MessageKind kind = MessageKind::kBfRelax;
  NodeId source = kNoNode;
  NodeId between = kNoNode;
  Distance value = kInfinity;
  std::int32_t hops = 0;
  std::int32_t instance = 0;
  std::int32_t iteration = 0;

  friend bool operator==(const ProtocolMessage&, const ProtocolMessage&) = default;
};

enum class Direction : std::uint8_t { kUnidirectional, kBidirectional };
enum class Discipline : std::uint8_t { kBroadcast, kUnicast };

struct CommunicationMode {
  Direction direction = Direction::kBidirectional;
  Discipline discipline = Discipline::kBroadcast;

  friend bool operator==(const CommunicationMode&, const CommunicationMode&) = default;
};

std::string to_string(const CommunicationMode& mode);

using Link = std::pair<NodeId, NodeId>;

struct RunMetrics {
  Round rounds = 0;
  std::uint64_t messages_total = 0;
  std::vector<std::uint64_t> per_node_sent;
  std::map<Link, std::uint64_t> per_edge_load;
  std::uint64_t max_queue_depth = 0;

  std::uint64_t max_node_sent() const noexcept;
  std::uint64_t max_edge_load() const noexcept;

  /// Accumulates another run executed after this one: rounds add up, counters
  /// add up, queue depth takes the maximum.
  void append(const RunMetrics& later);
};

/// Pure counter update: returns metrics with `count` more messages on `link`.
RunMetrics record_congestion(RunMetrics metrics, Link link, std::uint64_t count = 1);

/// Everything a node is allowed to know about the topology: its own id, n,
/// and the weights of its incident edges.
class LocalView {
 public:
  NodeId id() const noexcept { return id_; }
  NodeId node_count() const noexcept { return n_; }
  std::span<const Arc> in_arcs() const noexcept { return in_; }
  std::span<const Arc> out_arcs() const noexcept { return out_; }
  /// Nodes that receive what this node sends under the active direction mode.
  std::span<const NodeId> recipients() const noexcept { return recipients_; }
  /// Weight of edge (from, id), if it exists.
  std::optional<Distance> in_weight(NodeId from) const noexcept;

 private:
  friend class Network;
  NodeId id_ = 0;
  NodeId n_ = 0;
  std::span<const Arc> in_;
  std::span<const Arc> out_;
  std::span<const NodeId> recipients_;
};

/// Communication topology derived from a graph and a direction mode. In
/// bidirectional mode a node talks to in- and out-neighbors alike; in
/// unidirectional mode only along edge directions.
class Network {
 public:
  Network(const Graph& g, CommunicationMode mode);
  Network(const Network&) = delete;
  Network& operator=(const Network&) = delete;

  const Graph& graph() const noexcept { return *graph_; }
  CommunicationMode mode() const noexcept { return mode_; }
  NodeId node_count() const noexcept { return graph_->node_count(); }
  const LocalView& view(NodeId v) const noexcept { return views_[static_cast<std::size_t>(v)]; }

  /// Index of link (from, to) in [0, link_count()), or nullopt if `to` is not a recipient of `from`.
  std::optional<std::size_t> link_index(NodeId from, NodeId to) const noexcept;
  std::size_t link_offset(NodeId from) const noexcept { return offsets_[static_cast<std::size_t>(from)]; }
  std::size_t link_count() const noexcept { return recipients_.size(); }

 private:
  const Graph* graph_;
  CommunicationMode mode_;
  std::vector<std::size_t> offsets_;
  std::vector<NodeId> recipients_;
  std::vector<LocalView> views_;
};

class DisciplineViolation : public Error {
 public:
  using Error::Error;
};

class RoundLimitExceeded : public Error {
 public:
  RoundLimitExceeded(Round limit, RunMetrics partial, std::string detail = {});
  const RunMetrics& partial_metrics() const noexcept { return partial_; }

 private:
  RunMetrics partial_;
};

/// A message leaving `from` in some round; `to` is kNoNode for a broadcast.
struct Emission {
  NodeId from;
  NodeId to;
  ProtocolMessage msg;
};

/// Collects a node's emissions for one round and enforces the CONGEST
/// discipline: one broadcast per round, or one message per link in unicast.
class Outbox {
 public:
  void broadcast(const ProtocolMessage& msg);
  void send(NodeId to, const ProtocolMessage& msg);

 private:
  friend class Simulation;
  Outbox(const Network& net, std::vector<Emission>& sink) : net_(&net), sink_(&sink) {}
  void reset(NodeId self, Round round);

  const Network* net_;
  std::vector<Emission>* sink_;
  NodeId self_ = kNoNode;
  Round round_ = 0;
  bool broadcasted_ = false;
  std::vector<NodeId> used_links_;
};

/// Behavioral contract for one node. Handlers see only the node's own state,
/// its LocalView, the round number, and messages delivered to it.
class NodeProgram {
 public:
  virtual ~NodeProgram() = default;

  virtual void init(const LocalView& view, std::uint64_t node_seed) {
    (void)view;
    (void)node_seed;
  }
  virtual void on_round_start(Round round) { (void)round; }
  virtual void on_receive(const ProtocolMessage& msg, NodeId from) = 0;
  virtual void emit(Round round, Outbox& out) = 0;
  /// True when the node has nothing to send unless a new message arrives.
  virtual bool idle() const = 0;
  virtual std::size_t queue_depth() const { return 0; }
};

/// Simulator-level hook observing rounds globally. Used by the scheduler for
/// iteration boundaries; never visible to node programs.
class RoundObserver {
 public:
  virtual ~RoundObserver() = default;
  virtual void before_round(Round round) { (void)round; }
  virtual void after_round(Round round) { (void)round; }
  virtual bool finished() const { return true; }
  virtual std::string describe_stall() const { return {}; }
};

struct Delivery {
  Round round;
  NodeId from;
  NodeId to;
  ProtocolMessage msg;

  friend bool operator==(const Delivery&, const Delivery&) = default;
};

class Transcript {
 public:
  void record(const Delivery& d) { deliveries_.push_back(d); }
  std::span<const Delivery> deliveries() const noexcept { return deliveries_; }
  void clear() { deliveries_.clear(); }
  /// `round,from,to,kind,source,between,value,instance,iteration`
  void write_csv(std::ostream& out) const;

 private:
  std::vector<Delivery> deliveries_;
};

/// 64 * n * ceil(log2 n)^4, or CONGEST_APSP_ROUND_LIMIT when set.
Round default_round_limit(NodeId n);

struct SimulationOptions {
  Round round_limit = 0;  // 0 selects default_round_limit(n)
  Transcript* transcript = nullptr;
  RoundObserver* observer = nullptr;
};

/// Runs lockstep rounds. Round r: before_round hook, on_round_start for every
/// node, delivery of all messages emitted in round r-1, then emit for every
/// node in id order. Halts once every node is idle, nothing is in flight and
/// the observer reports finished; a run with nothing to do takes 0 rounds.
class Simulation {
 public:
  static RunMetrics run(const Network& net, std::span<const std::unique_ptr<NodeProgram>> programs,
                        std::uint64_t seed, const SimulationOptions& options = {});
};

RunMetrics run_simulation(const Network& net, std::span<const std::unique_ptr<NodeProgram>> programs,
                          std::uint64_t seed, const SimulationOptions& options = {});

}  // namespace congest
