#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <vector>

#include "congest/engine.hpp"
#include "congest/oracle.hpp"
#include "congest/scheduler.hpp"

namespace congest {

/// What one node knows: an estimate per label (source), kInfinity when unknown.
struct DistanceTable {
  NodeId owner = kNoNode;
  std::vector<Distance> entries;

  Distance estimate(NodeId label) const { return entries[static_cast<std::size_t>(label)]; }
};

/// Hop-bounded Bellman-Ford for one source at one node. Relaxation is keyed on
/// the pair (estimate, hops) so that reordering by the scheduler can never
/// push the effective depth past the bound: a message that already used
/// `hop_limit` edges is not forwarded.
class BellmanFordInstance final : public InstanceProgram {
 public:
  BellmanFordInstance(const LocalView& view, NodeId label, bool is_source, int hop_limit)
      : view_(&view), label_(label), is_source_(is_source), hop_limit_(hop_limit) {}

  void begin_iteration(int) override;
  void receive(const ProtocolMessage& msg, NodeId from) override;
  bool step() override;
  std::optional<ProtocolMessage> outgoing() override;

  Distance estimate() const noexcept { return estimate_; }
  std::int32_t hops() const noexcept { return hops_; }

 private:
  const LocalView* view_;
  NodeId label_;
  bool is_source_;
  int hop_limit_;
  Distance estimate_ = kInfinity;
  std::int32_t hops_ = kInfiniteHops;
  bool changed_ = false;
};

struct BellmanFordOptions {
  std::optional<Round> delay_bound;
  Round round_limit = 0;
  Transcript* transcript = nullptr;
};

struct BellmanFordResult {
  std::vector<NodeId> sources;
  /// estimate[i][v]: node v's estimate of dist(sources[i], v).
  std::vector<std::vector<Distance>> estimate;
  std::vector<std::vector<std::int32_t>> hops;
  RunMetrics metrics;

  /// Node v's table over all labels 0..n-1 (non-sources stay infinite).
  DistanceTable table(NodeId v) const;
};

/// Multi-source Bellman-Ford to depth h, one scheduler instance per source.
/// Every returned estimate is h-hop-accurate. Requires non-negative weights.
BellmanFordResult distributed_bellman_ford(const Graph& g, std::span<const NodeId> sources, int h,
                                           CommunicationMode mode, std::uint64_t seed,
                                           const BellmanFordOptions& options = {});

struct VirtualSourceResult {
  /// dist(s*, v) where s* has a zero-weight edge to every node.
  std::vector<Distance> potential;
  /// Node whose estimate still decreased in the probe round n+1.
  std::optional<NodeId> witness;
  /// Cycle read off the predecessor pointers, when a witness exists.
  std::optional<NegativeCycle> cycle;
  RunMetrics metrics;
};

/// Round-synchronous Bellman-Ford from a virtual source: every node starts
/// at 0, relaxes for n rounds, then runs one probe round. Negative weights
/// are allowed; a decrease in the probe round reports a negative cycle.
VirtualSourceResult virtual_source_bellman_ford(const Graph& g, CommunicationMode mode, std::uint64_t seed,
                                                Transcript* transcript = nullptr);

/// Item of a global broadcast: value `value` originated at `origin` as its
/// `index`-th item.
struct BroadcastItem {
  NodeId origin;
  std::int32_t index;
  Distance value;

  friend auto operator<=>(const BroadcastItem&, const BroadcastItem&) = default;
};

struct BroadcastResult {
  /// Per node, every item it holds, sorted.
  std::vector<std::vector<BroadcastItem>> store;
  RunMetrics metrics;
  Round tree_depth = 0;
};

class UnreachableNodesError : public Error {
 public:
  explicit UnreachableNodesError(std::vector<NodeId> nodes);
  const std::vector<NodeId>& nodes() const noexcept { return nodes_; }

 private:
  std::vector<NodeId> nodes_;
};

/// Stage tags carried in ProtocolMessage::iteration for kBroadcast messages.
enum class BroadcastStage : std::int32_t { kJoin = 0, kUp = 1, kDown = 2 };

/// Pipelined dissemination of K items to all nodes in O(K + D) rounds: a BFS
/// tree rooted at node 0 is grown by flooding, items travel up to the root
/// and then down the tree, one message per node per round. Requires
/// bidirectional communication and a weakly connected graph.
BroadcastResult pipelined_broadcast(const Graph& g, const std::map<NodeId, std::vector<Distance>>& items,
                                    CommunicationMode mode, std::uint64_t seed, Transcript* transcript = nullptr);

}  // namespace congest
