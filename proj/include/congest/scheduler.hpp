#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "congest/engine.hpp"

namespace congest {

/// Per-node, per-instance half of a protocol that can be multiplexed with
/// other instances on the same node. Programs must tolerate arbitrary extra
/// delivery delay; all protocols in this library do.
class InstanceProgram {
 public:
  virtual ~InstanceProgram() = default;

  /// The instance enters `iteration` at this node. Iterations count down from
  /// descriptor.iterations - 1 to 0; single-shot instances get one call with 0.
  virtual void begin_iteration(int iteration) = 0;
  virtual void receive(const ProtocolMessage& msg, NodeId from) = 0;
  /// Processes what arrived since the last call. Returns true when the node
  /// now has something new to send for this instance.
  virtual bool step() = 0;
  /// The message to put on the wire when this instance reaches the head of
  /// the node's queue. May return nullopt if the pending update went stale.
  virtual std::optional<ProtocolMessage> outgoing() = 0;
};

enum class InstanceKind : std::uint8_t { kBellmanFord, kFilteredBroadcast, kBroadcast, kOther };

struct InstanceDescriptor {
  std::int32_t id = 0;  // caller label, e.g. the source node
  InstanceKind kind = InstanceKind::kOther;
  int iterations = 1;
  Round declared_dilation = 0;
  /// Expected messages per node for this instance alone.
  double declared_congestion = 1.0;
  /// Explicit start delay; drawn from the seeded stream when unset.
  std::optional<Round> initial_delay;
  /// One program per node, owned by the caller and alive for the whole run.
  std::vector<InstanceProgram*> programs;
};

enum class IterationPolicy : std::uint8_t {
  /// Iteration j of an instance starts once iteration j+1 has nothing queued
  /// and nothing in flight anywhere (omniscient detection).
  kQuiescent,
  /// Iteration boundaries every window * stretch rounds after the instance starts.
  kFixed,
};

struct SchedulerOptions {
  IterationPolicy policy = IterationPolicy::kQuiescent;
  Round window = 0;  // kFixed only; 0 selects n
  Round stretch = 1;
  /// Start delays are uniform on [0, delay_bound]. When unset the bound is
  /// ceil(sum of declared congestion / ceil(log2 n)), and 0 for a single instance.
  std::optional<Round> delay_bound;
  Round round_limit = 0;
  Transcript* transcript = nullptr;
  /// Fired after the last round of every iteration, with all nodes' state final for it.
  std::function<void(std::size_t instance, int iteration, Round round)> on_iteration_end;
};

struct ScheduleResult {
  RunMetrics metrics;
  std::vector<Round> start_round;
  std::vector<Round> completion_round;
  Round delay_bound = 0;
};

/// Runs all instances concurrently on one network. Every node keeps a single
/// FIFO queue of instances with pending updates and broadcasts for the head
/// instance each round; an instance appears in the queue at most once.
ScheduleResult schedule_parallel(const Network& net, const std::vector<InstanceDescriptor>& instances,
                                 std::uint64_t seed, const SchedulerOptions& options = {});

int ceil_log2(std::int64_t n) noexcept;

}  // namespace congest
