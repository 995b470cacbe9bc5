#include "congest/scheduler.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <memory>

#include "congest/random.hpp"

namespace congest {

int ceil_log2(std::int64_t n) noexcept {
  int k = 0;
  while ((std::int64_t{1} << k) < n) ++k;
  return k;
}

namespace {

struct InstanceCounters {
  std::vector<std::int64_t> queued;
  std::vector<std::int64_t> emitted;
};

class MultiplexNode final : public NodeProgram {
 public:
  MultiplexNode(NodeId self, std::size_t instance_count, InstanceCounters& counters)
      : self_(self), programs_(instance_count, nullptr), queued_(instance_count, 0), dirty_flag_(instance_count, 0),
        counters_(&counters) {}

  void attach(std::size_t k, InstanceProgram* p) { programs_[k] = p; }

  void begin(std::size_t k, int iteration) {
    programs_[k]->begin_iteration(iteration);
    mark_dirty(k);
  }

  void on_receive(const ProtocolMessage& msg, NodeId from) override {
    const auto k = static_cast<std::size_t>(msg.instance);
    programs_[k]->receive(msg, from);
    mark_dirty(k);
  }

  void emit(Round, Outbox& out) override {
    for (std::size_t k : dirty_) {
      dirty_flag_[k] = 0;
      if (programs_[k]->step() && !queued_[k]) {
        queued_[k] = 1;
        queue_.push_back(k);
        ++counters_->queued[k];
      }
    }
    dirty_.clear();
    while (!queue_.empty()) {
      const std::size_t k = queue_.front();
      queue_.pop_front();
      queued_[k] = 0;
      --counters_->queued[k];
      if (auto msg = programs_[k]->outgoing()) {
        msg->instance = static_cast<std::int32_t>(k);
        out.broadcast(*msg);
        ++counters_->emitted[k];
        break;
      }
    }
  }

  bool idle() const override { return queue_.empty() && dirty_.empty(); }
  std::size_t queue_depth() const override { return queue_.size(); }

 private:
  void mark_dirty(std::size_t k) {
    if (!dirty_flag_[k]) {
      dirty_flag_[k] = 1;
      dirty_.push_back(k);
    }
  }

  NodeId self_;
  std::vector<InstanceProgram*> programs_;
  std::vector<char> queued_;
  std::vector<char> dirty_flag_;
  std::vector<std::size_t> dirty_;
  std::deque<std::size_t> queue_;
  InstanceCounters* counters_;
};

class Controller final : public RoundObserver {
 public:
  enum class State : std::uint8_t { kWaiting, kActive, kDone };

  Controller(const std::vector<InstanceDescriptor>& instances, std::vector<MultiplexNode*> nodes,
             InstanceCounters& counters, const SchedulerOptions& options, Round window,
             std::vector<Round> start_round)
      : instances_(instances),
        nodes_(std::move(nodes)),
        counters_(&counters),
        options_(options),
        span_(window * std::max<Round>(1, options.stretch)),
        start_(std::move(start_round)),
        completion_(instances.size(), -1),
        iteration_(instances.size(), 0),
        boundary_(instances.size(), 0),
        state_(instances.size(), State::kWaiting) {
    for (std::size_t k = 0; k < instances_.size(); ++k) {
      if (instances_[k].iterations < 1) throw PreconditionError("instance needs at least one iteration");
      by_start_.push_back(k);
    }
    std::stable_sort(by_start_.begin(), by_start_.end(),
                     [&](std::size_t a, std::size_t b) { return start_[a] < start_[b]; });
    remaining_ = instances_.size();
  }

  void before_round(Round round) override {
    while (next_start_ < by_start_.size() && start_[by_start_[next_start_]] <= round) {
      const std::size_t k = by_start_[next_start_++];
      state_[k] = State::kActive;
      iteration_[k] = instances_[k].iterations - 1;
      boundary_[k] = round + span_ - 1;
      begin_all(k, iteration_[k]);
      active_.push_back(k);
    }
  }

  void after_round(Round round) override {
    for (std::size_t idx = 0; idx < active_.size();) {
      const std::size_t k = active_[idx];
      bool ends = false;
      if (options_.policy == IterationPolicy::kQuiescent) {
        ends = counters_->queued[k] == 0 && counters_->emitted[k] == 0;
      } else {
        ends = round >= boundary_[k];
      }
      counters_->emitted[k] = 0;
      if (!ends) {
        ++idx;
        continue;
      }
      if (options_.on_iteration_end) options_.on_iteration_end(k, iteration_[k], round);
      if (iteration_[k] > 0) {
        --iteration_[k];
        boundary_[k] = round + span_;
        begin_all(k, iteration_[k]);
        ++idx;
      } else {
        state_[k] = State::kDone;
        completion_[k] = round;
        --remaining_;
        active_[idx] = active_.back();
        active_.pop_back();
      }
    }
    // keep a deterministic order for the next round's iteration callbacks
    std::sort(active_.begin(), active_.end());
  }

  bool finished() const override { return remaining_ == 0; }

  std::string describe_stall() const override {
    std::string s = "instances still running:";
    int listed = 0;
    for (std::size_t k = 0; k < instances_.size() && listed < 10; ++k) {
      if (state_[k] == State::kDone) continue;
      s += " " + std::to_string(instances_[k].id);
      ++listed;
    }
    return s;
  }

  const std::vector<Round>& completion() const noexcept { return completion_; }

 private:
  void begin_all(std::size_t k, int iteration) {
    for (MultiplexNode* node : nodes_) node->begin(k, iteration);
  }

  const std::vector<InstanceDescriptor>& instances_;
  std::vector<MultiplexNode*> nodes_;
  InstanceCounters* counters_;
  const SchedulerOptions& options_;
  Round span_;
  std::vector<Round> start_;
  std::vector<Round> completion_;
  std::vector<int> iteration_;
  std::vector<Round> boundary_;
  std::vector<State> state_;
  std::vector<std::size_t> by_start_;
  std::size_t next_start_ = 0;
  std::vector<std::size_t> active_;
  std::size_t remaining_ = 0;
};

}  // namespace

ScheduleResult schedule_parallel(const Network& net, const std::vector<InstanceDescriptor>& instances,
                                 std::uint64_t seed, const SchedulerOptions& options) {
  const NodeId n = net.node_count();
  const std::size_t k_count = instances.size();
  for (const InstanceDescriptor& d : instances)
    if (d.programs.size() != static_cast<std::size_t>(n))
      throw PreconditionError("instance " + std::to_string(d.id) + " needs one program per node");

  ScheduleResult result;
  if (options.delay_bound) {
    result.delay_bound = *options.delay_bound;
  } else if (k_count > 1) {
    double total = 0;
    for (const InstanceDescriptor& d : instances) total += d.declared_congestion;
    result.delay_bound = static_cast<Round>(std::ceil(total / std::max(1, ceil_log2(n))));
  }

  result.start_round.resize(k_count);
  for (std::size_t k = 0; k < k_count; ++k) {
    Round delay = 0;
    if (instances[k].initial_delay) {
      delay = *instances[k].initial_delay;
    } else if (result.delay_bound > 0) {
      CounterRng rng(derive_key(seed, StreamPurpose::kSchedulerDelay, {static_cast<std::uint64_t>(k)}));
      delay = static_cast<Round>(rng() % static_cast<std::uint64_t>(result.delay_bound + 1));
    }
    result.start_round[k] = delay + 1;
  }

  InstanceCounters counters{std::vector<std::int64_t>(k_count, 0), std::vector<std::int64_t>(k_count, 0)};
  std::vector<std::unique_ptr<NodeProgram>> programs;
  std::vector<MultiplexNode*> nodes;
  programs.reserve(static_cast<std::size_t>(n));
  for (NodeId v = 0; v < n; ++v) {
    auto node = std::make_unique<MultiplexNode>(v, k_count, counters);
    for (std::size_t k = 0; k < k_count; ++k) node->attach(k, instances[k].programs[static_cast<std::size_t>(v)]);
    nodes.push_back(node.get());
    programs.push_back(std::move(node));
  }

  const Round window = options.window > 0 ? options.window : n;
  Controller controller(instances, nodes, counters, options, window, result.start_round);
  SimulationOptions sim;
  sim.round_limit = options.round_limit;
  sim.transcript = options.transcript;
  sim.observer = &controller;
  result.metrics = run_simulation(net, programs, seed, sim);
  result.completion_round = controller.completion();
  return result;
}

}  // namespace congest
