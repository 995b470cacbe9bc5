#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "congest/types.hpp"

namespace congest {

struct Edge {
  NodeId tail;
  NodeId head;
  Distance weight;

  friend bool operator==(const Edge&, const Edge&) = default;
};

/// One endpoint of an adjacency entry: the neighbor and the weight of the
/// connecting edge in its stored direction.
struct Arc {
  NodeId node;
  Distance weight;
};

/// Directed weighted graph on nodes 0..n-1. Undirected inputs are stored as a
/// pair of opposite arcs with equal weight. Parallel edges collapse to the
/// minimum weight; self-loops are rejected.
class Graph {
 public:
  Graph(NodeId node_count, bool directed, std::vector<Edge> edges);

  NodeId node_count() const noexcept { return node_count_; }
  bool directed() const noexcept { return directed_; }

  /// All arcs sorted by (tail, head). For undirected graphs both orientations
  /// are listed.
  std::span<const Edge> edges() const noexcept { return edges_; }
  std::size_t edge_count() const noexcept { return edges_.size(); }

  std::span<const Arc> out_arcs(NodeId v) const noexcept;
  std::span<const Arc> in_arcs(NodeId v) const noexcept;

  std::optional<Distance> weight(NodeId tail, NodeId head) const noexcept;

  bool has_negative_weight() const noexcept;

  /// Same topology with every arc weight replaced by fn(edge).
  template <typename Fn>
  Graph map_weights(Fn&& fn) const {
    std::vector<Edge> out(edges_.begin(), edges_.end());
    for (Edge& e : out) e.weight = fn(e);
    return Graph(node_count_, true, std::move(out));
  }

  friend bool operator==(const Graph& a, const Graph& b) noexcept {
    return a.node_count_ == b.node_count_ && a.edges_ == b.edges_;
  }

 private:
  NodeId node_count_;
  bool directed_;
  std::vector<Edge> edges_;
  std::vector<std::size_t> out_offsets_;
  std::vector<Arc> out_arcs_;
  std::vector<std::size_t> in_offsets_;
  std::vector<Arc> in_arcs_;
};

class ParseError : public Error {
 public:
  ParseError(std::size_t line, const std::string& what);
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

class IdOutOfRangeError : public ParseError {
 public:
  IdOutOfRangeError(std::size_t line, std::int64_t id, NodeId node_count);
};

/// Parses the edge-list format:
///   <n> <m> <directed|undirected>
///   <tail> <head> <weight>      (m lines)
/// '#' starts a comment; blank lines are ignored.
Graph load_graph(std::istream& in);
Graph load_graph_text(std::string_view text);
Graph load_graph_file(const std::string& path);

void write_graph(std::ostream& out, const Graph& g);

struct RandomGraphParams {
  NodeId n = 1;
  double edge_probability = 1.0;
  Distance weight_low = 0.0;
  Distance weight_high = 1.0;
  std::uint64_t seed = 0;
  bool directed = true;
  /// Draw integer weights uniformly from [ceil(low), floor(high)].
  bool integer_weights = false;
};

Graph generate_random_graph(const RandomGraphParams& params);

/// Dense n x n matrix of extended reals; entry (u, v) is the distance from u to v.
class DistanceMatrix {
 public:
  DistanceMatrix() = default;
  explicit DistanceMatrix(NodeId n, Distance fill = kInfinity)
      : n_(n), data_(static_cast<std::size_t>(n) * static_cast<std::size_t>(n), fill) {}

  NodeId size() const noexcept { return n_; }
  Distance& operator()(NodeId u, NodeId v) noexcept { return data_[index(u, v)]; }
  Distance operator()(NodeId u, NodeId v) const noexcept { return data_[index(u, v)]; }

  friend bool operator==(const DistanceMatrix&, const DistanceMatrix&) = default;

 private:
  std::size_t index(NodeId u, NodeId v) const noexcept {
    return static_cast<std::size_t>(u) * static_cast<std::size_t>(n_) + static_cast<std::size_t>(v);
  }
  NodeId n_ = 0;
  std::vector<Distance> data_;
};

inline constexpr std::int32_t kInfiniteHops = std::numeric_limits<std::int32_t>::max();

class HopMatrix {
 public:
  HopMatrix() = default;
  explicit HopMatrix(NodeId n)
      : n_(n), data_(static_cast<std::size_t>(n) * static_cast<std::size_t>(n), kInfiniteHops) {}

  NodeId size() const noexcept { return n_; }
  std::int32_t& operator()(NodeId u, NodeId v) noexcept { return data_[index(u, v)]; }
  std::int32_t operator()(NodeId u, NodeId v) const noexcept { return data_[index(u, v)]; }

 private:
  std::size_t index(NodeId u, NodeId v) const noexcept {
    return static_cast<std::size_t>(u) * static_cast<std::size_t>(n_) + static_cast<std::size_t>(v);
  }
  NodeId n_ = 0;
  std::vector<std::int32_t> data_;
};

/// Matrix CSV: n lines of n comma-separated values, "inf" for unreachable.
void write_matrix_csv(std::ostream& out, const DistanceMatrix& m);
DistanceMatrix read_matrix_csv(std::istream& in);

std::string format_distance(Distance d);

}  // namespace congest
