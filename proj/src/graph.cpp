#include "congest/graph.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "congest/random.hpp"

namespace congest {

namespace {

void build_csr(NodeId n, const std::vector<Edge>& edges, bool by_tail, std::vector<std::size_t>& offsets,
               std::vector<Arc>& arcs) {
  offsets.assign(static_cast<std::size_t>(n) + 1, 0);
  for (const Edge& e : edges) ++offsets[static_cast<std::size_t>(by_tail ? e.tail : e.head) + 1];
  for (std::size_t i = 1; i < offsets.size(); ++i) offsets[i] += offsets[i - 1];
  arcs.resize(edges.size());
  std::vector<std::size_t> cursor(offsets.begin(), offsets.end() - 1);
  // edges are sorted by (tail, head); in-lists come out sorted by tail as well
  for (const Edge& e : edges) {
    NodeId key = by_tail ? e.tail : e.head;
    NodeId other = by_tail ? e.head : e.tail;
    arcs[cursor[static_cast<std::size_t>(key)]++] = Arc{other, e.weight};
  }
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> split_ws(std::string_view s) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < s.size()) {
    while (i < s.size() && (s[i] == ' ' || s[i] == '\t')) ++i;
    std::size_t j = i;
    while (j < s.size() && s[j] != ' ' && s[j] != '\t') ++j;
    if (j > i) out.push_back(s.substr(i, j - i));
    i = j;
  }
  return out;
}

std::optional<std::int64_t> parse_int(std::string_view s) {
  std::int64_t v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) return std::nullopt;
  return v;
}

std::optional<double> parse_real(std::string_view s) {
  // from_chars for double is available in libstdc++ 11
  double v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || !std::isfinite(v)) return std::nullopt;
  return v;
}

bool is_direction_token(std::string_view s) { return s == "directed" || s == "undirected"; }

}  // namespace

Graph::Graph(NodeId node_count, bool directed, std::vector<Edge> edges)
    : node_count_(node_count), directed_(directed) {
  if (node_count < 1) throw PreconditionError("graph must have at least one node");
  std::vector<Edge> arcs;
  arcs.reserve(directed ? edges.size() : 2 * edges.size());
  for (const Edge& e : edges) {
    if (e.tail < 0 || e.tail >= node_count || e.head < 0 || e.head >= node_count)
      throw PreconditionError("edge endpoint out of range");
    if (e.tail == e.head) throw PreconditionError("self-loop at node " + std::to_string(e.tail));
    if (!std::isfinite(e.weight)) throw PreconditionError("edge weight must be finite");
    arcs.push_back(e);
    if (!directed) arcs.push_back(Edge{e.head, e.tail, e.weight});
  }
  std::sort(arcs.begin(), arcs.end(), [](const Edge& a, const Edge& b) {
    if (a.tail != b.tail) return a.tail < b.tail;
    if (a.head != b.head) return a.head < b.head;
    return a.weight < b.weight;
  });
  // keep the first (lightest) of each parallel group
  for (const Edge& e : arcs) {
    if (!edges_.empty() && edges_.back().tail == e.tail && edges_.back().head == e.head) continue;
    edges_.push_back(e);
  }
  build_csr(node_count_, edges_, true, out_offsets_, out_arcs_);
  build_csr(node_count_, edges_, false, in_offsets_, in_arcs_);
}

std::span<const Arc> Graph::out_arcs(NodeId v) const noexcept {
  auto i = static_cast<std::size_t>(v);
  return {out_arcs_.data() + out_offsets_[i], out_offsets_[i + 1] - out_offsets_[i]};
}

std::span<const Arc> Graph::in_arcs(NodeId v) const noexcept {
  auto i = static_cast<std::size_t>(v);
  return {in_arcs_.data() + in_offsets_[i], in_offsets_[i + 1] - in_offsets_[i]};
}

std::optional<Distance> Graph::weight(NodeId tail, NodeId head) const noexcept {
  auto arcs = out_arcs(tail);
  auto it = std::lower_bound(arcs.begin(), arcs.end(), head, [](const Arc& a, NodeId h) { return a.node < h; });
  if (it == arcs.end() || it->node != head) return std::nullopt;
  return it->weight;
}

bool Graph::has_negative_weight() const noexcept {
  return std::any_of(edges_.begin(), edges_.end(), [](const Edge& e) { return e.weight < 0; });
}

ParseError::ParseError(std::size_t line, const std::string& what)
    : Error("line " + std::to_string(line) + ": " + what), line_(line) {}

IdOutOfRangeError::IdOutOfRangeError(std::size_t line, std::int64_t id, NodeId node_count)
    : ParseError(line, "node id " + std::to_string(id) + " out of range [0, " + std::to_string(node_count) + ")") {}

Graph load_graph(std::istream& in) {
  std::string raw;
  std::size_t line_no = 0;
  std::optional<NodeId> n;
  std::int64_t declared_m = 0;
  bool directed = true;
  std::vector<Edge> edges;
  while (std::getline(in, raw)) {
    ++line_no;
    std::string_view line = raw;
    if (auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    auto tok = split_ws(line);
    if (tok.size() != 3) throw ParseError(line_no, "expected three fields");
    if (!n) {
      auto nn = parse_int(tok[0]);
      auto mm = parse_int(tok[1]);
      if (!nn || *nn < 1 || *nn > std::numeric_limits<NodeId>::max()) throw ParseError(line_no, "bad node count");
      if (!mm || *mm < 0) throw ParseError(line_no, "bad edge count");
      if (!is_direction_token(tok[2])) throw ParseError(line_no, "expected 'directed' or 'undirected'");
      n = static_cast<NodeId>(*nn);
      declared_m = *mm;
      directed = tok[2] == "directed";
      continue;
    }
    if (is_direction_token(tok[2])) throw ParseError(line_no, "duplicate header");
    auto tail = parse_int(tok[0]);
    auto head = parse_int(tok[1]);
    if (!tail || !head) throw ParseError(line_no, "non-integer node id");
    auto w = parse_real(tok[2]);
    if (!w) throw ParseError(line_no, "non-numeric weight '" + std::string(tok[2]) + "'");
    for (std::int64_t id : {*tail, *head})
      if (id < 0 || id >= *n) throw IdOutOfRangeError(line_no, id, *n);
    if (*tail == *head) throw ParseError(line_no, "self-loop");
    edges.push_back(Edge{static_cast<NodeId>(*tail), static_cast<NodeId>(*head), *w});
  }
  if (!n) throw ParseError(line_no, "missing header");
  if (static_cast<std::int64_t>(edges.size()) != declared_m)
    throw ParseError(line_no, "header declares " + std::to_string(declared_m) + " edges, found " +
                                  std::to_string(edges.size()));
  return Graph(*n, directed, std::move(edges));
}

Graph load_graph_text(std::string_view text) {
  std::istringstream in{std::string(text)};
  return load_graph(in);
}

Graph load_graph_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open graph file '" + path + "'");
  return load_graph(in);
}

std::string format_distance(Distance d) {
  if (d == kInfinity) return "inf";
  if (d == -kInfinity) return "-inf";
  char buf[64];
  if (d == std::floor(d) && std::fabs(d) < 1e15) {
    std::snprintf(buf, sizeof buf, "%.0f", d);
  } else {
    std::snprintf(buf, sizeof buf, "%.17g", d);
  }
  return buf;
}

void write_graph(std::ostream& out, const Graph& g) {
  std::vector<Edge> listed;
  for (const Edge& e : g.edges())
    if (g.directed() || e.tail < e.head) listed.push_back(e);
  out << g.node_count() << ' ' << listed.size() << ' ' << (g.directed() ? "directed" : "undirected") << '\n';
  for (const Edge& e : listed) out << e.tail << ' ' << e.head << ' ' << format_distance(e.weight) << '\n';
}

Graph generate_random_graph(const RandomGraphParams& p) {
  if (p.n < 1) throw PreconditionError("n must be positive");
  if (!(p.edge_probability > 0.0 && p.edge_probability <= 1.0))
    throw PreconditionError("edge probability must lie in (0, 1]");
  if (!(p.weight_low <= p.weight_high)) throw PreconditionError("weight_low must not exceed weight_high");
  CounterRng rng(derive_key(p.seed, StreamPurpose::kGraphGeneration, {static_cast<std::uint64_t>(p.n)}));
  const double lo = p.integer_weights ? std::ceil(p.weight_low) : p.weight_low;
  const double hi = p.integer_weights ? std::floor(p.weight_high) : p.weight_high;
  if (p.integer_weights && lo > hi) throw PreconditionError("no integer in weight range");
  std::vector<Edge> edges;
  for (NodeId u = 0; u < p.n; ++u) {
    for (NodeId v = p.directed ? 0 : u + 1; v < p.n; ++v) {
      if (u == v) continue;
      // draw both numbers unconditionally so the weight stream does not depend on p
      const double coin = rng.uniform01();
      const double r = rng.uniform01();
      if (p.edge_probability < 1.0 && coin >= p.edge_probability) continue;
      double w;
      if (p.integer_weights) {
        w = lo + std::floor(r * (hi - lo + 1.0));
        if (w > hi) w = hi;
      } else {
        w = lo + r * (hi - lo);
      }
      edges.push_back(Edge{u, v, w});
    }
  }
  return Graph(p.n, p.directed, std::move(edges));
}

void write_matrix_csv(std::ostream& out, const DistanceMatrix& m) {
  for (NodeId u = 0; u < m.size(); ++u) {
    for (NodeId v = 0; v < m.size(); ++v) {
      if (v) out << ',';
      out << format_distance(m(u, v));
    }
    out << '\n';
  }
}

DistanceMatrix read_matrix_csv(std::istream& in) {
  std::vector<std::vector<Distance>> rows;
  std::string raw;
  std::size_t line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    std::string_view line = trim(raw);
    if (line.empty()) continue;
    std::vector<Distance> row;
    std::size_t start = 0;
    while (true) {
      std::size_t comma = line.find(',', start);
      std::string_view cell = trim(line.substr(start, comma == std::string_view::npos ? line.npos : comma - start));
      if (cell == "inf") {
        row.push_back(kInfinity);
      } else {
        double v = 0;
        auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), v);
        if (ec != std::errc() || ptr != cell.data() + cell.size()) throw ParseError(line_no, "bad matrix entry");
        row.push_back(v);
      }
      if (comma == std::string_view::npos) break;
      start = comma + 1;
    }
    rows.push_back(std::move(row));
  }
  const auto n = static_cast<NodeId>(rows.size());
  DistanceMatrix m(n);
  for (NodeId u = 0; u < n; ++u) {
    if (static_cast<NodeId>(rows[static_cast<std::size_t>(u)].size()) != n)
      throw ParseError(static_cast<std::size_t>(u) + 1, "matrix is not square");
    for (NodeId v = 0; v < n; ++v) m(u, v) = rows[static_cast<std::size_t>(u)][static_cast<std::size_t>(v)];
  }
  return m;
}

}  // namespace congest
