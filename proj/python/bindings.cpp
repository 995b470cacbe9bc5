#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "congest/apsp.hpp"
#include "congest/filtered_broadcast.hpp"
#include "congest/graph.hpp"
#include "congest/oracle.hpp"
#include "congest/primitives.hpp"

namespace py = pybind11;
using namespace congest;

namespace {

std::vector<std::vector<double>> rows(const DistanceMatrix& m) {
  std::vector<std::vector<double>> out(static_cast<std::size_t>(m.size()));
  for (NodeId u = 0; u < m.size(); ++u)
    for (NodeId v = 0; v < m.size(); ++v) out[static_cast<std::size_t>(u)].push_back(m(u, v));
  return out;
}

DistanceMatrix matrix(const std::vector<std::vector<double>>& rows) {
  DistanceMatrix m(static_cast<NodeId>(rows.size()));
  for (std::size_t u = 0; u < rows.size(); ++u) {
    if (rows[u].size() != rows.size()) throw PreconditionError("matrix must be square");
    for (std::size_t v = 0; v < rows.size(); ++v) m(static_cast<NodeId>(u), static_cast<NodeId>(v)) = rows[u][v];
  }
  return m;
}

CommunicationMode make_mode(bool unidirectional, bool unicast) {
  CommunicationMode m;
  m.direction = unidirectional ? Direction::kUnidirectional : Direction::kBidirectional;
  m.discipline = unicast ? Discipline::kUnicast : Discipline::kBroadcast;
  return m;
}

py::dict metrics_dict(const RunMetrics& m) {
  py::dict d;
  d["rounds"] = m.rounds;
  d["messages_total"] = m.messages_total;
  d["max_node_congestion"] = m.max_node_sent();
  d["max_edge_load"] = m.max_edge_load();
  return d;
}

}  // namespace

PYBIND11_MODULE(_congest, m) {
  m.doc() = "Distributed APSP simulation in the CONGEST model";

  py::register_exception<NegativeCycleError>(m, "NegativeCycleError");
  py::register_exception<ParseError>(m, "ParseError");
  py::register_exception<PreconditionError>(m, "PreconditionError", PyExc_ValueError);

  py::class_<Edge>(m, "Edge")
      .def(py::init<NodeId, NodeId, Distance>(), py::arg("tail"), py::arg("head"), py::arg("weight"))
      .def_readwrite("tail", &Edge::tail)
      .def_readwrite("head", &Edge::head)
      .def_readwrite("weight", &Edge::weight);

  py::class_<Graph>(m, "Graph")
      .def(py::init([](NodeId n, const std::vector<std::tuple<NodeId, NodeId, Distance>>& edges, bool directed) {
             std::vector<Edge> es;
             for (const auto& [t, h, w] : edges) es.push_back(Edge{t, h, w});
             return Graph(n, directed, std::move(es));
           }),
           py::arg("n"), py::arg("edges"), py::arg("directed") = true)
      .def_property_readonly("n", &Graph::node_count)
      .def_property_readonly("directed", &Graph::directed)
      .def("edges", [](const Graph& g) {
        std::vector<std::tuple<NodeId, NodeId, Distance>> out;
        for (const Edge& e : g.edges()) out.emplace_back(e.tail, e.head, e.weight);
        return out;
      })
      .def("has_negative_weight", &Graph::has_negative_weight);

  m.def("load_graph_text", [](const std::string& text) { return load_graph_text(text); });
  m.def("load_graph_file", &load_graph_file);
  m.def(
      "generate_random_graph",
      [](NodeId n, double p, double wlo, double whi, std::uint64_t seed, bool directed, bool integer_weights) {
        RandomGraphParams rp{n, p, wlo, whi, seed, directed, integer_weights};
        return generate_random_graph(rp);
      },
      py::arg("n"), py::arg("p") = 0.2, py::arg("wlo") = 0.0, py::arg("whi") = 100.0, py::arg("seed") = 0,
      py::arg("directed") = true, py::arg("integer_weights") = true);

  m.def(
      "oracle_apsp",
      [](const Graph& g) -> py::object {
        auto r = oracle::apsp(g);
        if (auto* c = std::get_if<NegativeCycle>(&r)) throw NegativeCycleError(*c);
        return py::cast(rows(std::get<DistanceMatrix>(r)));
      },
      "Floyd-Warshall reference distances");
  m.def("oracle_hop_bounded", [](const Graph& g, int h) { return rows(oracle::hop_bounded(g, h)); });

  m.def(
      "run_apsp",
      [](const Graph& g, std::uint64_t seed, double c, bool unidirectional, bool unicast, const std::string& window) {
        ApspConfig cfg;
        cfg.seed = seed;
        cfg.c = c;
        cfg.mode = make_mode(unidirectional, unicast);
        cfg.window_policy = window == "fixed" ? WindowPolicy::kFixed : WindowPolicy::kQuiescent;
        ApspResult r = run_apsp(g, cfg);
        py::dict d = metrics_dict(r.metrics);
        d["dist"] = rows(r.dist);
        d["rounds_per_phase"] = r.rounds_per_phase;
        d["reweight_rounds"] = r.reweight_rounds;
        return d;
      },
      py::arg("graph"), py::arg("seed") = 0, py::arg("c") = 4.0, py::arg("unidirectional") = false,
      py::arg("unicast") = false, py::arg("window") = "quiescent");

  m.def(
      "las_vegas_verify",
      [](const Graph& g, const std::vector<std::vector<double>>& dist, std::uint64_t seed, bool unidirectional) {
        Verdict v = las_vegas_verify(g, matrix(dist), make_mode(unidirectional, false), seed);
        py::dict d = metrics_dict(v.metrics);
        d["consistent"] = v.consistent;
        d["violators"] = v.violators;
        return d;
      },
      py::arg("graph"), py::arg("dist"), py::arg("seed") = 0, py::arg("unidirectional") = false);

  m.def(
      "distributed_bellman_ford",
      [](const Graph& g, const std::vector<NodeId>& sources, int h, std::uint64_t seed, bool unidirectional) {
        BellmanFordResult r = distributed_bellman_ford(g, sources, h, make_mode(unidirectional, false), seed);
        py::dict d = metrics_dict(r.metrics);
        d["estimate"] = r.estimate;
        return d;
      },
      py::arg("graph"), py::arg("sources"), py::arg("h"), py::arg("seed") = 0, py::arg("unidirectional") = false);

  m.def(
      "filtered_broadcast",
      [](const Graph& g, NodeId source, const std::vector<NodeId>& between, const std::vector<double>& dhat,
         std::uint64_t seed, bool unidirectional) {
        if (dhat.size() != between.size()) throw PreconditionError("one dhat value per between node");
        std::vector<Distance> full(static_cast<std::size_t>(g.node_count()), kInfinity);
        for (std::size_t i = 0; i < between.size(); ++i) full[static_cast<std::size_t>(between[i])] = dhat[i];
        const auto tables = knowledge_from_matrix(oracle::apsp_or_throw(g));
        FilteredBroadcastResult r =
            filtered_broadcast(g, source, between, full, tables, make_mode(unidirectional, false), seed);
        py::dict d = metrics_dict(r.metrics);
        d["output"] = r.output;
        d["best_between"] = r.best_between;
        return d;
      },
      py::arg("graph"), py::arg("source"), py::arg("between"), py::arg("dhat"), py::arg("seed") = 0,
      py::arg("unidirectional") = false);

  m.def(
      "johnson_reweight",
      [](const Graph& g, std::uint64_t seed) -> py::object {
        auto r = johnson_reweight(g, CommunicationMode{}, seed);
        if (auto* c = std::get_if<NegativeCycle>(&r)) throw NegativeCycleError(*c);
        auto& ok = std::get<Reweighting>(r);
        return py::make_tuple(ok.potentials.phi, ok.reweighted);
      },
      py::arg("graph"), py::arg("seed") = 0);

  m.def(
      "sample_levels", [](NodeId n, std::uint64_t seed) { return sample_levels(n, seed).sets; }, py::arg("n"),
      py::arg("seed") = 0);
}
