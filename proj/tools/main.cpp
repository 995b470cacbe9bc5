// congest: command-line front end for the distributed APSP simulator.

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "congest/apsp.hpp"
#include "congest/filtered_broadcast.hpp"
#include "congest/graph.hpp"
#include "congest/oracle.hpp"
#include "congest/random.hpp"

using namespace congest;
using json = nlohmann::ordered_json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitError = 1;
constexpr int kExitNegativeCycle = 2;

struct UsageError : Error {
  using Error::Error;
};

struct Common {
  std::string graph_path;
  std::string gen;
  std::uint64_t seed = 1;
  double c = 4.0;
  bool unidirectional = false;
  bool unicast = false;
  std::string window = "quiescent";
  std::string matrix_out;
  std::string metrics_out;
  std::string transcript_out;

  CommunicationMode mode() const {
    CommunicationMode m;
    m.direction = unidirectional ? Direction::kUnidirectional : Direction::kBidirectional;
    m.discipline = unicast ? Discipline::kUnicast : Discipline::kBroadcast;
    return m;
  }
};

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream in(s);
  while (std::getline(in, item, sep))
    if (!item.empty()) out.push_back(item);
  return out;
}

double parse_number(const std::string& key, const std::string& text) {
  try {
    std::size_t used = 0;
    const double v = std::stod(text, &used);
    if (used != text.size()) throw std::invalid_argument(text);
    return v;
  } catch (const std::exception&) {
    throw UsageError("bad value for " + key + ": '" + text + "'");
  }
}

Distance parse_distance(const std::string& text) {
  if (text == "inf" || text == "+inf") return kInfinity;
  return parse_number("distance", text);
}

/// n=..,p=..,wlo=..,whi=..[,directed=0|1][,int=0|1]
RandomGraphParams parse_gen(const std::string& spec, std::uint64_t seed) {
  RandomGraphParams p;
  p.edge_probability = 0.2;
  p.weight_low = 0;
  p.weight_high = 100;
  p.integer_weights = true;
  p.seed = seed;
  bool have_n = false;
  for (const std::string& kv : split(spec, ',')) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) throw UsageError("generator option without '=': " + kv);
    const std::string key = kv.substr(0, eq);
    const double v = parse_number(key, kv.substr(eq + 1));
    if (key == "n") {
      if (v < 1 || v != std::floor(v)) throw UsageError("n must be a positive integer");
      p.n = static_cast<NodeId>(v);
      have_n = true;
    } else if (key == "p") {
      p.edge_probability = v;
    } else if (key == "wlo") {
      p.weight_low = v;
    } else if (key == "whi") {
      p.weight_high = v;
    } else if (key == "directed") {
      p.directed = v != 0;
    } else if (key == "int") {
      p.integer_weights = v != 0;
    } else {
      throw UsageError("unknown generator option: " + key);
    }
  }
  if (!have_n) throw UsageError("generator needs n=");
  return p;
}

Graph load_input(const Common& c) {
  if (!c.graph_path.empty() && !c.gen.empty()) throw UsageError("--graph and --gen are mutually exclusive");
  if (!c.graph_path.empty()) return load_graph_file(c.graph_path);
  if (!c.gen.empty()) return generate_random_graph(parse_gen(c.gen, c.seed));
  throw UsageError("one of --graph or --gen is required");
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream f(path);
  if (!f) throw Error("cannot write " + path);
  f << text;
}

void write_matrix_file(const std::string& path, const DistanceMatrix& m) {
  std::ofstream f(path);
  if (!f) throw Error("cannot write " + path);
  write_matrix_csv(f, m);
}

void write_transcript_file(const std::string& path, const Transcript& t) {
  std::ofstream f(path);
  if (!f) throw Error("cannot write " + path);
  t.write_csv(f);
}

json distance_json(Distance d) {
  if (!is_finite(d)) return "inf";
  return d;
}

void print_cycle(const NegativeCycle& cyc) {
  std::cout << "negative cycle:";
  for (NodeId v : cyc.cycle) std::cout << ' ' << v;
  std::cout << " weight " << format_distance(cyc.weight) << '\n';
}

int cmd_run(const Common& c) {
  const Graph g = load_input(c);
  Transcript transcript;
  ApspConfig cfg;
  cfg.c = c.c;
  cfg.mode = c.mode();
  cfg.seed = c.seed;
  cfg.window_policy = c.window == "fixed" ? WindowPolicy::kFixed : WindowPolicy::kQuiescent;
  if (!c.transcript_out.empty()) cfg.transcript = &transcript;
  ApspResult r;
  try {
    r = run_apsp(g, cfg);
  } catch (const NegativeCycleError& e) {
    print_cycle(e.cycle());
    return kExitNegativeCycle;
  }
  const Verdict verdict = las_vegas_verify(g, r.dist, cfg.mode, c.seed);

  json out;
  out["n"] = g.node_count();
  out["seed"] = c.seed;
  out["mode"] = to_string(cfg.mode);
  out["c"] = c.c;
  out["rounds_total"] = r.metrics.rounds;
  out["rounds_per_phase"] = r.rounds_per_phase;
  out["max_node_congestion"] = r.metrics.max_node_sent();
  out["verified"] = verdict.consistent;
  const std::string text = out.dump(2) + "\n";
  std::cout << text;
  if (!c.metrics_out.empty()) write_text(c.metrics_out, text);
  if (!c.matrix_out.empty()) write_matrix_file(c.matrix_out, r.dist);
  if (!c.transcript_out.empty()) write_transcript_file(c.transcript_out, transcript);
  return verdict.consistent ? kExitOk : kExitError;
}

int cmd_bench(const Common& c, const std::string& n_list, int trials) {
  std::vector<NodeId> ns;
  for (const std::string& s : split(n_list, ',')) {
    const double v = parse_number("--n-list", s);
    if (v < 1 || v != std::floor(v)) throw UsageError("--n-list entries must be positive integers");
    ns.push_back(static_cast<NodeId>(v));
  }
  if (ns.empty()) throw UsageError("--n-list must name at least one n");
  if (trials < 1) throw UsageError("--trials must be positive");
  if (!c.graph_path.empty()) throw UsageError("bench generates its own graphs; use --gen for parameters");

  std::ostringstream csv;
  csv << "n,seed,rounds,max_node_congestion,normalized_rounds\n";
  std::cout << csv.str();
  for (NodeId n : ns) {
    for (int t = 0; t < trials; ++t) {
      const std::uint64_t trial_seed =
          derive_key(c.seed, StreamPurpose::kTrialSeed, {static_cast<std::uint64_t>(n), static_cast<std::uint64_t>(t)});
      RandomGraphParams gp = parse_gen(c.gen.empty() ? "n=1" : c.gen + ",n=1", trial_seed);
      gp.n = n;
      const Graph g = generate_random_graph(gp);
      ApspConfig cfg;
      cfg.c = c.c;
      cfg.mode = c.mode();
      cfg.seed = trial_seed;
      cfg.window_policy = c.window == "fixed" ? WindowPolicy::kFixed : WindowPolicy::kQuiescent;
      ApspResult r;
      try {
        r = run_apsp(g, cfg);
      } catch (const NegativeCycleError& e) {
        print_cycle(e.cycle());
        return kExitNegativeCycle;
      }
      const double ln = std::log(static_cast<double>(n));
      const double norm = n > 1 ? static_cast<double>(r.metrics.rounds) / (n * std::pow(ln, 4)) : 0.0;
      char line[256];
      std::snprintf(line, sizeof line, "%d,%llu,%lld,%llu,%.6g\n", n, static_cast<unsigned long long>(trial_seed),
                    static_cast<long long>(r.metrics.rounds),
                    static_cast<unsigned long long>(r.metrics.max_node_sent()), norm);
      csv << line;
      std::cout << line << std::flush;
    }
  }
  if (!c.metrics_out.empty()) write_text(c.metrics_out, csv.str());
  return kExitOk;
}

int cmd_verify(const Common& c, const std::string& matrix_path) {
  const Graph g = load_input(c);
  std::ifstream f(matrix_path);
  if (!f) throw Error("cannot read " + matrix_path);
  const DistanceMatrix dump = read_matrix_csv(f);
  if (dump.size() != g.node_count())
    throw Error("dimension mismatch: matrix is " + std::to_string(dump.size()) + "x" + std::to_string(dump.size()) +
                " but the graph has " + std::to_string(g.node_count()) + " nodes");
  auto truth = oracle::apsp(g);
  if (auto* cyc = std::get_if<NegativeCycle>(&truth)) {
    print_cycle(*cyc);
    return kExitNegativeCycle;
  }
  const DistanceMatrix& dist = std::get<DistanceMatrix>(truth);
  std::size_t mismatches = 0;
  for (NodeId u = 0; u < g.node_count(); ++u) {
    for (NodeId v = 0; v < g.node_count(); ++v) {
      if (dump(u, v) == dist(u, v)) continue;
      if (mismatches < 10)
        std::cout << "mismatch (" << u << "," << v << "): dump " << format_distance(dump(u, v)) << " oracle "
                  << format_distance(dist(u, v)) << '\n';
      ++mismatches;
    }
  }
  const Verdict verdict = las_vegas_verify(g, dump, c.mode(), c.seed);
  std::cout << "oracle: " << (mismatches == 0 ? "match" : std::to_string(mismatches) + " mismatches") << '\n';
  std::cout << "distributed check: " << (verdict.consistent ? "CONSISTENT" : "VIOLATION");
  if (!verdict.consistent) {
    std::cout << " at";
    for (NodeId v : verdict.violators) std::cout << ' ' << v;
  }
  std::cout << " (" << verdict.metrics.rounds << " rounds)\n";
  return mismatches == 0 && verdict.consistent ? kExitOk : kExitError;
}

int cmd_fb(const Common& c, NodeId source, const std::string& between_list, const std::string& dhat_list,
           Round window) {
  const Graph g = load_input(c);
  const NodeId n = g.node_count();
  std::vector<NodeId> between;
  for (const std::string& s : split(between_list, ',')) {
    const double v = parse_number("--between", s);
    if (v < 0 || v >= n || v != std::floor(v)) throw UsageError("between node out of range: " + s);
    between.push_back(static_cast<NodeId>(v));
  }
  const std::vector<std::string> dhat_items = split(dhat_list, ',');
  if (dhat_items.size() != between.size()) throw UsageError("--dhat needs one value per between node");
  if (g.has_negative_weight()) throw UsageError("filtered broadcast needs non-negative weights");
  std::vector<Distance> dhat(static_cast<std::size_t>(n), kInfinity);
  for (std::size_t i = 0; i < between.size(); ++i) dhat[static_cast<std::size_t>(between[i])] = parse_distance(dhat_items[i]);

  const DistanceMatrix dist = oracle::apsp_or_throw(g);
  const auto tables = knowledge_from_matrix(dist);
  Transcript transcript;
  FilteredBroadcastOptions opt;
  opt.policy = c.window == "quiescent" ? IterationPolicy::kQuiescent : IterationPolicy::kFixed;
  opt.window = window;
  if (!c.transcript_out.empty()) opt.transcript = &transcript;
  const FilteredBroadcastResult r = filtered_broadcast(g, source, between, dhat, tables, c.mode(), c.seed, opt);

  json out;
  out["n"] = n;
  out["seed"] = c.seed;
  out["mode"] = to_string(c.mode());
  out["source"] = source;
  json outputs = json::array();
  for (Distance d : r.output) outputs.push_back(distance_json(d));
  out["output"] = outputs;
  out["best_between"] = r.best_between;
  out["rounds"] = r.metrics.rounds;
  out["messages_total"] = r.metrics.messages_total;
  out["max_node_congestion"] = r.metrics.max_node_sent();
  std::uint32_t max_iter = 0;
  for (const auto& e : r.emissions)
    for (std::uint32_t x : e) max_iter = std::max(max_iter, x);
  out["max_iteration_emissions"] = max_iter;
  const std::string text = out.dump(2) + "\n";
  std::cout << text;
  if (!c.metrics_out.empty()) write_text(c.metrics_out, text);
  if (!c.transcript_out.empty()) write_transcript_file(c.transcript_out, transcript);
  return kExitOk;
}

int cmd_gen(const Common& c, const std::string& out_path) {
  if (c.gen.empty()) throw UsageError("gen needs --gen");
  const Graph g = generate_random_graph(parse_gen(c.gen, c.seed));
  if (out_path.empty()) {
    write_graph(std::cout, g);
  } else {
    std::ofstream f(out_path);
    if (!f) throw Error("cannot write " + out_path);
    write_graph(f, g);
  }
  return kExitOk;
}

void add_graph_options(CLI::App* app, Common& c) {
  auto* graph = app->add_option("--graph", c.graph_path, "Graph file in edge-list format");
  auto* gen = app->add_option("--gen", c.gen, "Random graph: n=..,p=..,wlo=..,whi=..[,directed=0|1][,int=0|1]");
  graph->excludes(gen);
}

void add_mode_options(CLI::App* app, Common& c) {
  app->add_option("--seed", c.seed, "Root seed");
  app->add_flag("--unidirectional", c.unidirectional, "Messages travel along edge direction only");
  app->add_flag("--unicast", c.unicast, "Per-link messages instead of one broadcast per round");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Distributed all-pairs shortest paths in the CONGEST model"};
  app.require_subcommand(1);
  Common c;

  auto* run = app.add_subcommand("run", "Run distributed APSP and print JSON metrics");
  add_graph_options(run, c);
  add_mode_options(run, c);
  run->add_option("--c", c.c, "Sampling constant");
  run->add_option("--window", c.window, "Iteration policy for filtered broadcasts")
      ->check(CLI::IsMember({"quiescent", "fixed"}));
  run->add_option("--matrix-out", c.matrix_out, "Write the distance matrix as CSV");
  run->add_option("--metrics-out", c.metrics_out, "Write the JSON metrics to a file");
  run->add_option("--transcript-out", c.transcript_out, "Write every delivered message as CSV");

  std::string n_list;
  int trials = 1;
  auto* bench = app.add_subcommand("bench", "Measure rounds across graph sizes");
  bench->add_option("--gen", c.gen, "Generator parameters other than n, e.g. p=0.2,wlo=0,whi=100");
  bench->add_option("--graph", c.graph_path)->group("");
  add_mode_options(bench, c);
  bench->add_option("--c", c.c, "Sampling constant");
  bench->add_option("--window", c.window)->check(CLI::IsMember({"quiescent", "fixed"}));
  bench->add_option("--n-list", n_list, "Comma-separated graph sizes")->required();
  bench->add_option("--trials", trials, "Trials per size");
  bench->add_option("--metrics-out", c.metrics_out, "Write the CSV to a file");

  std::string matrix_in;
  auto* verify = app.add_subcommand("verify", "Check a matrix dump against the oracle and the distributed check");
  add_graph_options(verify, c);
  add_mode_options(verify, c);
  verify->add_option("--matrix", matrix_in, "Matrix CSV from a previous run")->required();

  NodeId source = 0;
  std::string between_list;
  std::string dhat_list;
  Round window = 0;
  auto* fb = app.add_subcommand("fb", "Run one filtered broadcast with exact distance knowledge");
  add_graph_options(fb, c);
  add_mode_options(fb, c);
  fb->add_option("--source", source, "Source label s")->required();
  fb->add_option("--between", between_list, "Comma-separated between nodes")->required();
  fb->add_option("--dhat", dhat_list, "Comma-separated estimates, one per between node ('inf' allowed)")->required();
  fb->add_option("--window-rounds", window, "Rounds per iteration (0 = n)");
  std::string fb_window = "fixed";
  fb->add_option("--window", fb_window, "Iteration policy")->check(CLI::IsMember({"quiescent", "fixed"}));
  fb->add_option("--metrics-out", c.metrics_out, "Write the JSON to a file");
  fb->add_option("--transcript-out", c.transcript_out, "Write every delivered message as CSV");

  std::string out_path;
  auto* gen = app.add_subcommand("gen", "Write a random graph in edge-list format");
  gen->add_option("--gen", c.gen, "Generator parameters")->required();
  gen->add_option("--seed", c.seed, "Seed");
  gen->add_option("--out", out_path, "Output path (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kExitOk : kExitError;
  }

  try {
    if (*run) return cmd_run(c);
    if (*bench) return cmd_bench(c, n_list, trials);
    if (*verify) return cmd_verify(c, matrix_in);
    if (*fb) {
      c.window = fb_window;
      return cmd_fb(c, source, between_list, dhat_list, window);
    }
    if (*gen) return cmd_gen(c, out_path);
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return kExitError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitError;
  }
  return kExitError;
}
