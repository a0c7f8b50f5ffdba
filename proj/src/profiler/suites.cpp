#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <random>

#include "tpp/error.hpp"
#include "tpp/profiler.hpp"
#include "tpp/rng.hpp"
#include "tpp/verify.hpp"

namespace tpp {

namespace {

std::string format(const char* fmt, double a, double b = 0.0) {
  char buf[160];
  std::snprintf(buf, sizeof buf, fmt, a, b);
  return buf;
}

Graph erdos_renyi(std::size_t n, double p, std::size_t f, Rng& rng) {
  std::bernoulli_distribution coin(p);
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::vector<Edge> edges;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      if (coin(rng)) edges.push_back({static_cast<NodeId>(i), static_cast<NodeId>(j)});
    }
  }
  Matrix x(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(f));
  for (Eigen::Index i = 0; i < x.size(); ++i) x.data()[i] = gauss(rng);
  return Graph::from_edges(n, edges, x);
}

}  // namespace

Graph random_mixing_graph(std::size_t n, double p, std::size_t f, std::uint64_t seed, double min_gap) {
  if (n < 2) throw InvalidArgument("random_mixing_graph: need at least two nodes");
  Rng rng(seed);
  for (int attempt = 0; attempt < 1000; ++attempt) {
    Graph g = erdos_renyi(n, p, f, rng);
    if (!is_connected(g)) continue;
    const SpectralOracle oracle = SpectralOracle::compute(g);
    if (oracle.gap() >= min_gap && 1.0 - oracle.second_modulus() >= min_gap) return g;
  }
  throw InvalidArgument("random_mixing_graph: no qualifying graph in 1000 draws; raise the edge probability");
}

std::vector<CheckResult> run_theorem_suites(const SuiteOptions& options) {
  std::vector<CheckResult> out;
  Rng rng(options.seed);
  std::uniform_int_distribution<std::size_t> size(options.min_nodes, options.max_nodes);
  const int steps[] = {1, 200};

  std::size_t t1_pass = 0;
  std::size_t limit_pass = 0;
  double worst_ratio = 0.0;
  double worst_limit = 0.0;
  std::vector<Graph> family;
  for (std::size_t k = 0; k < options.graphs; ++k) {
    const std::size_t n = size(rng);
    Graph g = random_mixing_graph(n, options.edge_prob, options.feature_dim, derive_seed(options.seed, k),
                                  options.min_gap);
    std::vector<NodeId> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::shuffle(order.begin(), order.end(), rng);
    const std::span<const NodeId> a(order.data(), n / 2);
    const std::span<const NodeId> b(order.data() + n / 2, n - n / 2);
    Theorem1Config cfg;
    cfg.gap_threshold = options.min_gap;
    const Theorem1Report r = verify_theorem1(g, a, b, steps, cfg);
    if (r.passed && r.gap_qualifies) ++t1_pass;
    if (r.distances[0] > 0.0) worst_ratio = std::max(worst_ratio, r.distances[1] / r.distances[0]);

    std::vector<NodeId> all(n);
    std::iota(all.begin(), all.end(), 0);
    const Vector limit = limit_prototype(g);
    const Vector p = build_prototype(g, all, 400, 1).vector;
    const double rel = (p - limit).norm() / std::max(limit.norm(), 1e-300);
    worst_limit = std::max(worst_limit, rel);
    if (rel <= 1e-6) ++limit_pass;
    family.push_back(std::move(g));
  }
  out.push_back({"prototype convergence", t1_pass == options.graphs,
                 std::to_string(t1_pass) + "/" + std::to_string(options.graphs) + " graphs" +
                     format(", worst d(200)/d(1) = %.3g", worst_ratio)});
  out.push_back({"limit prototype", limit_pass == options.graphs,
                 std::to_string(limit_pass) + "/" + std::to_string(options.graphs) + " graphs" +
                     format(", worst relative error = %.3g", worst_limit)});

  if (!family.empty()) {
    const Graph& g = family.front();
    const Theorem2Report self = theorem2_gap_diagnostic(g, g, identity_alignment(g, g));
    out.push_back({"gap diagnostic, identical tasks",
                   self.predicted_gap == 0.0 && self.measured_gap == 0.0 && self.difference.degree_gap_norm == 0.0,
                   format("predicted %.3g, measured %.3g", self.predicted_gap, self.measured_gap)});

    // Shifting features by c and by 2c at fixed structure must double the formula value.
    const std::vector<Edge> edges = g.edge_list();
    const Matrix x = g.features();
    const Graph shifted = Graph::from_edges(g.num_nodes(), edges, Matrix(x.array() + 0.5));
    const Graph shifted2 = Graph::from_edges(g.num_nodes(), edges, Matrix(x.array() + 1.0));
    const Theorem2Report r1 = theorem2_gap_diagnostic(g, shifted, identity_alignment(g, shifted));
    const Theorem2Report r2 = theorem2_gap_diagnostic(g, shifted2, identity_alignment(g, shifted2));
    const double ratio = r1.predicted_gap > 0.0 ? r2.predicted_gap / r1.predicted_gap : 0.0;
    out.push_back({"gap diagnostic, attribute scaling", std::abs(ratio - 2.0) <= 1e-4 && r1.difference.degree_gap_norm == 0.0,
                   format("formula ratio %.6f, measured gap %.3g", ratio, r1.measured_gap)});
  }
  return out;
}

}  // namespace tpp
