#include <algorithm>
#include <cmath>
#include <iostream>
#include <numeric>
#include <string>

#include "tpp/error.hpp"
#include "tpp/profiler.hpp"

namespace tpp {

namespace {

Vector corrected_mean(const Matrix& z, const std::vector<double>& inv_sqrt, std::span<const NodeId> nodes) {
  Vector p = Vector::Zero(z.cols());
  for (NodeId i : nodes) p += z.row(i).transpose() * inv_sqrt[i];
  return p / static_cast<double>(nodes.size());
}

std::vector<NodeId> all_nodes(const Graph& g) {
  std::vector<NodeId> out(g.num_nodes());
  std::iota(out.begin(), out.end(), 0);
  return out;
}

double feature_mean(const Graph& g, NodeId i) {
  double s = 0.0;
  for (std::size_t j = 0; j < g.num_features(); ++j) s += g.feature(i, j);
  return g.num_features() ? s / static_cast<double>(g.num_features()) : 0.0;
}

std::vector<NodeId> sorted_nodes(const Graph& g) {
  std::vector<NodeId> order = all_nodes(g);
  std::vector<double> means(g.num_nodes());
  for (std::size_t i = 0; i < g.num_nodes(); ++i) means[i] = feature_mean(g, static_cast<NodeId>(i));
  std::stable_sort(order.begin(), order.end(), [&](NodeId a, NodeId b) {
    if (g.degree(a) != g.degree(b)) return g.degree(a) < g.degree(b);
    return means[a] < means[b];
  });
  return order;
}

}  // namespace

Theorem1Report verify_theorem1(const Graph& g, std::span<const NodeId> split_a, std::span<const NodeId> split_b,
                               std::span<const int> steps, const Theorem1Config& config) {
  if (split_a.empty() || split_b.empty()) throw InvalidArgument("verify_theorem1: empty split");
  if (steps.empty()) throw InvalidArgument("verify_theorem1: no step counts");
  if (!is_connected(g)) throw InvalidArgument("verify_theorem1: graph is disconnected");
  for (auto split : {split_a, split_b}) {
    for (NodeId v : split) {
      if (v < 0 || static_cast<std::size_t>(v) >= g.num_nodes()) {
        throw InvalidArgument("verify_theorem1: node " + std::to_string(v) + " out of range");
      }
    }
  }

  Theorem1Report report;
  const SpectralOracle oracle = SpectralOracle::compute(g);
  report.gap = oracle.gap();
  report.second_modulus = oracle.second_modulus();
  report.gap_qualifies = report.gap >= config.gap_threshold;

  // Smooth incrementally through the requested step counts in ascending order.
  std::vector<std::size_t> order(steps.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return steps[a] < steps[b]; });
  report.steps.assign(steps.begin(), steps.end());
  report.distances.assign(steps.size(), 0.0);
  Matrix z = g.features();
  int done = 0;
  for (std::size_t idx : order) {
    if (steps[idx] < 0) throw InvalidArgument("verify_theorem1: negative step count");
    z = smooth(g, std::move(z), steps[idx] - done);
    done = steps[idx];
    const Vector pa = corrected_mean(z, g.degrees().inv_sqrt, split_a);
    const Vector pb = corrected_mean(z, g.degrees().inv_sqrt, split_b);
    report.distances[idx] = (pa - pb).norm();
  }

  const std::size_t lo = order.front();
  const std::size_t hi = order.back();
  const double d_lo = report.distances[lo];
  const double d_hi = report.distances[hi];
  report.passed = !report.gap_qualifies || (d_hi <= config.ratio * d_lo && d_hi <= config.absolute_floor);
  return report;
}

NodeAlignment identity_alignment(const Graph& g_t, const Graph& g_j) {
  if (g_t.num_nodes() != g_j.num_nodes()) {
    throw InvalidArgument("identity_alignment: node counts differ (" + std::to_string(g_t.num_nodes()) + " vs " +
                          std::to_string(g_j.num_nodes()) + ")");
  }
  NodeAlignment a;
  for (std::size_t i = 0; i < g_t.num_nodes(); ++i) a.pairs.emplace_back(static_cast<NodeId>(i), static_cast<NodeId>(i));
  return a;
}

NodeAlignment sorted_alignment(const Graph& g_t, const Graph& g_j) {
  const auto ot = sorted_nodes(g_t);
  const auto oj = sorted_nodes(g_j);
  NodeAlignment a;
  const std::size_t m = std::min(ot.size(), oj.size());
  a.truncated = ot.size() != oj.size();
  if (a.truncated) {
    std::clog << "warning: sorted_alignment truncates " << ot.size() << " vs " << oj.size() << " nodes to " << m
              << '\n';
  }
  for (std::size_t i = 0; i < m; ++i) a.pairs.emplace_back(ot[i], oj[i]);
  return a;
}

Theorem2Report theorem2_gap_diagnostic(const Graph& g_t, const Graph& g_j, const NodeAlignment& alignment,
                                       int measure_steps) {
  if (g_t.num_features() != g_j.num_features()) {
    throw InvalidArgument("theorem2_gap_diagnostic: feature widths differ");
  }
  if (alignment.pairs.empty()) throw InvalidArgument("theorem2_gap_diagnostic: empty alignment");
  const auto f = static_cast<Eigen::Index>(g_t.num_features());

  Theorem2Report report;
  report.aligned_nodes = alignment.pairs.size();
  report.truncated = alignment.truncated;

  Vector formula = Vector::Zero(f);
  double e_sq = 0.0;
  double eps_sq = 0.0;
  for (const auto& [a, b] : alignment.pairs) {
    if (a < 0 || b < 0 || static_cast<std::size_t>(a) >= g_t.num_nodes() ||
        static_cast<std::size_t>(b) >= g_j.num_nodes()) {
      throw InvalidArgument("theorem2_gap_diagnostic: alignment pair out of range");
    }
    const double root_t = std::sqrt(g_t.degrees().dhat[a]);
    const double e = std::sqrt(g_j.degrees().dhat[b]) - root_t;
    e_sq += e * e;
    for (Eigen::Index k = 0; k < f; ++k) {
      const double xj = g_j.feature(b, static_cast<std::size_t>(k));
      const double eps = xj - g_t.feature(a, static_cast<std::size_t>(k));
      eps_sq += eps * eps;
      formula[k] += root_t * eps + e * xj;
    }
  }
  report.difference.degree_gap_norm = std::sqrt(e_sq);
  report.difference.attribute_gap_norm = std::sqrt(eps_sq);
  report.predicted_gap = formula.norm();

  const auto nodes_t = all_nodes(g_t);
  const auto nodes_j = all_nodes(g_j);
  const Vector pt = build_prototype(g_t, nodes_t, measure_steps, 1).vector;
  const Vector pj = build_prototype(g_j, nodes_j, measure_steps, 2).vector;
  report.measured_gap = (pt - pj).norm();
  return report;
}

}  // namespace tpp
