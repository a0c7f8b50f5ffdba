#pragma once

// Independent dense oracles and helpers shared by the unit and acceptance tests. Nothing here
// calls the sparse kernels it is used to check.

#include <algorithm>
#include <cmath>
#include <functional>
#include <random>
#include <vector>

#include "tpp/dense.hpp"
#include "tpp/graph.hpp"
#include "tpp/rng.hpp"

namespace tpp::testing {

// D^-1/2 (A + I) D^-1/2 assembled from an explicit edge list.
inline Matrix dense_propagation(std::size_t n, const std::vector<Edge>& edges) {
  Matrix a = Matrix::Identity(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  for (const Edge& e : edges) {
    if (e.u == e.v) continue;
    a(e.u, e.v) = 1.0;
    a(e.v, e.u) = 1.0;
  }
  const Vector d = a.rowwise().sum();
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) a(i, j) /= std::sqrt(d[i] * d[j]);
  }
  return a;
}

inline Matrix dense_power(const Matrix& p, int s) {
  Matrix out = Matrix::Identity(p.rows(), p.cols());
  for (int i = 0; i < s; ++i) out = p * out;
  return out;
}

// Prototype from the definition: mean over `nodes` of (P^s X)_i / sqrt(dhat_i).
inline Vector dense_prototype(std::size_t n, const std::vector<Edge>& edges, const Matrix& x,
                              const std::vector<NodeId>& nodes, int s) {
  Matrix a = Matrix::Identity(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  for (const Edge& e : edges) {
    if (e.u == e.v) continue;
    a(e.u, e.v) = 1.0;
    a(e.v, e.u) = 1.0;
  }
  const Vector d = a.rowwise().sum();
  const Matrix z = dense_power(dense_propagation(n, edges), s) * x;
  Vector p = Vector::Zero(x.cols());
  for (NodeId i : nodes) p += z.row(i).transpose() / std::sqrt(d[i]);
  return p / static_cast<double>(nodes.size());
}

inline Matrix random_matrix(Eigen::Index rows, Eigen::Index cols, std::uint64_t seed, double scale = 1.0) {
  Rng rng(seed);
  std::normal_distribution<double> gauss(0.0, scale);
  Matrix m(rows, cols);
  for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = gauss(rng);
  return m;
}

inline std::vector<Edge> random_edges(std::size_t n, double p, std::uint64_t seed) {
  Rng rng(seed);
  std::bernoulli_distribution coin(p);
  std::vector<Edge> edges;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      if (coin(rng)) edges.push_back({static_cast<NodeId>(i), static_cast<NodeId>(j)});
    }
  }
  return edges;
}

inline Graph random_graph(std::size_t n, double p, std::size_t f, std::uint64_t seed, std::vector<int> labels = {}) {
  return Graph::from_edges(n, random_edges(n, p, seed),
                           random_matrix(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(f), seed + 1),
                           std::move(labels));
}

// Largest |analytic - numeric| / max(|analytic|, |numeric|, floor) over `samples` random
// coordinates of `param`, using central differences of `loss`.
inline double gradient_error(Matrix& param, const Matrix& analytic, const std::function<double()>& loss,
                             int samples = 10, std::uint64_t seed = 0, double h = 1e-5, double floor = 1e-6) {
  Rng rng(seed);
  std::uniform_int_distribution<Eigen::Index> pick(0, param.size() - 1);
  double worst = 0.0;
  for (int k = 0; k < samples; ++k) {
    const Eigen::Index idx = pick(rng);
    const double saved = param.data()[idx];
    param.data()[idx] = saved + h;
    const double up = loss();
    param.data()[idx] = saved - h;
    const double down = loss();
    param.data()[idx] = saved;
    const double numeric = (up - down) / (2.0 * h);
    const double a = analytic.data()[idx];
    worst = std::max(worst, std::abs(a - numeric) / std::max({std::abs(a), std::abs(numeric), floor}));
  }
  return worst;
}

}  // namespace tpp::testing
