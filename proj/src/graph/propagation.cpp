#include "tpp/graph.hpp"

#include <string>

#include "tpp/error.hpp"

namespace tpp {

Matrix propagate(const Graph& g, const Matrix& x) {
  const auto n = static_cast<Eigen::Index>(g.num_nodes());
  if (x.rows() != n) {
    throw InvalidArgument("propagate: input has " + std::to_string(x.rows()) + " rows, graph has " +
                          std::to_string(n) + " nodes");
  }
  const auto& inv_sqrt = g.degrees().inv_sqrt;
  // Scale once by D^-1/2 so each row becomes a plain neighbor sum.
  Matrix scaled(x.rows(), x.cols());
  for (Eigen::Index i = 0; i < n; ++i) scaled.row(i) = x.row(i) * inv_sqrt[i];

  Matrix out(x.rows(), x.cols());
  for (Eigen::Index i = 0; i < n; ++i) {
    auto row = out.row(i);
    row = scaled.row(i);
    for (NodeId j : g.neighbors(static_cast<NodeId>(i))) row += scaled.row(j);
    row *= inv_sqrt[i];
  }
  return out;
}

Matrix smooth(const Graph& g, Matrix x, int steps) {
  if (steps < 0) throw InvalidArgument("smoothing steps must be >= 0");
  for (int s = 0; s < steps; ++s) x = propagate(g, x);
  return x;
}

Matrix smooth_features(const Graph& g, int steps) { return smooth(g, g.features(), steps); }

}  // namespace tpp
