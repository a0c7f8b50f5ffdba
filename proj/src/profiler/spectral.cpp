#include "tpp/profiler.hpp"

#include <algorithm>
#include <cmath>

#include "tpp/error.hpp"

namespace tpp {

Matrix SpectralOracle::dense_operator(const Graph& g) {
  const auto n = static_cast<Eigen::Index>(g.num_nodes());
  const auto& inv_sqrt = g.degrees().inv_sqrt;
  Matrix p = Matrix::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    p(i, i) = inv_sqrt[i] * inv_sqrt[i];
    for (NodeId j : g.neighbors(static_cast<NodeId>(i))) p(i, j) = inv_sqrt[i] * inv_sqrt[j];
  }
  return p;
}

SpectralOracle SpectralOracle::compute(const Graph& g) {
  if (g.num_nodes() == 0) throw InvalidArgument("SpectralOracle: empty graph");
  const Matrix p = dense_operator(g);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver{Eigen::MatrixXd(p)};
  if (solver.info() != Eigen::Success) throw Error("SpectralOracle: eigendecomposition failed");
  SpectralOracle oracle;
  oracle.eigenvalues_ = solver.eigenvalues();
  oracle.eigenvectors_ = solver.eigenvectors();
  return oracle;
}

double SpectralOracle::gap() const {
  const auto n = eigenvalues_.size();
  if (n < 2) return 1.0;
  return 1.0 - eigenvalues_[n - 2];
}

double SpectralOracle::second_modulus() const {
  const auto n = eigenvalues_.size();
  if (n < 2) return 0.0;
  return std::max(std::abs(eigenvalues_[0]), std::abs(eigenvalues_[n - 2]));
}

}  // namespace tpp
