#include <cmath>
#include <string>

#include "tpp/error.hpp"
#include "tpp/nn.hpp"

namespace tpp {

CrossEntropyResult cross_entropy_loss(const Matrix& logits, std::span<const int> labels) {
  if (static_cast<std::size_t>(logits.rows()) != labels.size()) {
    throw InvalidArgument("cross_entropy_loss: " + std::to_string(labels.size()) + " labels for " +
                          std::to_string(logits.rows()) + " rows");
  }
  CrossEntropyResult out;
  if (logits.rows() == 0) {
    out.grad = Matrix::Zero(0, logits.cols());
    return out;
  }
  const double inv_n = 1.0 / static_cast<double>(logits.rows());
  out.grad = softmax_rows(logits);
  for (Eigen::Index i = 0; i < logits.rows(); ++i) {
    const int y = labels[static_cast<std::size_t>(i)];
    if (y < 0 || y >= logits.cols()) {
      throw InvalidArgument("cross_entropy_loss: label " + std::to_string(y) + " outside [0, " +
                            std::to_string(logits.cols()) + ")");
    }
    // -log softmax via log-sum-exp for stability
    const double top = logits.row(i).maxCoeff();
    const double lse = top + std::log((logits.row(i).array() - top).exp().sum());
    out.loss += (lse - logits(i, y)) * inv_n;
    out.grad(i, y) -= 1.0;
  }
  out.grad *= inv_n;
  return out;
}

namespace {

struct Normalized {
  Matrix unit;
  Vector norms;
};

Normalized normalize_rows(const Matrix& z, const char* which) {
  Normalized out{Matrix(z.rows(), z.cols()), Vector(z.rows())};
  for (Eigen::Index i = 0; i < z.rows(); ++i) {
    const double n = z.row(i).norm();
    if (!(n > 0.0)) {
      throw InvalidArgument(std::string("ntxent_loss: zero-norm row ") + std::to_string(i) + " in " + which);
    }
    out.norms[i] = n;
    out.unit.row(i) = z.row(i) / n;
  }
  return out;
}

// d(loss)/dz for z = u * |z|, given d(loss)/du.
Matrix normalize_backward(const Normalized& nz, const Matrix& d_unit) {
  Matrix out(d_unit.rows(), d_unit.cols());
  for (Eigen::Index i = 0; i < d_unit.rows(); ++i) {
    const double proj = nz.unit.row(i).dot(d_unit.row(i));
    out.row(i) = (d_unit.row(i) - proj * nz.unit.row(i)) / nz.norms[i];
  }
  return out;
}

}  // namespace

NtXentResult ntxent_loss(const Matrix& view1, const Matrix& view2, double temperature) {
  if (view1.rows() != view2.rows() || view1.cols() != view2.cols()) {
    throw InvalidArgument("ntxent_loss: view shapes differ");
  }
  if (view1.rows() < 2) throw InvalidArgument("ntxent_loss: need at least two nodes");
  if (!(temperature > 0.0)) throw InvalidArgument("ntxent_loss: temperature must be > 0");

  const Eigen::Index n = view1.rows();
  const Normalized u = normalize_rows(view1, "view1");
  const Normalized v = normalize_rows(view2, "view2");
  const Matrix s_uv = u.unit * v.unit.transpose() / temperature;
  const Matrix s_uu = u.unit * u.unit.transpose() / temperature;
  const Matrix s_vv = v.unit * v.unit.transpose() / temperature;

  Matrix g_uv = Matrix::Zero(n, n);
  Matrix g_uu = Matrix::Zero(n, n);
  Matrix g_vv = Matrix::Zero(n, n);
  const double c = 1.0 / (2.0 * static_cast<double>(n));
  double loss = 0.0;

  for (Eigen::Index i = 0; i < n; ++i) {
    // Anchor from view1: cross-view row i, same-view row i without the diagonal.
    double top = s_uv.row(i).maxCoeff();
    for (Eigen::Index j = 0; j < n; ++j) {
      if (j != i) top = std::max(top, s_uu(i, j));
    }
    double sum = 0.0;
    for (Eigen::Index j = 0; j < n; ++j) {
      sum += std::exp(s_uv(i, j) - top);
      if (j != i) sum += std::exp(s_uu(i, j) - top);
    }
    double lse = top + std::log(sum);
    loss += c * (lse - s_uv(i, i));
    for (Eigen::Index j = 0; j < n; ++j) {
      g_uv(i, j) += c * std::exp(s_uv(i, j) - lse);
      if (j != i) g_uu(i, j) += c * std::exp(s_uu(i, j) - lse);
    }
    g_uv(i, i) -= c;

    // Anchor from view2: cross-view column i, same-view row i of view2.
    top = s_uv.col(i).maxCoeff();
    for (Eigen::Index j = 0; j < n; ++j) {
      if (j != i) top = std::max(top, s_vv(i, j));
    }
    sum = 0.0;
    for (Eigen::Index j = 0; j < n; ++j) {
      sum += std::exp(s_uv(j, i) - top);
      if (j != i) sum += std::exp(s_vv(i, j) - top);
    }
    lse = top + std::log(sum);
    loss += c * (lse - s_uv(i, i));
    for (Eigen::Index j = 0; j < n; ++j) {
      g_uv(j, i) += c * std::exp(s_uv(j, i) - lse);
      if (j != i) g_vv(i, j) += c * std::exp(s_vv(i, j) - lse);
    }
    g_uv(i, i) -= c;
  }

  const Matrix d_u = (g_uv * v.unit + (g_uu + g_uu.transpose()) * u.unit) / temperature;
  const Matrix d_v = (g_uv.transpose() * u.unit + (g_vv + g_vv.transpose()) * v.unit) / temperature;

  NtXentResult out;
  out.loss = loss;
  out.grad_view1 = normalize_backward(u, d_u);
  out.grad_view2 = normalize_backward(v, d_v);
  return out;
}

}  // namespace tpp
