#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <string_view>
#include <vector>

namespace tpp {

// Row-major 64-bit dense matrix used by every numeric kernel.
using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Vector = Eigen::VectorXd;

// Throws InvalidArgument naming `what` if any entry is NaN or infinite.
void require_finite(const Matrix& m, std::string_view what);

// Gathers the listed rows of `m` into a new matrix.
template <typename Index>
Matrix gather_rows(const Matrix& m, const std::vector<Index>& rows) {
  Matrix out(static_cast<Eigen::Index>(rows.size()), m.cols());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    out.row(static_cast<Eigen::Index>(i)) = m.row(static_cast<Eigen::Index>(rows[i]));
  }
  return out;
}

// Row-wise softmax, max-shifted.
Matrix softmax_rows(const Matrix& logits);

}  // namespace tpp
