#include <cmath>
#include <string>

#include "tpp/error.hpp"
#include "tpp/nn.hpp"

namespace tpp {

void TrainConfig::validate() const {
  if (!(learning_rate > 0.0)) throw InvalidArgument("learning_rate must be > 0");
  if (!(temperature > 0.0)) throw InvalidArgument("temperature must be > 0");
  if (epochs < 0) throw InvalidArgument("epochs must be >= 0");
  if (!(adam_beta1 >= 0.0 && adam_beta1 < 1.0) || !(adam_beta2 >= 0.0 && adam_beta2 < 1.0)) {
    throw InvalidArgument("adam betas must lie in [0, 1)");
  }
  if (!(adam_eps > 0.0)) throw InvalidArgument("adam_eps must be > 0");
}

void adam_step(Matrix& param, const Matrix& grad, AdamState& state, const TrainConfig& cfg) {
  if (param.rows() != grad.rows() || param.cols() != grad.cols()) {
    throw InvalidArgument("adam_step: gradient shape " + std::to_string(grad.rows()) + "x" +
                          std::to_string(grad.cols()) + " does not match parameter " +
                          std::to_string(param.rows()) + "x" + std::to_string(param.cols()));
  }
  if (state.step == 0) {
    state.m = Matrix::Zero(param.rows(), param.cols());
    state.v = Matrix::Zero(param.rows(), param.cols());
  }
  ++state.step;
  const double b1 = cfg.adam_beta1;
  const double b2 = cfg.adam_beta2;
  state.m = b1 * state.m + (1.0 - b1) * grad;
  state.v = b2 * state.v + (1.0 - b2) * grad.cwiseProduct(grad);
  const double c1 = 1.0 - std::pow(b1, static_cast<double>(state.step));
  const double c2 = 1.0 - std::pow(b2, static_cast<double>(state.step));
  const double lr = cfg.learning_rate;
  const double eps = cfg.adam_eps;
  for (Eigen::Index i = 0; i < param.size(); ++i) {
    const double m_hat = state.m.data()[i] / c1;
    const double v_hat = state.v.data()[i] / c2;
    param.data()[i] -= lr * m_hat / (std::sqrt(v_hat) + eps);
  }
}

Matrix xavier_uniform(std::size_t rows, std::size_t cols, Rng& rng) {
  const double bound = std::sqrt(6.0 / static_cast<double>(rows + cols));
  std::uniform_real_distribution<double> u(-bound, bound);
  Matrix m(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
  for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = u(rng);
  return m;
}

}  // namespace tpp
