#include <string>

#include "tpp/error.hpp"
#include "tpp/prompt.hpp"
#include "tpp/rng.hpp"

namespace tpp {

GraphPrompt GraphPrompt::init(std::size_t k, std::size_t f, std::uint64_t seed, double sigma) {
  if (k == 0) throw InvalidArgument("GraphPrompt: need at least one token");
  Rng rng(seed);
  std::normal_distribution<double> normal(0.0, sigma);
  GraphPrompt p;
  p.tokens.resize(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(f));
  p.projections.resize(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(f));
  for (Eigen::Index i = 0; i < p.tokens.size(); ++i) p.tokens.data()[i] = normal(rng);
  for (Eigen::Index i = 0; i < p.projections.size(); ++i) p.projections.data()[i] = normal(rng);
  return p;
}

Matrix apply_prompt(const GraphPrompt& prompt, const Matrix& x, Matrix* weights_out) {
  if (static_cast<std::size_t>(x.cols()) != prompt.dim()) {
    throw InvalidArgument("apply_prompt: features have width " + std::to_string(x.cols()) + ", prompt has " +
                          std::to_string(prompt.dim()));
  }
  Matrix weights = softmax_rows(x * prompt.projections.transpose());
  Matrix out = x + weights * prompt.tokens;
  if (weights_out != nullptr) *weights_out = std::move(weights);
  return out;
}

Vector apply_prompt(const GraphPrompt& prompt, const Vector& x) {
  const Matrix row = x.transpose();
  return apply_prompt(prompt, row).row(0).transpose();
}

PromptGradients prompt_backward(const GraphPrompt& prompt, const Matrix& x, const Matrix& weights,
                                const Matrix& d_prompted) {
  PromptGradients g;
  g.tokens = weights.transpose() * d_prompted;
  const Matrix d_weights = d_prompted * prompt.tokens.transpose();
  // softmax backward: alpha * (d_alpha - <d_alpha, alpha>)
  Matrix d_scores(weights.rows(), weights.cols());
  for (Eigen::Index i = 0; i < weights.rows(); ++i) {
    const double inner = weights.row(i).dot(d_weights.row(i));
    d_scores.row(i) = weights.row(i).cwiseProduct((d_weights.row(i).array() - inner).matrix());
  }
  g.projections = d_scores.transpose() * x;
  return g;
}

}  // namespace tpp
