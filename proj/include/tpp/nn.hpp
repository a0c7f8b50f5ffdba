#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "tpp/dense.hpp"
#include "tpp/graph.hpp"
#include "tpp/rng.hpp"

namespace tpp {

struct TrainConfig {
  double learning_rate = 0.005;
  int epochs = 200;
  double adam_beta1 = 0.9;
  double adam_beta2 = 0.999;
  double adam_eps = 1e-8;
  double temperature = 0.5;
  std::uint64_t rng_seed = 0;

  void validate() const;
};

struct AdamState {
  Matrix m;
  Matrix v;
  std::int64_t step = 0;
};

// One bias-corrected Adam update of `param` in place. Moments are lazily sized on first use.
void adam_step(Matrix& param, const Matrix& grad, AdamState& state, const TrainConfig& cfg);

// Uniform in +-sqrt(6 / (rows + cols)).
Matrix xavier_uniform(std::size_t rows, std::size_t cols, Rng& rng);

// Two propagate-then-transform stages with no nonlinearity:
//   H = P^k (P^k X W1) W2,  P = D^-1/2 (A + I) D^-1/2,  k = steps_per_layer.
// After freeze() the weights are read-only and fingerprinted.
class SgcBackbone {
 public:
  SgcBackbone() = default;
  static SgcBackbone init(std::size_t input_dim, std::size_t hidden_dim, int steps_per_layer, std::uint64_t seed);
  static SgcBackbone from_weights(Matrix w1, Matrix w2, int steps_per_layer);

  std::size_t input_dim() const { return static_cast<std::size_t>(w1_.rows()); }
  std::size_t hidden_dim() const { return static_cast<std::size_t>(w2_.cols()); }
  int steps_per_layer() const { return steps_per_layer_; }

  const Matrix& w1() const { return w1_; }
  const Matrix& w2() const { return w2_; }
  // Throw if frozen.
  Matrix& mutable_w1();
  Matrix& mutable_w2();

  void freeze();
  bool frozen() const { return frozen_; }
  std::uint64_t fingerprint() const;
  // Throws if the weights no longer match the fingerprint taken at freeze time.
  void check_unchanged() const;

  // "TPPBKB1", u64 f, u64 d, u64 steps_per_layer, W1 (f x d), W2 (d x d); f64 little-endian.
  std::string serialize() const;
  // The loaded backbone is frozen.
  static SgcBackbone deserialize(std::string data);
  void save(const std::filesystem::path& path) const;
  static SgcBackbone load(const std::filesystem::path& path);

 private:
  Matrix w1_;
  Matrix w2_;
  int steps_per_layer_ = 1;
  bool frozen_ = false;
  std::uint64_t frozen_hash_ = 0;
};

struct SgcActivations {
  Matrix input_propagated;   // P^k X
  Matrix hidden;             // P^k X W1
  Matrix hidden_propagated;  // P^k P^k X W1
  Matrix output;             // ... W2
};

SgcActivations sgc_forward_tape(const SgcBackbone& backbone, const Graph& g, const Matrix& x);
Matrix sgc_forward(const SgcBackbone& backbone, const Graph& g);
// x_override replaces the graph's features (shape n x f); this is how prompted features enter.
Matrix sgc_forward(const SgcBackbone& backbone, const Graph& g, const Matrix& x_override);

struct SgcGradients {
  Matrix w1;
  Matrix w2;
  Matrix input;
};

// Backward pass of sgc_forward_tape for d(loss)/d(output). Weight and input gradients are
// computed only when requested; the others stay empty.
SgcGradients sgc_backward(const SgcBackbone& backbone, const Graph& g, const SgcActivations& tape,
                          const Matrix& d_output, bool want_weights, bool want_input);

// g(h) = relu(h W1 + b1) W2 + b2. Only used while pretraining.
struct ProjectionHead {
  Matrix w1, b1, w2, b2;  // biases are 1 x d

  static ProjectionHead init(std::size_t dim, std::uint64_t seed);
};

struct ProjectionActivations {
  Matrix pre;     // h W1 + b1
  Matrix hidden;  // relu(pre)
  Matrix output;
};

ProjectionActivations projection_forward(const ProjectionHead& head, const Matrix& h);

struct ProjectionGradients {
  ProjectionHead params;
  Matrix input;
};

ProjectionGradients projection_backward(const ProjectionHead& head, const Matrix& h,
                                        const ProjectionActivations& tape, const Matrix& d_output);

struct CrossEntropyResult {
  double loss = 0.0;
  Matrix grad;  // d(loss)/d(logits) = (softmax - onehot) / rows
};

// Mean softmax cross-entropy over rows. Labels must lie in [0, cols).
CrossEntropyResult cross_entropy_loss(const Matrix& logits, std::span<const int> labels);

struct NtXentResult {
  double loss = 0.0;
  Matrix grad_view1;
  Matrix grad_view2;
};

// Symmetrized NT-Xent with cosine similarity. For anchor u_i of one view the positive is the
// same node in the other view; negatives are every other node in both views. Averaged over
// the 2n anchor terms. Throws on n < 2 or a zero-norm row.
NtXentResult ntxent_loss(const Matrix& view1, const Matrix& view2, double temperature);

struct ContrastiveGradients {
  Matrix w1;
  Matrix w2;
  ProjectionHead head;
};

// NT-Xent of g(f(corrupted)) against g(f(original)). Fills `grads` when non-null.
double contrastive_objective(const SgcBackbone& backbone, const ProjectionHead& head, const Graph& corrupted,
                             const Graph& original, double temperature, ContrastiveGradients* grads);

struct PretrainOptions {
  std::size_t hidden_dim = 64;
  int steps_per_layer = 1;
  // Draw a new corrupted view every epoch; otherwise the view drawn from aug.rng_seed is reused.
  bool fresh_views_per_epoch = true;
};

struct PretrainResult {
  SgcBackbone backbone;              // frozen
  std::vector<double> epoch_losses;  // loss before each epoch's update
};

// Contrastive pretraining on the first task's graph. Weights are initialized from
// cfg.rng_seed; corrupted views derive from aug.rng_seed.
PretrainResult pretrain_backbone(const Graph& g1, const AugmentationParams& aug, const TrainConfig& cfg,
                                 const PretrainOptions& options = {});

}  // namespace tpp
