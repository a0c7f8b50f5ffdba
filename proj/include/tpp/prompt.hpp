#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "tpp/dense.hpp"
#include "tpp/graph.hpp"
#include "tpp/nn.hpp"

namespace tpp {

inline constexpr std::size_t kDefaultPromptTokens = 3;

// k learnable feature-space tokens (rows of `tokens`) and one projection vector per token
// (rows of `projections`). Both are k x f.
struct GraphPrompt {
  Matrix tokens;
  Matrix projections;

  std::size_t size() const { return static_cast<std::size_t>(tokens.rows()); }
  std::size_t dim() const { return static_cast<std::size_t>(tokens.cols()); }

  // Entries drawn from N(0, sigma^2).
  static GraphPrompt init(std::size_t k, std::size_t f, std::uint64_t seed, double sigma = 0.01);
};

// x + sum_j alpha_j phi_j with alpha = softmax_j(w_j . x).
Vector apply_prompt(const GraphPrompt& prompt, const Vector& x);
// Row-wise over an n x f matrix. `weights_out`, when given, receives the n x k alphas.
Matrix apply_prompt(const GraphPrompt& prompt, const Matrix& x, Matrix* weights_out = nullptr);

struct PromptGradients {
  Matrix tokens;
  Matrix projections;
};

// Backward of the batched apply_prompt given the alphas it produced.
PromptGradients prompt_backward(const GraphPrompt& prompt, const Matrix& x, const Matrix& weights,
                                const Matrix& d_prompted);

// Single affine layer d -> C. Local class c maps to global class class_offset + c.
struct ClassifierHead {
  Matrix weight;  // d x C
  Matrix bias;    // 1 x C
  int class_offset = 0;

  std::size_t num_classes() const { return static_cast<std::size_t>(weight.cols()); }
  Matrix logits(const Matrix& embeddings) const;

  static ClassifierHead init(std::size_t d, std::size_t classes, int class_offset, std::uint64_t seed);
};

// Nearest-class-mean readout written as a linear head: weight column c = 2 mu_c and
// bias c = -|mu_c|^2, so softmax(logits) equals softmax(-|h - mu_c|^2).
ClassifierHead class_mean_head(const Matrix& embeddings, std::span<const NodeId> nodes,
                               std::span<const int> local_labels, std::size_t classes, int class_offset);

// Index of the largest entry per row; ties go to the smaller index.
std::vector<int> argmax_rows(const Matrix& m);

struct TaskArtifacts {
  int task_id = 0;
  GraphPrompt prompt;
  ClassifierHead head;

  // 2 k f + d C + C.
  std::size_t parameter_count() const;
  std::uint64_t fingerprint() const;

  // "TPPART1", u64 task_id, k, f, d, C, offset, then tokens, projections, head weight, bias as
  // row-major f64. Little-endian.
  std::string serialize() const;
  static TaskArtifacts deserialize(std::string data);
  void save(const std::filesystem::path& path) const;
  static TaskArtifacts load(const std::filesystem::path& path);
};

struct PromptTrainOptions {
  std::size_t tokens = kDefaultPromptTokens;
  bool prompt_on = true;  // off: tokens fixed at zero, projections left at their initialization
  bool head_on = true;    // off: head left at its random initialization
  double init_sigma = 0.01;
  std::uint64_t seed = 0;
};

struct PromptObjective {
  double loss = 0.0;
  PromptGradients prompt;
  Matrix head_weight;
  Matrix head_bias;
};

// Mean cross-entropy over `nodes` of head(f(A, prompt(x))) with gradients for the prompt and
// the head. `local_labels` are task-local class indices aligned with `nodes`.
PromptObjective prompt_objective(const Graph& g, const Matrix& x, std::span<const NodeId> nodes,
                                 std::span<const int> local_labels, const SgcBackbone& backbone,
                                 const GraphPrompt& prompt, const ClassifierHead& head);

// Learns a prompt and head for one task against a frozen backbone. With both prompt and head
// disabled the head becomes the class-mean readout of the raw-feature embeddings.
TaskArtifacts train_task(const Graph& g, std::span<const NodeId> train_nodes, const SgcBackbone& backbone,
                         const TrainConfig& cfg, const PromptTrainOptions& options, int task_id, int class_offset,
                         int num_classes);

// Head logits for every node of g (n x C).
Matrix task_logits(const Graph& g, const TaskArtifacts& artifacts, const SgcBackbone& backbone);

// Global class id per test node.
std::vector<int> classify(const Graph& g, std::span<const NodeId> test_nodes, const TaskArtifacts& artifacts,
                          const SgcBackbone& backbone);

}  // namespace tpp
