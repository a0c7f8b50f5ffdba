#include <string>

#include "tpp/error.hpp"
#include "tpp/prompt.hpp"
#include "tpp/rng.hpp"

namespace tpp {

namespace {

std::vector<int> local_labels_of(const Graph& g, std::span<const NodeId> nodes, int class_offset, int num_classes) {
  if (!g.has_labels()) throw InvalidArgument("train_task: graph has no labels");
  std::vector<int> out;
  out.reserve(nodes.size());
  for (NodeId v : nodes) {
    if (v < 0 || static_cast<std::size_t>(v) >= g.num_nodes()) {
      throw InvalidArgument("train_task: node " + std::to_string(v) + " out of range");
    }
    const int local = g.label(v) - class_offset;
    if (local < 0 || local >= num_classes) {
      throw InvalidArgument("train_task: node " + std::to_string(v) + " has label " + std::to_string(g.label(v)) +
                            " outside this task's classes");
    }
    out.push_back(local);
  }
  return out;
}

// Cross-entropy over the selected rows of fixed embeddings, head gradients only.
CrossEntropyResult head_loss(const Matrix& selected, const ClassifierHead& head, std::span<const int> labels) {
  return cross_entropy_loss(head.logits(selected), labels);
}

}  // namespace

PromptObjective prompt_objective(const Graph& g, const Matrix& x, std::span<const NodeId> nodes,
                                 std::span<const int> local_labels, const SgcBackbone& backbone,
                                 const GraphPrompt& prompt, const ClassifierHead& head) {
  Matrix weights;
  const Matrix prompted = apply_prompt(prompt, x, &weights);
  const SgcActivations tape = sgc_forward_tape(backbone, g, prompted);
  const std::vector<NodeId> rows(nodes.begin(), nodes.end());
  const Matrix selected = gather_rows(tape.output, rows);
  const CrossEntropyResult ce = head_loss(selected, head, local_labels);

  PromptObjective out;
  out.loss = ce.loss;
  out.head_weight = selected.transpose() * ce.grad;
  out.head_bias = ce.grad.colwise().sum();
  const Matrix d_selected = ce.grad * head.weight.transpose();
  Matrix d_output = Matrix::Zero(tape.output.rows(), tape.output.cols());
  for (std::size_t i = 0; i < rows.size(); ++i) d_output.row(rows[i]) += d_selected.row(static_cast<Eigen::Index>(i));
  const SgcGradients sg = sgc_backward(backbone, g, tape, d_output, false, true);
  out.prompt = prompt_backward(prompt, x, weights, sg.input);
  return out;
}

TaskArtifacts train_task(const Graph& g, std::span<const NodeId> train_nodes, const SgcBackbone& backbone,
                         const TrainConfig& cfg, const PromptTrainOptions& options, int task_id, int class_offset,
                         int num_classes) {
  cfg.validate();
  if (!backbone.frozen()) throw InvalidArgument("train_task: backbone must be frozen");
  if (train_nodes.empty()) throw InvalidArgument("train_task: empty training set");
  if (num_classes <= 0) throw InvalidArgument("train_task: need at least one class");
  if (g.num_features() != backbone.input_dim()) {
    throw InvalidArgument("train_task: graph features have width " + std::to_string(g.num_features()) +
                          ", backbone expects " + std::to_string(backbone.input_dim()));
  }
  const std::vector<int> labels = local_labels_of(g, train_nodes, class_offset, num_classes);
  const std::size_t f = g.num_features();
  const std::size_t d = backbone.hidden_dim();

  TaskArtifacts art;
  art.task_id = task_id;
  art.prompt = GraphPrompt::init(options.tokens, f, options.seed, options.init_sigma);
  if (!options.prompt_on) art.prompt.tokens.setZero();
  art.head = ClassifierHead::init(d, static_cast<std::size_t>(num_classes), class_offset,
                                  derive_seed(options.seed, seed_tag::kPrompt));

  const Matrix x = g.features();
  if (!options.prompt_on) {
    // Zero tokens leave the features untouched, so the embeddings are fixed for the whole run.
    const Matrix h = sgc_forward(backbone, g, x);
    if (!options.head_on) {
      art.head = class_mean_head(h, train_nodes, labels, static_cast<std::size_t>(num_classes), class_offset);
      return art;
    }
    const Matrix selected = gather_rows(h, std::vector<NodeId>(train_nodes.begin(), train_nodes.end()));
    AdamState s_w, s_b;
    for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
      const CrossEntropyResult ce = head_loss(selected, art.head, labels);
      adam_step(art.head.weight, selected.transpose() * ce.grad, s_w, cfg);
      adam_step(art.head.bias, ce.grad.colwise().sum(), s_b, cfg);
      backbone.check_unchanged();
    }
    return art;
  }

  AdamState s_tokens, s_proj, s_w, s_b;
  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    const PromptObjective obj = prompt_objective(g, x, train_nodes, labels, backbone, art.prompt, art.head);
    adam_step(art.prompt.tokens, obj.prompt.tokens, s_tokens, cfg);
    adam_step(art.prompt.projections, obj.prompt.projections, s_proj, cfg);
    if (options.head_on) {
      adam_step(art.head.weight, obj.head_weight, s_w, cfg);
      adam_step(art.head.bias, obj.head_bias, s_b, cfg);
    }
    backbone.check_unchanged();
  }
  return art;
}

Matrix task_logits(const Graph& g, const TaskArtifacts& artifacts, const SgcBackbone& backbone) {
  const Matrix prompted = apply_prompt(artifacts.prompt, g.features());
  return artifacts.head.logits(sgc_forward(backbone, g, prompted));
}

std::vector<int> classify(const Graph& g, std::span<const NodeId> test_nodes, const TaskArtifacts& artifacts,
                          const SgcBackbone& backbone) {
  const Matrix logits = task_logits(g, artifacts, backbone);
  const std::vector<int> local = argmax_rows(gather_rows(logits, std::vector<NodeId>(test_nodes.begin(), test_nodes.end())));
  std::vector<int> out;
  out.reserve(local.size());
  for (int c : local) out.push_back(artifacts.head.class_offset + c);
  return out;
}

}  // namespace tpp
