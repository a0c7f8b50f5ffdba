#include <string>

#include "detail.hpp"
#include "tpp/error.hpp"
#include "tpp/rng.hpp"

namespace tpp {

std::string_view to_string(BaselineKind k) {
  switch (k) {
    case BaselineKind::fine_tune: return "fine_tune";
    case BaselineKind::joint: return "joint";
    case BaselineKind::per_task_models: return "per_task_models";
    case BaselineKind::attribute_profiling_tpp: return "attribute_profiling_tpp";
  }
  return "?";
}

BaselineKind parse_baseline_kind(std::string_view s) {
  for (BaselineKind k : {BaselineKind::fine_tune, BaselineKind::joint, BaselineKind::per_task_models,
                         BaselineKind::attribute_profiling_tpp}) {
    if (to_string(k) == s) return k;
  }
  throw InvalidArgument("unknown baseline kind '" + std::string(s) +
                        "' (expected fine_tune, joint, per_task_models or attribute_profiling_tpp)");
}

double supervised_objective(const Graph& g, const Matrix& x, std::span<const NodeId> nodes,
                            std::span<const int> labels, const SupervisedModel& model, std::size_t active_classes,
                            SupervisedGradients* grads) {
  const auto active = static_cast<Eigen::Index>(active_classes);
  if (active_classes == 0 || active > model.head.weight.cols()) {
    throw InvalidArgument("supervised_objective: " + std::to_string(active_classes) + " active classes for a head of " +
                          std::to_string(model.head.weight.cols()));
  }
  const SgcActivations tape = sgc_forward_tape(model.backbone, g, x);
  const std::vector<NodeId> rows(nodes.begin(), nodes.end());
  const Matrix selected = gather_rows(tape.output, rows);
  const Matrix logits = (selected * model.head.weight.leftCols(active)).rowwise() + model.head.bias.row(0).head(active);
  const CrossEntropyResult ce = cross_entropy_loss(logits, labels);
  if (grads == nullptr) return ce.loss;

  grads->head_weight = Matrix::Zero(model.head.weight.rows(), model.head.weight.cols());
  grads->head_weight.leftCols(active) = selected.transpose() * ce.grad;
  grads->head_bias = Matrix::Zero(1, model.head.bias.cols());
  grads->head_bias.leftCols(active) = ce.grad.colwise().sum();
  const Matrix d_selected = ce.grad * model.head.weight.leftCols(active).transpose();
  Matrix d_output = Matrix::Zero(tape.output.rows(), tape.output.cols());
  for (std::size_t i = 0; i < rows.size(); ++i) d_output.row(rows[i]) += d_selected.row(static_cast<Eigen::Index>(i));
  SgcGradients sg = sgc_backward(model.backbone, g, tape, d_output, true, false);
  grads->w1 = std::move(sg.w1);
  grads->w2 = std::move(sg.w2);
  return ce.loss;
}

namespace {

SupervisedModel fresh_model(std::size_t f, std::size_t classes, int offset, const RunConfig& cfg, std::uint64_t seed) {
  SupervisedModel m;
  m.backbone = SgcBackbone::init(f, cfg.hidden_dim, cfg.steps_per_layer, seed);
  m.head = ClassifierHead::init(cfg.hidden_dim, classes, offset, derive_seed(seed, seed_tag::kPrompt));
  return m;
}

struct SupervisedOptimizer {
  AdamState w1, w2, hw, hb;

  void fit(SupervisedModel& m, const Graph& g, std::span<const NodeId> nodes, std::span<const int> labels,
           std::size_t active, const TrainConfig& cfg) {
    const Matrix x = g.features();
    SupervisedGradients grads;
    for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
      supervised_objective(g, x, nodes, labels, m, active, &grads);
      adam_step(m.backbone.mutable_w1(), grads.w1, w1, cfg);
      adam_step(m.backbone.mutable_w2(), grads.w2, w2, cfg);
      adam_step(m.head.weight, grads.head_weight, hw, cfg);
      adam_step(m.head.bias, grads.head_bias, hb, cfg);
    }
  }
};

// Labels of `nodes` as head column indices.
std::vector<int> head_labels(const Graph& g, std::span<const NodeId> nodes, int offset) {
  std::vector<int> out;
  out.reserve(nodes.size());
  for (NodeId v : nodes) out.push_back(g.label(v) - offset);
  return out;
}

// Global class per test node of `task`, with argmax over head columns [lo, hi).
std::vector<int> predict_range(const SupervisedModel& m, const Task& task, Eigen::Index lo, Eigen::Index hi) {
  const Matrix logits = gather_rows(m.head.logits(sgc_forward(m.backbone, task.graph)), task.split.test);
  std::vector<int> out = argmax_rows(logits.middleCols(lo, hi - lo));
  for (int& c : out) c += m.head.class_offset + static_cast<int>(lo);
  return out;
}

RunResult fine_tune(const TaskStream& stream, const RunConfig& cfg) {
  RunResult result;
  result.method = "fine_tune";
  detail::PhaseClock clock(result.timings);
  const TrainConfig train_cfg = task_train_config(cfg);
  SupervisedModel model =
      fresh_model(stream.feature_dim(), stream.num_classes(), 0, cfg, derive_seed(cfg.seed, seed_tag::kBaseline));
  const std::size_t T = stream.size();
  result.accuracy = AccuracyMatrix(T);
  for (std::size_t t = 0; t < T; ++t) {
    const Task& task = stream.tasks[t];
    const std::size_t seen = static_cast<std::size_t>(task.class_offset) + task.num_classes();
    SupervisedOptimizer opt;  // fresh moments per task
    opt.fit(model, task.graph, task.split.train, head_labels(task.graph, task.split.train, 0), seen, train_cfg);
    clock.mark("train");
    for (std::size_t j = 0; j <= t; ++j) {
      const auto predicted = predict_range(model, stream.tasks[j], 0, static_cast<Eigen::Index>(seen));
      result.accuracy.set(t, j, detail::task_accuracy(stream.tasks[j], predicted, cfg));
    }
    clock.mark("evaluate");
  }
  detail::finalize(result, cfg);
  return result;
}

// Row t retrains from scratch on every task seen so far at once.
RunResult joint(const TaskStream& stream, const RunConfig& cfg) {
  RunResult result;
  result.method = cfg.oracle_task_ids ? "joint_oracle" : "joint";
  detail::PhaseClock clock(result.timings);
  const TrainConfig train_cfg = task_train_config(cfg);
  const std::size_t T = stream.size();
  result.accuracy = AccuracyMatrix(T);
  for (std::size_t t = 0; t < T; ++t) {
    std::vector<Graph> graphs;
    std::vector<NodeId> train;
    NodeId shift = 0;
    for (std::size_t j = 0; j <= t; ++j) {
      const Task& task = stream.tasks[j];
      graphs.push_back(task.graph);
      for (NodeId v : task.split.train) train.push_back(v + shift);
      shift += static_cast<NodeId>(task.graph.num_nodes());
    }
    const Graph united = disjoint_union(graphs);
    const std::size_t seen = static_cast<std::size_t>(stream.tasks[t].class_offset) + stream.tasks[t].num_classes();
    SupervisedModel model =
        fresh_model(stream.feature_dim(), seen, 0, cfg, derive_seed(derive_seed(cfg.seed, seed_tag::kBaseline), t));
    SupervisedOptimizer opt;
    opt.fit(model, united, train, head_labels(united, train, 0), seen, train_cfg);
    clock.mark("train");
    // The union is block-diagonal, so scoring each task graph alone gives the same embeddings.
    for (std::size_t j = 0; j <= t; ++j) {
      const Task& task = stream.tasks[j];
      const auto lo = static_cast<Eigen::Index>(cfg.oracle_task_ids ? task.class_offset : 0);
      const auto hi = static_cast<Eigen::Index>(cfg.oracle_task_ids ? task.class_offset + static_cast<int>(task.num_classes()) : static_cast<int>(seen));
      result.accuracy.set(t, j, detail::task_accuracy(task, predict_range(model, task, lo, hi), cfg));
    }
    clock.mark("evaluate");
  }
  detail::finalize(result, cfg);
  return result;
}

RunResult per_task_models(const TaskStream& stream, const RunConfig& cfg) {
  RunResult result;
  result.method = "per_task_models";
  detail::PhaseClock clock(result.timings);
  const TrainConfig train_cfg = task_train_config(cfg);
  std::vector<SupervisedModel> models;
  auto learn = [&](std::size_t t) {
    const Task& task = stream.tasks[t];
    SupervisedModel m = fresh_model(stream.feature_dim(), task.num_classes(), task.class_offset, cfg,
                                    derive_seed(derive_seed(cfg.seed, seed_tag::kBaseline), t));
    SupervisedOptimizer opt;
    opt.fit(m, task.graph, task.split.train, head_labels(task.graph, task.split.train, task.class_offset),
            task.num_classes(), train_cfg);
    models.push_back(std::move(m));
  };
  detail::routed_protocol(stream, cfg, cfg.profiling, result, clock, nullptr, learn,
                          [&](std::size_t i, std::size_t j) {
                            const SupervisedModel& m = models[i];
                            return predict_range(m, stream.tasks[j], 0, m.head.weight.cols());
                          });
  detail::finalize(result, cfg);
  return result;
}

}  // namespace

RunResult run_baseline(const TaskStream& stream, BaselineKind kind, const RunConfig& cfg) {
  cfg.validate();
  stream.validate();
  switch (kind) {
    case BaselineKind::fine_tune: return fine_tune(stream, cfg);
    case BaselineKind::joint: return joint(stream, cfg);
    case BaselineKind::per_task_models: return per_task_models(stream, cfg);
    case BaselineKind::attribute_profiling_tpp: {
      RunConfig attr = cfg;
      attr.profiling = Profiling::attribute;
      return run_tpp(stream, attr);
    }
  }
  throw InvalidArgument("run_baseline: unknown kind");
}

}  // namespace tpp
