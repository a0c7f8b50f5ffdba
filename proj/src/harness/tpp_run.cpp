#include <algorithm>
#include <map>
#include <string>

#include "detail.hpp"
#include "tpp/error.hpp"
#include "tpp/rng.hpp"

namespace tpp {

namespace detail {

void PhaseClock::mark(const std::string& phase) {
  const auto now = std::chrono::steady_clock::now();
  const double dt = std::chrono::duration<double>(now - last_).count();
  last_ = now;
  for (PhaseTiming& p : sink_) {
    if (p.phase == phase) {
      p.seconds += dt;
      return;
    }
  }
  sink_.push_back({phase, dt});
}

std::uint64_t isolated_seed(const RunConfig& cfg) { return derive_seed(cfg.seed, seed_tag::kIsolated); }

TaskPrototype profile_nodes(const Graph& g, std::span<const NodeId> nodes, int task_id, Profiling mode,
                            const RunConfig& cfg) {
  if (mode == Profiling::attribute) return attribute_prototype(g, nodes, task_id);
  return build_prototype(g, nodes, cfg.smoothing_steps, task_id, isolated_seed(cfg));
}

std::vector<int> test_labels(const Task& task) {
  std::vector<int> out;
  out.reserve(task.split.test.size());
  for (NodeId v : task.split.test) out.push_back(task.graph.label(v));
  return out;
}

double task_accuracy(const Task& task, const std::vector<int>& predicted, const RunConfig& cfg) {
  const std::vector<int> truth = test_labels(task);
  return accuracy(predicted, truth, cfg.balanced_accuracy);
}

void routed_protocol(const TaskStream& stream, const RunConfig& cfg, Profiling mode, RunResult& result,
                     PhaseClock& clock, PrototypePool* pool_out, const std::function<void(std::size_t)>& learn,
                     const std::function<std::vector<int>(std::size_t, std::size_t)>& classify_with) {
  const std::size_t T = stream.size();
  PrototypePool pool;
  std::vector<TaskPrototype> probes;
  // Predictions of model i on task j never change once both exist.
  std::map<std::pair<std::size_t, std::size_t>, std::vector<int>> cache;
  result.accuracy = AccuracyMatrix(T);
  result.predicted_task_ids.assign(T, {});

  for (std::size_t t = 0; t < T; ++t) {
    const Task& task = stream.tasks[t];
    pool.add(profile_nodes(task.graph, task.split.train, static_cast<int>(t + 1), mode, cfg));
    probes.push_back(profile_nodes(task.graph, task.split.test, static_cast<int>(t + 1), mode, cfg));
    clock.mark("profile");
    learn(t);
    clock.mark("train");
    for (std::size_t j = 0; j <= t; ++j) {
      const int predicted = cfg.oracle_task_ids ? static_cast<int>(j + 1) : predict_task(pool, probes[j]);
      result.predicted_task_ids[t].push_back(predicted);
      const std::size_t i = static_cast<std::size_t>(predicted - 1);
      auto it = cache.find({i, j});
      if (it == cache.end()) it = cache.emplace(std::make_pair(i, j), classify_with(i, j)).first;
      result.accuracy.set(t, j, task_accuracy(stream.tasks[j], it->second, cfg));
    }
    clock.mark("evaluate");
  }
  if (pool_out) *pool_out = std::move(pool);
}

void finalize(RunResult& result, const RunConfig& cfg) {
  const Metrics m = compute_metrics(result.accuracy);
  result.aa = m.aa;
  result.af = m.af;
  result.task_id_accuracy.clear();
  if (!result.predicted_task_ids.empty()) {
    const std::size_t T = result.accuracy.tasks();
    for (std::size_t j = 0; j < T; ++j) {
      std::size_t hits = 0;
      for (std::size_t t = j; t < T; ++t) hits += result.predicted_task_ids[t][j] == static_cast<int>(j + 1);
      result.task_id_accuracy.push_back(static_cast<double>(hits) / static_cast<double>(T - j));
    }
  }
  result.config_snapshot = cfg.serialize();
  result.seed = cfg.seed;
}

}  // namespace detail

TrainConfig task_train_config(const RunConfig& cfg) {
  TrainConfig t;
  t.learning_rate = cfg.task_lr;
  t.epochs = cfg.task_epochs;
  t.adam_beta1 = cfg.adam_beta1;
  t.adam_beta2 = cfg.adam_beta2;
  t.adam_eps = cfg.adam_eps;
  t.temperature = cfg.temperature;
  t.rng_seed = derive_seed(cfg.seed, seed_tag::kPrompt);
  return t;
}

TrainConfig contrastive_train_config(const RunConfig& cfg) {
  TrainConfig t = task_train_config(cfg);
  t.learning_rate = cfg.contrastive_lr;
  t.epochs = cfg.contrastive_epochs;
  t.rng_seed = derive_seed(cfg.seed, seed_tag::kPretrain);
  return t;
}

AugmentationParams augmentation_params(const RunConfig& cfg) {
  AugmentationParams a;
  a.edge_removal_prob = cfg.edge_removal;
  a.attr_mask_prob = cfg.attr_mask;
  a.rng_seed = derive_seed(cfg.seed, seed_tag::kAugment);
  return a;
}

SgcBackbone obtain_backbone(const TaskStream& stream, const RunConfig& cfg) {
  if (stream.tasks.empty()) throw InvalidArgument("obtain_backbone: empty stream");
  if (!cfg.backbone.empty()) {
    SgcBackbone bb = SgcBackbone::load(cfg.backbone);
    if (bb.input_dim() != stream.feature_dim()) {
      throw InvalidArgument("backbone " + cfg.backbone + " expects " + std::to_string(bb.input_dim()) +
                            " features, stream has " + std::to_string(stream.feature_dim()));
    }
    return bb;
  }
  PretrainOptions opts;
  opts.hidden_dim = cfg.hidden_dim;
  opts.steps_per_layer = cfg.steps_per_layer;
  opts.fresh_views_per_epoch = cfg.fresh_views_per_epoch;
  return pretrain_backbone(stream.tasks.front().graph, augmentation_params(cfg), contrastive_train_config(cfg), opts)
      .backbone;
}

namespace {

std::string method_name(const RunConfig& cfg) {
  std::string name = cfg.profiling == Profiling::attribute ? "attribute_profiling_tpp" : "tpp";
  if (!cfg.prompt_on) name += "-prompt";
  if (!cfg.head_on) name += "-head";
  if (!cfg.task_id_on) name += "-task_id";
  return name;
}

// Every learned task scores task j's test nodes; each node takes the class with the highest
// softmax probability across all of them.
std::vector<int> max_probability_classes(const Task& task, std::span<const TaskArtifacts> learned,
                                         const SgcBackbone& backbone) {
  const std::size_t n = task.split.test.size();
  std::vector<double> best(n, -1.0);
  std::vector<int> out(n, -1);
  for (const TaskArtifacts& art : learned) {
    const Matrix probs = softmax_rows(gather_rows(task_logits(task.graph, art, backbone), task.split.test));
    for (std::size_t r = 0; r < n; ++r) {
      for (Eigen::Index c = 0; c < probs.cols(); ++c) {
        if (probs(static_cast<Eigen::Index>(r), c) > best[r]) {
          best[r] = probs(static_cast<Eigen::Index>(r), c);
          out[r] = art.head.class_offset + static_cast<int>(c);
        }
      }
    }
  }
  return out;
}

}  // namespace

RunResult run_tpp(const TaskStream& stream, const RunConfig& cfg, TppModel* model_out) {
  cfg.validate();
  stream.validate();
  RunResult result;
  result.method = method_name(cfg);
  detail::PhaseClock clock(result.timings);

  TppModel model;
  model.backbone = obtain_backbone(stream, cfg);
  clock.mark("pretrain");

  const TrainConfig train_cfg = task_train_config(cfg);
  auto learn = [&](std::size_t t) {
    const Task& task = stream.tasks[t];
    PromptTrainOptions opts;
    opts.tokens = cfg.prompt_tokens;
    opts.prompt_on = cfg.prompt_on;
    opts.head_on = cfg.head_on;
    opts.init_sigma = cfg.prompt_init_sigma;
    opts.seed = derive_seed(train_cfg.rng_seed, t);
    model.artifacts.push_back(train_task(task.graph, task.split.train, model.backbone, train_cfg, opts,
                                         static_cast<int>(t + 1), task.class_offset,
                                         static_cast<int>(task.num_classes())));
  };

  if (cfg.task_id_on) {
    detail::routed_protocol(stream, cfg, cfg.profiling, result, clock, &model.pool, learn,
                            [&](std::size_t i, std::size_t j) {
                              const Task& task = stream.tasks[j];
                              return classify(task.graph, task.split.test, model.artifacts[i], model.backbone);
                            });
  } else {
    const std::size_t T = stream.size();
    result.accuracy = AccuracyMatrix(T);
    for (std::size_t t = 0; t < T; ++t) {
      const Task& task = stream.tasks[t];
      model.pool.add(detail::profile_nodes(task.graph, task.split.train, static_cast<int>(t + 1), cfg.profiling, cfg));
      clock.mark("profile");
      learn(t);
      clock.mark("train");
      const std::span<const TaskArtifacts> learned(model.artifacts.data(), t + 1);
      for (std::size_t j = 0; j <= t; ++j) {
        const auto predicted = max_probability_classes(stream.tasks[j], learned, model.backbone);
        result.accuracy.set(t, j, detail::task_accuracy(stream.tasks[j], predicted, cfg));
      }
      clock.mark("evaluate");
    }
  }
  model.backbone.check_unchanged();
  detail::finalize(result, cfg);
  if (model_out) *model_out = std::move(model);
  return result;
}

RunResult run_ablation(const TaskStream& stream, const AblationFlags& flags, const RunConfig& cfg) {
  RunConfig ablated = cfg;
  ablated.prompt_on = flags.prompt_on;
  ablated.head_on = flags.head_on;
  ablated.task_id_on = flags.task_id_on;
  return run_tpp(stream, ablated);
}

ProfileReport profile_tasks(const TaskStream& stream, const RunConfig& cfg) {
  cfg.validate();
  stream.validate();
  ProfileReport report;
  for (Profiling mode : {Profiling::laplacian, Profiling::attribute}) {
    PrototypePool pool;
    for (std::size_t t = 0; t < stream.size(); ++t) {
      const Task& task = stream.tasks[t];
      pool.add(detail::profile_nodes(task.graph, task.split.train, static_cast<int>(t + 1), mode, cfg));
    }
    auto& predictions = mode == Profiling::laplacian ? report.laplacian_predictions : report.attribute_predictions;
    std::size_t hits = 0;
    for (std::size_t t = 0; t < stream.size(); ++t) {
      const Task& task = stream.tasks[t];
      const int p = predict_task(pool, detail::profile_nodes(task.graph, task.split.test, static_cast<int>(t + 1), mode, cfg));
      predictions.push_back(p);
      hits += p == static_cast<int>(t + 1);
    }
    const double acc = static_cast<double>(hits) / static_cast<double>(stream.size());
    (mode == Profiling::laplacian ? report.laplacian_accuracy : report.attribute_accuracy) = acc;
  }
  return report;
}

}  // namespace tpp
