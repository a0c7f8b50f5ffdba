#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "tpp/config.hpp"
#include "tpp/graph.hpp"
#include "tpp/nn.hpp"
#include "tpp/profiler.hpp"
#include "tpp/prompt.hpp"

namespace tpp {

// ---------------------------------------------------------------------------
// Task streams

struct NodeSplit {
  std::vector<NodeId> train;
  std::vector<NodeId> val;
  std::vector<NodeId> test;
};

struct Task {
  Graph graph;                       // labels are stream class ids: class_offset + local index
  std::vector<int> source_classes;   // dataset class id per local class index
  int class_offset = 0;
  NodeSplit split;
  std::vector<NodeId> source_nodes;  // local node -> node id in the source graph

  std::size_t num_classes() const { return source_classes.size(); }
};

struct TaskStream {
  std::vector<Task> tasks;

  std::size_t size() const { return tasks.size(); }
  std::size_t num_classes() const;
  std::size_t feature_dim() const;
  // Class sets pairwise disjoint, offsets contiguous, splits disjoint and exhaustive.
  void validate() const;
};

// Groups classes into tasks. `listed` returns `groups` verbatim; the other modes pool every
// class in `groups`, order them ascending, descending or by a seeded shuffle, and chunk them
// into groups of `per_task`.
std::vector<std::vector<int>> form_class_groups(const std::vector<std::vector<int>>& groups, std::size_t per_task,
                                                Ordering ordering, std::uint64_t seed);

// Per class: seeded shuffle, then round(0.6 n) train, round(0.2 n) validation, rest test.
NodeSplit split_per_class(const Graph& g, std::uint64_t seed, double train_fraction = 0.6,
                          double val_fraction = 0.2);

// One task per group: the induced subgraph over nodes whose label is in the group, relabeled to
// stream class ids, with per-class splits.
TaskStream build_stream(const Graph& source, const std::vector<std::vector<int>>& groups, std::uint64_t split_seed);

// ---------------------------------------------------------------------------
// Metrics

// Lower-triangular T x T accuracy record; entry (t, j) is the accuracy on task j after
// learning task t, 0-based, defined for j <= t.
class AccuracyMatrix {
 public:
  explicit AccuracyMatrix(std::size_t tasks = 0);

  std::size_t tasks() const { return tasks_; }
  void set(std::size_t t, std::size_t j, double value);
  double at(std::size_t t, std::size_t j) const;
  bool has(std::size_t t, std::size_t j) const;
  bool complete() const;
  std::string to_csv() const;

  friend bool operator==(const AccuracyMatrix&, const AccuracyMatrix&);

 private:
  std::size_t tasks_ = 0;
  std::vector<double> values_;  // NaN marks unset or undefined
};

struct Metrics {
  double aa = 0.0;
  std::optional<double> af;  // empty when T = 1
};

// AA = mean_j M[T-1][j];  AF = mean_{j<T-1} (M[T-1][j] - M[j][j]).
Metrics compute_metrics(const AccuracyMatrix& m);

// Plain or class-balanced accuracy of `predicted` against `truth`.
double accuracy(std::span<const int> predicted, std::span<const int> truth, bool balanced);

// ---------------------------------------------------------------------------
// Runs

struct PhaseTiming {
  std::string phase;
  double seconds = 0.0;
};

struct RunResult {
  std::string method;
  AccuracyMatrix accuracy;
  double aa = 0.0;
  std::optional<double> af;
  // predicted_task_ids[t][j]: task id (1-based) chosen for task j's test graph after learning t.
  // Empty when the method does not predict task ids.
  std::vector<std::vector<int>> predicted_task_ids;
  std::vector<double> task_id_accuracy;  // per task j over rows t >= j
  std::vector<PhaseTiming> timings;      // kept out of the persisted document
  std::string config_snapshot;
  std::uint64_t seed = 0;

  double overall_task_id_accuracy() const;
};

// JSON document: method, seed, config (snapshot text), accuracy (nested rows, lower triangle),
// aa, af (null when T = 1), predicted_task_ids, task_id_accuracy.
std::string serialize_run_result(const RunResult& r);
// Parses and recomputes AA/AF from the matrix; throws if the stored values disagree.
RunResult parse_run_result(std::string_view text);
std::string serialize_timings(const RunResult& r);

// Writes result.json, accuracy.csv and timings.json into `dir`.
void write_run_outputs(const std::filesystem::path& dir, const RunResult& r);

struct TppModel {
  SgcBackbone backbone;
  PrototypePool pool;
  std::vector<TaskArtifacts> artifacts;
};

TrainConfig task_train_config(const RunConfig& cfg);
TrainConfig contrastive_train_config(const RunConfig& cfg);
AugmentationParams augmentation_params(const RunConfig& cfg);

// Loads cfg.backbone when set, otherwise pretrains contrastively on the first task's graph.
SgcBackbone obtain_backbone(const TaskStream& stream, const RunConfig& cfg);

// Full train/infer protocol. After learning task t, every task j <= t is evaluated by
// predicting its task id from the test-node prototype, then classifying with that task's
// prompt and head. Ablation switches and the profiling mode come from cfg.
RunResult run_tpp(const TaskStream& stream, const RunConfig& cfg, TppModel* model_out = nullptr);

struct AblationFlags {
  bool prompt_on = true;
  bool head_on = true;
  bool task_id_on = true;
};

// run_tpp with components switched off. Without task-id prediction every test node is scored
// by every learned task's prompt and head and takes the single most probable class.
RunResult run_ablation(const TaskStream& stream, const AblationFlags& flags, const RunConfig& cfg);

enum class BaselineKind { fine_tune, joint, per_task_models, attribute_profiling_tpp };
std::string_view to_string(BaselineKind k);
BaselineKind parse_baseline_kind(std::string_view s);

RunResult run_baseline(const TaskStream& stream, BaselineKind kind, const RunConfig& cfg);

// Trainable backbone + head used by the baselines.
struct SupervisedModel {
  SgcBackbone backbone;
  ClassifierHead head;
};

struct SupervisedGradients {
  Matrix w1, w2, head_weight, head_bias;
};

// Cross-entropy over `nodes` using only the first `active_classes` head outputs. Labels index
// head columns. Gradients flow into both backbone weights and the head.
double supervised_objective(const Graph& g, const Matrix& x, std::span<const NodeId> nodes,
                            std::span<const int> labels, const SupervisedModel& model, std::size_t active_classes,
                            SupervisedGradients* grads);

struct ProfileReport {
  std::vector<int> laplacian_predictions;  // predicted task id per task's test graph
  std::vector<int> attribute_predictions;
  double laplacian_accuracy = 0.0;
  double attribute_accuracy = 0.0;
};

// Task-id accuracy of Laplacian-smoothing prototypes and attribute-mean prototypes once every
// task is enrolled.
ProfileReport profile_tasks(const TaskStream& stream, const RunConfig& cfg);

}  // namespace tpp
