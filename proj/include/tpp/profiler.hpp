#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "tpp/dense.hpp"
#include "tpp/graph.hpp"

namespace tpp {

inline constexpr int kDefaultSmoothingSteps = 3;

struct TaskPrototype {
  int task_id = 0;
  Vector vector;
  int steps = 0;  // smoothing steps used; 0 for attribute-only prototypes
};

// Ordered prototype store. Task ids are 1..size() in insertion order.
class PrototypePool {
 public:
  // Throws unless p.task_id == size() + 1 and the dimensionality matches the pool.
  void add(TaskPrototype p);

  std::size_t size() const { return prototypes_.size(); }
  bool empty() const { return prototypes_.empty(); }
  const TaskPrototype& operator[](std::size_t i) const { return prototypes_[i]; }
  std::span<const TaskPrototype> prototypes() const { return prototypes_; }

  // "TPPPOOL1" then per record: u64 task_id, u64 steps, u64 f, f x f64. Little-endian.
  std::string serialize() const;
  static PrototypePool deserialize(std::string data);
  void save(const std::filesystem::path& path) const;
  static PrototypePool load(const std::filesystem::path& path);

 private:
  std::vector<TaskPrototype> prototypes_;
};

// Degree-corrected mean of smoothed embeddings over `nodes`:
//   p = 1/|nodes| * sum_i z_i * dhat_i^-1/2,  Z = smooth_features(g', steps)
// where g' = connect_isolated_nodes(g, isolated_seed). The whole graph is smoothed; `nodes`
// only selects the rows that are averaged.
TaskPrototype build_prototype(const Graph& g, std::span<const NodeId> nodes, int steps, int task_id,
                              std::uint64_t isolated_seed = 0);

// Plain attribute mean over `nodes`: no smoothing, no degree correction.
TaskPrototype attribute_prototype(const Graph& g, std::span<const NodeId> nodes, int task_id);

// Task id of the nearest prototype in Euclidean distance; ties go to the smaller id.
int predict_task(const PrototypePool& pool, const TaskPrototype& probe);

// Closed-form s -> infinity prototype of a connected graph:
//   (sum_j dhat_j^1/2 x_j) / (sum_j dhat_j).
// Throws "limit not unique" on a disconnected graph.
Vector limit_prototype(const Graph& g);

// Dense eigendecomposition of D^-1/2 (A + I) D^-1/2. Small graphs only.
class SpectralOracle {
 public:
  static SpectralOracle compute(const Graph& g);

  const Vector& eigenvalues() const { return eigenvalues_; }  // ascending
  const Matrix& eigenvectors() const { return eigenvectors_; }  // column i pairs with eigenvalue i
  // 1 - lambda_{N-1}.
  double gap() const;
  // max_{i<N} |lambda_i|: the per-step contraction of everything outside the top eigenvector.
  double second_modulus() const;
  // Explicit dense operator.
  static Matrix dense_operator(const Graph& g);

 private:
  Vector eigenvalues_;
  Matrix eigenvectors_;
};

struct Theorem1Config {
  double ratio = 1e-3;
  double absolute_floor = 1e-6;
  double gap_threshold = 0.1;
};

struct Theorem1Report {
  std::vector<int> steps;
  std::vector<double> distances;  // d(p_a(s), p_b(s)) per entry of steps
  double gap = 0.0;
  double second_modulus = 0.0;
  bool gap_qualifies = false;  // gap >= gap_threshold
  bool passed = false;         // ratio and floor hold at s_max (vacuously true when gap does not qualify)
};

// Measures how quickly prototypes of two node splits of one connected graph converge.
Theorem1Report verify_theorem1(const Graph& g, std::span<const NodeId> split_a,
                               std::span<const NodeId> split_b, std::span<const int> steps,
                               const Theorem1Config& config = {});

struct TaskDifference {
  double degree_gap_norm = 0.0;     // ||e||_2, e_i = dhat^j_i^1/2 - dhat^t_i^1/2 over aligned pairs
  double attribute_gap_norm = 0.0;  // ||eps||_F, eps = X^j - X^t over aligned pairs
};

// Aligned node pairs (node in g_t, node in g_j).
struct NodeAlignment {
  std::vector<std::pair<NodeId, NodeId>> pairs;
  bool truncated = false;
};

// Pairs node i with node i. Throws on a node-count mismatch.
NodeAlignment identity_alignment(const Graph& g_t, const Graph& g_j);
// Sorts both node sets by (degree, feature mean, id) and pairs positionally; the longer list
// is truncated to the shorter one with a warning.
NodeAlignment sorted_alignment(const Graph& g_t, const Graph& g_j);

struct Theorem2Report {
  TaskDifference difference;
  double predicted_gap = 0.0;  // || e_N^T eps + e^T X^j ||_2 with unnormalized e_N = dhat^1/2
  double measured_gap = 0.0;   // || p^t - p^j || at large s over all nodes
  std::size_t aligned_nodes = 0;
  bool truncated = false;
};

Theorem2Report theorem2_gap_diagnostic(const Graph& g_t, const Graph& g_j, const NodeAlignment& alignment,
                                       int measure_steps = 200);

}  // namespace tpp
