#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "tpp/dense.hpp"

namespace tpp {

using NodeId = std::int32_t;

struct Edge {
  NodeId u;
  NodeId v;
  friend bool operator==(const Edge&, const Edge&) = default;
};

// Degrees of A + I. dhat[i] = 1 + degree(i); inv_sqrt[i] = dhat[i]^(-1/2).
struct AugmentedDegrees {
  std::vector<double> dhat;
  std::vector<double> inv_sqrt;
};

// Immutable undirected graph in CSR form with both directions stored, no self-loops and
// no duplicate edges. Features are kept as 32-bit floats and widened on access.
class Graph {
 public:
  Graph() = default;

  // Builds a canonical graph: self-loops are dropped, edges symmetrized and deduplicated.
  // `features` must have n rows. `labels` is empty (unlabeled) or has n non-negative entries.
  static Graph from_edges(std::size_t n, std::span<const Edge> edges, const Matrix& features,
                          std::vector<int> labels = {});
  // Same, with row-major float features of shape n x f.
  static Graph from_edges(std::size_t n, std::span<const Edge> edges, std::size_t f,
                          std::vector<float> features, std::vector<int> labels = {});

  std::size_t num_nodes() const { return num_nodes_; }
  std::size_t num_features() const { return num_features_; }
  std::size_t num_edges() const { return neighbors_.size() / 2; }

  std::span<const NodeId> neighbors(NodeId i) const {
    return {neighbors_.data() + offsets_[i], neighbors_.data() + offsets_[i + 1]};
  }
  std::size_t degree(NodeId i) const { return offsets_[i + 1] - offsets_[i]; }
  bool has_edge(NodeId u, NodeId v) const;

  // Each undirected edge once, as (u, v) with u < v, in CSR order.
  std::vector<Edge> edge_list() const;

  const std::vector<float>& feature_storage() const { return features_; }
  float feature(NodeId i, std::size_t j) const { return features_[i * num_features_ + j]; }
  Matrix features() const;

  bool has_labels() const { return !labels_.empty(); }
  const std::vector<int>& labels() const { return labels_; }
  int label(NodeId i) const { return labels_.at(i); }

  const AugmentedDegrees& degrees() const { return degrees_; }

  // Same structure and features with new labels.
  Graph relabeled(std::vector<int> labels) const;

 private:
  std::size_t num_nodes_ = 0;
  std::size_t num_features_ = 0;
  std::vector<std::size_t> offsets_{0};
  std::vector<NodeId> neighbors_;
  std::vector<float> features_;
  std::vector<int> labels_;
  AugmentedDegrees degrees_;
};

// One application of D^-1/2 (A + I) D^-1/2 to every column of `x` (n x c). The self-loop
// term is added analytically.
Matrix propagate(const Graph& g, const Matrix& x);

// Applies `propagate` `steps` times. steps = 0 returns x unchanged.
Matrix smooth(const Graph& g, Matrix x, int steps);

// Laplacian smoothing of the graph's own features.
Matrix smooth_features(const Graph& g, int steps);

std::size_t count_components(const Graph& g);
inline bool is_connected(const Graph& g) { return count_components(g) <= 1; }

// Links every isolated node to a uniformly drawn non-isolated node. Returns a copy of `g`
// when nothing is isolated or n == 1. Throws when n > 1 and every node is isolated.
Graph connect_isolated_nodes(const Graph& g, std::uint64_t seed);

struct AugmentationParams {
  double edge_removal_prob = 0.2;
  double attr_mask_prob = 0.3;
  std::uint64_t rng_seed = 0;

  void validate() const;
};

// Corrupted contrastive view. Draw order from mt19937_64(rng_seed): first one
// bernoulli(attr_mask_prob) per feature dimension (true = zeroed), then one
// bernoulli(edge_removal_prob) per undirected edge in edge_list() order (true = dropped).
Graph augment_contrastive(const Graph& g, const AugmentationParams& params);

struct Subgraph {
  Graph graph;
  std::vector<NodeId> original_ids;  // local id -> id in the parent graph
};

// Induced subgraph over `nodes`, relabeled 0..|nodes|-1 in the given order.
Subgraph induced_subgraph(const Graph& g, std::span<const NodeId> nodes);

// Block-diagonal union; node ids of later graphs are shifted past earlier ones.
Graph disjoint_union(std::span<const Graph> graphs);

}  // namespace tpp
