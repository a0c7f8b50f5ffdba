#include "tpp/graph.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "tpp/error.hpp"

namespace tpp {

Graph Graph::from_edges(std::size_t n, std::span<const Edge> edges, const Matrix& features,
                        std::vector<int> labels) {
  if (static_cast<std::size_t>(features.rows()) != n) {
    throw InvalidArgument("feature rows " + std::to_string(features.rows()) + " != node count " +
                          std::to_string(n));
  }
  const auto f = static_cast<std::size_t>(features.cols());
  std::vector<float> storage(n * f);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < f; ++j) {
      storage[i * f + j] = static_cast<float>(features(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)));
    }
  }
  return from_edges(n, edges, f, std::move(storage), std::move(labels));
}

Graph Graph::from_edges(std::size_t n, std::span<const Edge> edges, std::size_t f,
                        std::vector<float> features, std::vector<int> labels) {
  if (features.size() != n * f) {
    throw InvalidArgument("feature storage has " + std::to_string(features.size()) +
                          " entries, expected " + std::to_string(n * f));
  }
  if (!labels.empty() && labels.size() != n) {
    throw InvalidArgument("label count " + std::to_string(labels.size()) + " != node count " +
                          std::to_string(n));
  }
  for (int y : labels) {
    if (y < 0) throw InvalidArgument("negative label " + std::to_string(y));
  }

  std::vector<std::pair<NodeId, NodeId>> arcs;
  arcs.reserve(edges.size() * 2);
  for (const Edge& e : edges) {
    if (e.u < 0 || e.v < 0 || static_cast<std::size_t>(e.u) >= n || static_cast<std::size_t>(e.v) >= n) {
      throw InvalidArgument("edge (" + std::to_string(e.u) + ", " + std::to_string(e.v) +
                            ") out of range for " + std::to_string(n) + " nodes");
    }
    if (e.u == e.v) continue;
    arcs.emplace_back(e.u, e.v);
    arcs.emplace_back(e.v, e.u);
  }
  std::sort(arcs.begin(), arcs.end());
  arcs.erase(std::unique(arcs.begin(), arcs.end()), arcs.end());

  Graph g;
  g.num_nodes_ = n;
  g.num_features_ = f;
  g.features_ = std::move(features);
  g.labels_ = std::move(labels);
  g.offsets_.assign(n + 1, 0);
  g.neighbors_.reserve(arcs.size());
  for (const auto& [u, v] : arcs) {
    ++g.offsets_[u + 1];
    g.neighbors_.push_back(v);
  }
  std::partial_sum(g.offsets_.begin(), g.offsets_.end(), g.offsets_.begin());

  g.degrees_.dhat.resize(n);
  g.degrees_.inv_sqrt.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double d = 1.0 + static_cast<double>(g.offsets_[i + 1] - g.offsets_[i]);
    g.degrees_.dhat[i] = d;
    g.degrees_.inv_sqrt[i] = 1.0 / std::sqrt(d);
  }
  return g;
}

bool Graph::has_edge(NodeId u, NodeId v) const {
  const auto nb = neighbors(u);
  return std::binary_search(nb.begin(), nb.end(), v);
}

std::vector<Edge> Graph::edge_list() const {
  std::vector<Edge> out;
  out.reserve(num_edges());
  for (std::size_t u = 0; u < num_nodes_; ++u) {
    for (NodeId v : neighbors(static_cast<NodeId>(u))) {
      if (static_cast<NodeId>(u) < v) out.push_back({static_cast<NodeId>(u), v});
    }
  }
  return out;
}

Graph Graph::relabeled(std::vector<int> labels) const {
  return from_edges(num_nodes_, edge_list(), num_features_, features_, std::move(labels));
}

Matrix Graph::features() const {
  Matrix x(static_cast<Eigen::Index>(num_nodes_), static_cast<Eigen::Index>(num_features_));
  for (std::size_t i = 0; i < num_nodes_; ++i) {
    for (std::size_t j = 0; j < num_features_; ++j) {
      x(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = features_[i * num_features_ + j];
    }
  }
  return x;
}

std::size_t count_components(const Graph& g) {
  const std::size_t n = g.num_nodes();
  std::vector<char> seen(n, 0);
  std::vector<NodeId> stack;
  std::size_t components = 0;
  for (std::size_t s = 0; s < n; ++s) {
    if (seen[s]) continue;
    ++components;
    seen[s] = 1;
    stack.push_back(static_cast<NodeId>(s));
    while (!stack.empty()) {
      const NodeId u = stack.back();
      stack.pop_back();
      for (NodeId v : g.neighbors(u)) {
        if (!seen[v]) {
          seen[v] = 1;
          stack.push_back(v);
        }
      }
    }
  }
  return components;
}

Subgraph induced_subgraph(const Graph& g, std::span<const NodeId> nodes) {
  if (nodes.empty()) throw InvalidArgument("induced_subgraph: empty node set");
  const std::size_t n = g.num_nodes();
  std::vector<NodeId> local(n, -1);
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    const NodeId v = nodes[i];
    if (v < 0 || static_cast<std::size_t>(v) >= n) {
      throw InvalidArgument("induced_subgraph: node " + std::to_string(v) + " out of range");
    }
    if (local[v] != -1) {
      throw InvalidArgument("induced_subgraph: duplicate node " + std::to_string(v));
    }
    local[v] = static_cast<NodeId>(i);
  }

  std::vector<Edge> edges;
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    for (NodeId w : g.neighbors(nodes[i])) {
      if (local[w] > static_cast<NodeId>(i)) edges.push_back({static_cast<NodeId>(i), local[w]});
    }
  }

  const std::size_t f = g.num_features();
  std::vector<float> features(nodes.size() * f);
  std::vector<int> labels;
  if (g.has_labels()) labels.reserve(nodes.size());
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    std::copy_n(g.feature_storage().begin() + static_cast<std::ptrdiff_t>(nodes[i] * f), f,
                features.begin() + static_cast<std::ptrdiff_t>(i * f));
    if (g.has_labels()) labels.push_back(g.label(nodes[i]));
  }

  Subgraph out;
  out.graph = Graph::from_edges(nodes.size(), edges, f, std::move(features), std::move(labels));
  out.original_ids.assign(nodes.begin(), nodes.end());
  return out;
}

Graph disjoint_union(std::span<const Graph> graphs) {
  if (graphs.empty()) throw InvalidArgument("disjoint_union: no graphs");
  const std::size_t f = graphs.front().num_features();
  const bool labeled = graphs.front().has_labels();
  std::size_t n = 0;
  std::vector<Edge> edges;
  std::vector<float> features;
  std::vector<int> labels;
  for (const Graph& g : graphs) {
    if (g.num_features() != f) throw InvalidArgument("disjoint_union: feature width mismatch");
    if (g.has_labels() != labeled) throw InvalidArgument("disjoint_union: mixed labeled/unlabeled graphs");
    const auto shift = static_cast<NodeId>(n);
    for (const Edge& e : g.edge_list()) edges.push_back({e.u + shift, e.v + shift});
    features.insert(features.end(), g.feature_storage().begin(), g.feature_storage().end());
    labels.insert(labels.end(), g.labels().begin(), g.labels().end());
    n += g.num_nodes();
  }
  return Graph::from_edges(n, edges, f, std::move(features), std::move(labels));
}

}  // namespace tpp
