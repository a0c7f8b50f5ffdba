#include "tpp/profiler.hpp"

#include <limits>
#include <string>

#include "tpp/error.hpp"

namespace tpp {

namespace {

void check_nodes(const Graph& g, std::span<const NodeId> nodes, const char* op) {
  if (nodes.empty()) throw InvalidArgument(std::string(op) + ": empty node set");
  for (NodeId v : nodes) {
    if (v < 0 || static_cast<std::size_t>(v) >= g.num_nodes()) {
      throw InvalidArgument(std::string(op) + ": node " + std::to_string(v) + " out of range");
    }
  }
}

}  // namespace

TaskPrototype build_prototype(const Graph& g, std::span<const NodeId> nodes, int steps, int task_id,
                              std::uint64_t isolated_seed) {
  check_nodes(g, nodes, "build_prototype");
  const Graph fixed = connect_isolated_nodes(g, isolated_seed);
  const Matrix z = smooth_features(fixed, steps);
  const auto& inv_sqrt = fixed.degrees().inv_sqrt;

  Vector p = Vector::Zero(z.cols());
  for (NodeId i : nodes) p += z.row(i).transpose() * inv_sqrt[i];
  p /= static_cast<double>(nodes.size());
  return {task_id, std::move(p), steps};
}

TaskPrototype attribute_prototype(const Graph& g, std::span<const NodeId> nodes, int task_id) {
  check_nodes(g, nodes, "attribute_prototype");
  Vector p = Vector::Zero(static_cast<Eigen::Index>(g.num_features()));
  for (NodeId i : nodes) {
    for (std::size_t j = 0; j < g.num_features(); ++j) p[static_cast<Eigen::Index>(j)] += g.feature(i, j);
  }
  p /= static_cast<double>(nodes.size());
  return {task_id, std::move(p), 0};
}

int predict_task(const PrototypePool& pool, const TaskPrototype& probe) {
  if (pool.empty()) throw InvalidArgument("predict_task: empty prototype pool");
  int best_id = 0;
  double best = std::numeric_limits<double>::infinity();
  for (const TaskPrototype& p : pool.prototypes()) {
    if (p.vector.size() != probe.vector.size()) {
      throw InvalidArgument("predict_task: probe has dimension " + std::to_string(probe.vector.size()) +
                            ", pool has " + std::to_string(p.vector.size()));
    }
    const double d = (p.vector - probe.vector).norm();
    if (d < best) {  // strict: the earlier (smaller) id keeps ties
      best = d;
      best_id = p.task_id;
    }
  }
  return best_id;
}

Vector limit_prototype(const Graph& g) {
  if (g.num_nodes() == 0 || !is_connected(g)) throw InvalidArgument("limit_prototype: limit not unique");
  const auto& dhat = g.degrees().dhat;
  Vector acc = Vector::Zero(static_cast<Eigen::Index>(g.num_features()));
  double volume = 0.0;
  for (std::size_t i = 0; i < g.num_nodes(); ++i) {
    const double w = std::sqrt(dhat[i]);
    for (std::size_t j = 0; j < g.num_features(); ++j) {
      acc[static_cast<Eigen::Index>(j)] += w * g.feature(static_cast<NodeId>(i), j);
    }
    volume += dhat[i];
  }
  return acc / volume;
}

}  // namespace tpp
