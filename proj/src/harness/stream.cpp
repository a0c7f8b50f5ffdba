#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <string>

#include "tpp/error.hpp"
#include "tpp/harness.hpp"
#include "tpp/rng.hpp"

namespace tpp {

std::size_t TaskStream::num_classes() const {
  std::size_t c = 0;
  for (const Task& t : tasks) c += t.num_classes();
  return c;
}

std::size_t TaskStream::feature_dim() const { return tasks.empty() ? 0 : tasks.front().graph.num_features(); }

void TaskStream::validate() const {
  if (tasks.empty()) throw InvalidArgument("task stream is empty");
  std::set<int> seen_classes;
  int offset = 0;
  for (std::size_t t = 0; t < tasks.size(); ++t) {
    const Task& task = tasks[t];
    const std::string where = "task " + std::to_string(t + 1);
    if (task.graph.num_features() != feature_dim()) throw InvalidArgument(where + ": feature width differs");
    if (!task.graph.has_labels()) throw InvalidArgument(where + ": graph is unlabeled");
    if (task.class_offset != offset) throw InvalidArgument(where + ": class offset is not contiguous");
    if (task.num_classes() == 0) throw InvalidArgument(where + ": no classes");
    for (int c : task.source_classes) {
      if (!seen_classes.insert(c).second) {
        throw InvalidArgument(where + ": class " + std::to_string(c) + " already belongs to an earlier task");
      }
    }
    offset += static_cast<int>(task.num_classes());

    std::vector<int> owner(task.graph.num_nodes(), 0);
    for (const auto* part : {&task.split.train, &task.split.val, &task.split.test}) {
      for (NodeId v : *part) {
        if (v < 0 || static_cast<std::size_t>(v) >= owner.size()) throw InvalidArgument(where + ": split node out of range");
        if (owner[v]++) throw InvalidArgument(where + ": node " + std::to_string(v) + " in more than one split");
      }
    }
    if (std::find(owner.begin(), owner.end(), 0) != owner.end()) {
      throw InvalidArgument(where + ": splits do not cover every node");
    }
    for (int y : task.graph.labels()) {
      if (y < task.class_offset || y >= offset) throw InvalidArgument(where + ": label outside the task's classes");
    }
  }
}

std::vector<std::vector<int>> form_class_groups(const std::vector<std::vector<int>>& groups, std::size_t per_task,
                                                Ordering ordering, std::uint64_t seed) {
  if (ordering == Ordering::listed) return groups;
  if (per_task == 0) throw InvalidArgument("classes per task must be >= 1");
  std::vector<int> classes;
  for (const auto& g : groups) classes.insert(classes.end(), g.begin(), g.end());
  std::sort(classes.begin(), classes.end());
  if (std::adjacent_find(classes.begin(), classes.end()) != classes.end()) {
    throw InvalidArgument("a class appears in more than one task group");
  }
  if (ordering == Ordering::descending) std::reverse(classes.begin(), classes.end());
  if (ordering == Ordering::random) {
    Rng rng(seed);
    std::shuffle(classes.begin(), classes.end(), rng);
  }
  std::vector<std::vector<int>> out;
  for (std::size_t i = 0; i < classes.size(); i += per_task) {
    const std::size_t end = std::min(classes.size(), i + per_task);
    out.emplace_back(classes.begin() + static_cast<std::ptrdiff_t>(i), classes.begin() + static_cast<std::ptrdiff_t>(end));
  }
  return out;
}

NodeSplit split_per_class(const Graph& g, std::uint64_t seed, double train_fraction, double val_fraction) {
  if (!g.has_labels()) throw InvalidArgument("split_per_class: graph is unlabeled");
  std::map<int, std::vector<NodeId>> by_class;
  for (std::size_t i = 0; i < g.num_nodes(); ++i) by_class[g.label(static_cast<NodeId>(i))].push_back(static_cast<NodeId>(i));

  Rng rng(seed);
  NodeSplit split;
  for (auto& [label, nodes] : by_class) {
    std::shuffle(nodes.begin(), nodes.end(), rng);
    const double n = static_cast<double>(nodes.size());
    const auto n_train = std::min(nodes.size(), static_cast<std::size_t>(std::llround(train_fraction * n)));
    const auto n_val = std::min(nodes.size() - n_train, static_cast<std::size_t>(std::llround(val_fraction * n)));
    split.train.insert(split.train.end(), nodes.begin(), nodes.begin() + static_cast<std::ptrdiff_t>(n_train));
    split.val.insert(split.val.end(), nodes.begin() + static_cast<std::ptrdiff_t>(n_train),
                     nodes.begin() + static_cast<std::ptrdiff_t>(n_train + n_val));
    split.test.insert(split.test.end(), nodes.begin() + static_cast<std::ptrdiff_t>(n_train + n_val), nodes.end());
  }
  std::sort(split.train.begin(), split.train.end());
  std::sort(split.val.begin(), split.val.end());
  std::sort(split.test.begin(), split.test.end());
  return split;
}

TaskStream build_stream(const Graph& source, const std::vector<std::vector<int>>& groups, std::uint64_t split_seed) {
  if (!source.has_labels()) throw InvalidArgument("build_stream: source graph is unlabeled");
  TaskStream stream;
  int offset = 0;
  for (std::size_t t = 0; t < groups.size(); ++t) {
    const auto& group = groups[t];
    std::map<int, int> local;
    for (std::size_t c = 0; c < group.size(); ++c) local.emplace(group[c], static_cast<int>(c));

    std::vector<NodeId> members;
    for (std::size_t i = 0; i < source.num_nodes(); ++i) {
      if (local.count(source.label(static_cast<NodeId>(i)))) members.push_back(static_cast<NodeId>(i));
    }
    if (members.empty()) throw InvalidArgument("build_stream: task " + std::to_string(t + 1) + " has no nodes");

    Subgraph sub = induced_subgraph(source, members);
    std::vector<int> labels;
    labels.reserve(members.size());
    for (int y : sub.graph.labels()) labels.push_back(offset + local.at(y));

    Task task;
    task.graph = sub.graph.relabeled(std::move(labels));
    task.source_classes = group;
    task.class_offset = offset;
    task.source_nodes = std::move(sub.original_ids);
    task.split = split_per_class(task.graph, derive_seed(split_seed, t));
    offset += static_cast<int>(group.size());
    stream.tasks.push_back(std::move(task));
  }
  stream.validate();
  return stream;
}

}  // namespace tpp
