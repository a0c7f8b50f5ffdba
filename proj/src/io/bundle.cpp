#include <set>
#include <string>

#include "tpp/binary_io.hpp"
#include "tpp/io.hpp"
#include "tpp/rng.hpp"

namespace tpp {

DatasetBundle DatasetBundle::in_directory(const std::filesystem::path& dir) {
  return {dir / "edges.tsv", dir / "features.bin", dir / "labels.txt", dir / "tasks.json"};
}

LoadedDataset read_bundle(const DatasetBundle& b) {
  FeatureTable features = decode_features(binary::read_file(b.features));
  std::vector<int> labels = decode_labels(binary::read_file(b.labels));
  const std::vector<Edge> edges = decode_edges(binary::read_file(b.edges));
  std::vector<std::vector<int>> groups = decode_task_spec(binary::read_file(b.task_spec));

  if (features.rows != labels.size()) {
    throw CountMismatchError("node count mismatch: features file has " + std::to_string(features.rows) +
                             " rows, labels file has " + std::to_string(labels.size()));
  }
  const std::size_t n = labels.size();
  for (const Edge& e : edges) {
    const auto bad = [n](NodeId v) { return v < 0 || static_cast<std::size_t>(v) >= n; };
    if (bad(e.u) || bad(e.v)) {
      throw CountMismatchError("edges file references node " + std::to_string(bad(e.u) ? e.u : e.v) +
                               " but the labels file has " + std::to_string(n) + " nodes");
    }
  }
  const std::set<int> known(labels.begin(), labels.end());
  for (const auto& g : groups) {
    for (int c : g) {
      if (!known.count(c)) throw UnknownClassError("task spec names class " + std::to_string(c) + ", absent from labels");
    }
  }
  LoadedDataset out;
  out.graph = Graph::from_edges(n, edges, features.cols, std::move(features.values), std::move(labels));
  out.groups = std::move(groups);
  return out;
}

TaskStream load_bundle(const DatasetBundle& b, const RunConfig& cfg) {
  const LoadedDataset data = read_bundle(b);
  const auto groups = form_class_groups(data.groups, cfg.classes_per_task, cfg.ordering,
                                        derive_seed(cfg.seed, seed_tag::kOrdering));
  return build_stream(data.graph, groups, derive_seed(cfg.seed, seed_tag::kSplit));
}

void write_bundle(const DatasetBundle& b, const Graph& g, const std::vector<std::vector<int>>& groups) {
  if (!g.has_labels()) throw InvalidArgument("write_bundle: graph is unlabeled");
  for (const auto* p : {&b.edges, &b.features, &b.labels, &b.task_spec}) {
    if (p->has_parent_path()) std::filesystem::create_directories(p->parent_path());
  }
  binary::write_file_atomic(b.features, encode_features({g.num_nodes(), g.num_features(), g.feature_storage()}));
  binary::write_file_atomic(b.edges, encode_edges(g.edge_list()));
  binary::write_file_atomic(b.labels, encode_labels(g.labels()));
  binary::write_file_atomic(b.task_spec, encode_task_spec(groups));
}

TaskStream make_stream(const RunConfig& cfg) {
  cfg.validate();
  if (!cfg.bundle.empty()) return load_bundle(DatasetBundle::in_directory(cfg.bundle), cfg);
  const SbmStream sbm = generate_sbm_stream(cfg.stream_spec());
  const auto groups = form_class_groups(sbm.groups, cfg.classes_per_task, cfg.ordering,
                                        derive_seed(cfg.seed, seed_tag::kOrdering));
  return build_stream(sbm.graph, groups, derive_seed(cfg.seed, seed_tag::kSplit));
}

}  // namespace tpp
