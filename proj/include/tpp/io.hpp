#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "tpp/config.hpp"
#include "tpp/error.hpp"
#include "tpp/graph.hpp"
#include "tpp/harness.hpp"

namespace tpp {

// Data files disagree on the node count.
class CountMismatchError : public IoError {
 public:
  using IoError::IoError;
};

// The task spec names a class absent from the labels.
class UnknownClassError : public IoError {
 public:
  using IoError::IoError;
};

// Bad magic, truncated payload or unparsable text.
class FormatError : public IoError {
 public:
  using IoError::IoError;
};

// ---------------------------------------------------------------------------
// File formats

struct FeatureTable {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<float> values;  // row-major
};

// "GCILF1", u64 N, u64 F, then N*F f32, little-endian.
std::string encode_features(const FeatureTable& t);
FeatureTable decode_features(std::string data);

// One "u<TAB>v" line per undirected edge, 0-indexed.
std::string encode_edges(std::span<const Edge> edges);
std::vector<Edge> decode_edges(std::string_view text);

std::string encode_labels(std::span<const int> labels);
std::vector<int> decode_labels(std::string_view text);

// {"tasks": [[0, 1], [2, 3]]}
std::string encode_task_spec(const std::vector<std::vector<int>>& groups);
std::vector<std::vector<int>> decode_task_spec(std::string_view text);

// ---------------------------------------------------------------------------
// Bundles

struct DatasetBundle {
  std::filesystem::path edges;
  std::filesystem::path features;
  std::filesystem::path labels;
  std::filesystem::path task_spec;

  // edges.tsv, features.bin, labels.txt, tasks.json inside `dir`.
  static DatasetBundle in_directory(const std::filesystem::path& dir);
};

struct LoadedDataset {
  Graph graph;
  std::vector<std::vector<int>> groups;
};

// Parses and cross-checks the four files.
LoadedDataset read_bundle(const DatasetBundle& b);
// read_bundle, then tasks ordered per cfg and split with cfg.seed.
TaskStream load_bundle(const DatasetBundle& b, const RunConfig& cfg);
void write_bundle(const DatasetBundle& b, const Graph& g, const std::vector<std::vector<int>>& groups);

// ---------------------------------------------------------------------------
// Synthetic streams

struct SbmStream {
  Graph graph;                              // every task's nodes; labels are global class ids
  std::vector<std::vector<int>> groups;     // classes of task t: t*C .. t*C + C - 1
  std::vector<int> task_of_node;            // 0-based ground-truth task per node
};

// One SBM block per class. Class c of task t has feature mean mean_shift * e_{(t*C + c) mod f}
// plus N(0, noise^2) per coordinate; in adversarial mode the mean is mean_shift * e_c for every
// task and edge probabilities of task t are scaled by density_decay^(T-1-t).
SbmStream generate_sbm_stream(const SbmSpec& spec);

// Stream for a run: the bundle when cfg.bundle is set, otherwise the synthetic stream.
TaskStream make_stream(const RunConfig& cfg);

}  // namespace tpp
