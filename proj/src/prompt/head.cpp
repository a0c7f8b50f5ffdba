#include <string>

#include "tpp/binary_io.hpp"
#include "tpp/error.hpp"
#include "tpp/prompt.hpp"

namespace tpp {

namespace {
constexpr std::string_view kArtifactMagic = "TPPART1";
}

Matrix ClassifierHead::logits(const Matrix& embeddings) const {
  if (embeddings.cols() != weight.rows()) {
    throw InvalidArgument("ClassifierHead: embeddings have width " + std::to_string(embeddings.cols()) +
                          ", head expects " + std::to_string(weight.rows()));
  }
  return (embeddings * weight).rowwise() + bias.row(0);
}

ClassifierHead ClassifierHead::init(std::size_t d, std::size_t classes, int class_offset, std::uint64_t seed) {
  if (classes == 0) throw InvalidArgument("ClassifierHead: zero classes");
  Rng rng(seed);
  ClassifierHead h;
  h.weight = xavier_uniform(d, classes, rng);
  h.bias = Matrix::Zero(1, static_cast<Eigen::Index>(classes));
  h.class_offset = class_offset;
  return h;
}

ClassifierHead class_mean_head(const Matrix& embeddings, std::span<const NodeId> nodes,
                               std::span<const int> local_labels, std::size_t classes, int class_offset) {
  const auto c = static_cast<Eigen::Index>(classes);
  Matrix means = Matrix::Zero(c, embeddings.cols());
  std::vector<double> counts(classes, 0.0);
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    means.row(local_labels[i]) += embeddings.row(nodes[i]);
    counts[static_cast<std::size_t>(local_labels[i])] += 1.0;
  }
  ClassifierHead h;
  h.weight.resize(embeddings.cols(), c);
  h.bias.resize(1, c);
  h.class_offset = class_offset;
  for (Eigen::Index k = 0; k < c; ++k) {
    if (counts[static_cast<std::size_t>(k)] > 0) means.row(k) /= counts[static_cast<std::size_t>(k)];
    h.weight.col(k) = 2.0 * means.row(k).transpose();
    h.bias(0, k) = -means.row(k).squaredNorm();
  }
  return h;
}

std::vector<int> argmax_rows(const Matrix& m) {
  std::vector<int> out(static_cast<std::size_t>(m.rows()));
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    Eigen::Index best = 0;
    for (Eigen::Index j = 1; j < m.cols(); ++j) {
      if (m(i, j) > m(i, best)) best = j;
    }
    out[static_cast<std::size_t>(i)] = static_cast<int>(best);
  }
  return out;
}

std::size_t TaskArtifacts::parameter_count() const {
  return static_cast<std::size_t>(prompt.tokens.size() + prompt.projections.size() + head.weight.size() +
                                  head.bias.size());
}

std::uint64_t TaskArtifacts::fingerprint() const {
  std::uint64_t h = binary::fingerprint(prompt.tokens);
  h = binary::fingerprint(prompt.projections, h);
  h = binary::fingerprint(head.weight, h);
  h = binary::fingerprint(head.bias, h);
  const double ids[2] = {static_cast<double>(task_id), static_cast<double>(head.class_offset)};
  return binary::fingerprint(std::span<const double>(ids, 2), h);
}

std::string TaskArtifacts::serialize() const {
  binary::Writer w;
  w.bytes(kArtifactMagic);
  w.u64(static_cast<std::uint64_t>(task_id));
  w.u64(prompt.size());
  w.u64(prompt.dim());
  w.u64(static_cast<std::uint64_t>(head.weight.rows()));
  w.u64(head.num_classes());
  w.u64(static_cast<std::uint64_t>(head.class_offset));
  w.matrix(prompt.tokens);
  w.matrix(prompt.projections);
  w.matrix(head.weight);
  w.matrix(head.bias);
  return w.data();
}

TaskArtifacts TaskArtifacts::deserialize(std::string data) {
  binary::Reader r(std::move(data));
  if (r.remaining() < kArtifactMagic.size() || r.bytes(kArtifactMagic.size()) != kArtifactMagic) {
    throw IoError("task artifacts: bad magic header");
  }
  TaskArtifacts a;
  a.task_id = static_cast<int>(r.u64());
  const auto k = r.u64();
  const auto f = r.u64();
  const auto d = r.u64();
  const auto c = r.u64();
  a.head.class_offset = static_cast<int>(r.u64());
  if (r.remaining() != 8 * (2 * k * f + d * c + c)) throw IoError("task artifacts: payload size does not match header");
  a.prompt.tokens = r.matrix(k, f);
  a.prompt.projections = r.matrix(k, f);
  a.head.weight = r.matrix(d, c);
  a.head.bias = r.matrix(1, c);
  return a;
}

void TaskArtifacts::save(const std::filesystem::path& path) const { binary::write_file_atomic(path, serialize()); }

TaskArtifacts TaskArtifacts::load(const std::filesystem::path& path) { return deserialize(binary::read_file(path)); }

}  // namespace tpp
