#include <string>

#include "tpp/binary_io.hpp"
#include "tpp/error.hpp"
#include "tpp/nn.hpp"

namespace tpp {

namespace {
constexpr std::string_view kBackboneMagic = "TPPBKB1";
}

SgcBackbone SgcBackbone::init(std::size_t input_dim, std::size_t hidden_dim, int steps_per_layer,
                              std::uint64_t seed) {
  if (input_dim == 0 || hidden_dim == 0) throw InvalidArgument("SgcBackbone: zero dimension");
  Rng rng(seed);
  Matrix w1 = xavier_uniform(input_dim, hidden_dim, rng);
  Matrix w2 = xavier_uniform(hidden_dim, hidden_dim, rng);
  return from_weights(std::move(w1), std::move(w2), steps_per_layer);
}

SgcBackbone SgcBackbone::from_weights(Matrix w1, Matrix w2, int steps_per_layer) {
  if (w1.cols() != w2.rows() || w2.rows() != w2.cols()) {
    throw InvalidArgument("SgcBackbone: W1 is " + std::to_string(w1.rows()) + "x" + std::to_string(w1.cols()) +
                          ", W2 is " + std::to_string(w2.rows()) + "x" + std::to_string(w2.cols()));
  }
  if (steps_per_layer < 1) throw InvalidArgument("SgcBackbone: steps_per_layer must be >= 1");
  require_finite(w1, "SgcBackbone W1");
  require_finite(w2, "SgcBackbone W2");
  SgcBackbone b;
  b.w1_ = std::move(w1);
  b.w2_ = std::move(w2);
  b.steps_per_layer_ = steps_per_layer;
  return b;
}

Matrix& SgcBackbone::mutable_w1() {
  if (frozen_) throw Error("SgcBackbone: weights are frozen");
  return w1_;
}

Matrix& SgcBackbone::mutable_w2() {
  if (frozen_) throw Error("SgcBackbone: weights are frozen");
  return w2_;
}

void SgcBackbone::freeze() {
  frozen_ = true;
  frozen_hash_ = fingerprint();
}

std::uint64_t SgcBackbone::fingerprint() const {
  return binary::fingerprint(w2_, binary::fingerprint(w1_));
}

void SgcBackbone::check_unchanged() const {
  if (frozen_ && fingerprint() != frozen_hash_) throw Error("SgcBackbone: frozen weights were modified");
}

std::string SgcBackbone::serialize() const {
  binary::Writer w;
  w.bytes(kBackboneMagic);
  w.u64(input_dim());
  w.u64(hidden_dim());
  w.u64(static_cast<std::uint64_t>(steps_per_layer_));
  w.matrix(w1_);
  w.matrix(w2_);
  return w.data();
}

SgcBackbone SgcBackbone::deserialize(std::string data) {
  binary::Reader r(std::move(data));
  if (r.remaining() < kBackboneMagic.size() || r.bytes(kBackboneMagic.size()) != kBackboneMagic) {
    throw IoError("backbone: bad magic header");
  }
  const auto f = r.u64();
  const auto d = r.u64();
  const auto steps = r.u64();
  if (f == 0 || d == 0 || (f + d) * d > r.remaining() / 8) throw IoError("backbone: inconsistent shape header");
  Matrix w1 = r.matrix(f, d);
  Matrix w2 = r.matrix(d, d);
  if (!r.at_end()) throw IoError("backbone: trailing bytes");
  SgcBackbone b = from_weights(std::move(w1), std::move(w2), static_cast<int>(steps));
  b.freeze();
  return b;
}

void SgcBackbone::save(const std::filesystem::path& path) const { binary::write_file_atomic(path, serialize()); }

SgcBackbone SgcBackbone::load(const std::filesystem::path& path) { return deserialize(binary::read_file(path)); }

SgcActivations sgc_forward_tape(const SgcBackbone& backbone, const Graph& g, const Matrix& x) {
  if (static_cast<std::size_t>(x.rows()) != g.num_nodes() || static_cast<std::size_t>(x.cols()) != backbone.input_dim()) {
    throw InvalidArgument("sgc_forward: input is " + std::to_string(x.rows()) + "x" + std::to_string(x.cols()) +
                          ", expected " + std::to_string(g.num_nodes()) + "x" + std::to_string(backbone.input_dim()));
  }
  const int k = backbone.steps_per_layer();
  SgcActivations t;
  t.input_propagated = smooth(g, x, k);
  t.hidden = t.input_propagated * backbone.w1();
  t.hidden_propagated = smooth(g, t.hidden, k);
  t.output = t.hidden_propagated * backbone.w2();
  return t;
}

Matrix sgc_forward(const SgcBackbone& backbone, const Graph& g) {
  return sgc_forward_tape(backbone, g, g.features()).output;
}

Matrix sgc_forward(const SgcBackbone& backbone, const Graph& g, const Matrix& x_override) {
  return sgc_forward_tape(backbone, g, x_override).output;
}

SgcGradients sgc_backward(const SgcBackbone& backbone, const Graph& g, const SgcActivations& tape,
                          const Matrix& d_output, bool want_weights, bool want_input) {
  const int k = backbone.steps_per_layer();
  SgcGradients grads;
  if (want_weights) grads.w2 = tape.hidden_propagated.transpose() * d_output;
  // P is symmetric, so its adjoint is another propagation.
  const Matrix d_hidden = smooth(g, d_output * backbone.w2().transpose(), k);
  if (want_weights) grads.w1 = tape.input_propagated.transpose() * d_hidden;
  if (want_input) grads.input = smooth(g, d_hidden * backbone.w1().transpose(), k);
  return grads;
}

ProjectionHead ProjectionHead::init(std::size_t dim, std::uint64_t seed) {
  Rng rng(seed);
  ProjectionHead h;
  h.w1 = xavier_uniform(dim, dim, rng);
  h.b1 = Matrix::Zero(1, static_cast<Eigen::Index>(dim));
  h.w2 = xavier_uniform(dim, dim, rng);
  h.b2 = Matrix::Zero(1, static_cast<Eigen::Index>(dim));
  return h;
}

ProjectionActivations projection_forward(const ProjectionHead& head, const Matrix& h) {
  ProjectionActivations t;
  t.pre = (h * head.w1).rowwise() + head.b1.row(0);
  t.hidden = t.pre.cwiseMax(0.0);
  t.output = (t.hidden * head.w2).rowwise() + head.b2.row(0);
  return t;
}

ProjectionGradients projection_backward(const ProjectionHead& head, const Matrix& h,
                                        const ProjectionActivations& tape, const Matrix& d_output) {
  ProjectionGradients g;
  g.params.w2 = tape.hidden.transpose() * d_output;
  g.params.b2 = d_output.colwise().sum();
  Matrix d_pre = d_output * head.w2.transpose();
  d_pre = d_pre.cwiseProduct((tape.pre.array() > 0.0).cast<double>().matrix());
  g.params.w1 = h.transpose() * d_pre;
  g.params.b1 = d_pre.colwise().sum();
  g.input = d_pre * head.w1.transpose();
  return g;
}

}  // namespace tpp
