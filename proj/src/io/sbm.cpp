#include <cmath>
#include <random>

#include "tpp/io.hpp"
#include "tpp/rng.hpp"

namespace tpp {

SbmStream generate_sbm_stream(const SbmSpec& spec) {
  spec.validate();
  const std::size_t T = spec.tasks;
  const std::size_t C = spec.classes_per_task;
  const std::size_t per = spec.nodes_per_class;
  const std::size_t f = spec.feature_dim;
  const std::size_t n = T * C * per;

  SbmStream out;
  std::vector<int> labels(n);
  out.task_of_node.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    labels[i] = static_cast<int>(i / per);
    out.task_of_node[i] = static_cast<int>(i / (per * C));
  }
  for (std::size_t t = 0; t < T; ++t) {
    out.groups.emplace_back();
    for (std::size_t c = 0; c < C; ++c) out.groups.back().push_back(static_cast<int>(t * C + c));
  }

  Rng rng(spec.seed);
  std::normal_distribution<double> noise(0.0, 1.0);
  std::vector<float> features(n * f);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t t = static_cast<std::size_t>(out.task_of_node[i]);
    const std::size_t c = static_cast<std::size_t>(labels[i]) % C;
    const std::size_t axis = spec.adversarial ? c % f : (t * C + c) % f;
    for (std::size_t j = 0; j < f; ++j) {
      const double mean = j == axis ? spec.mean_shift : 0.0;
      features[i * f + j] = static_cast<float>(mean + spec.noise * noise(rng));
    }
  }

  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<Edge> edges;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      double p;
      if (out.task_of_node[i] != out.task_of_node[j]) {
        p = spec.cross_task_prob;
      } else {
        p = labels[i] == labels[j] ? spec.intra_prob : spec.inter_prob;
        if (spec.adversarial) p *= std::pow(spec.density_decay, static_cast<double>(T - 1 - out.task_of_node[i]));
      }
      if (unit(rng) < p) edges.push_back({static_cast<NodeId>(i), static_cast<NodeId>(j)});
    }
  }
  out.graph = Graph::from_edges(n, edges, f, std::move(features), std::move(labels));
  return out;
}

}  // namespace tpp
