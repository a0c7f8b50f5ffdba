#include "tpp/graph.hpp"

#include <string>

#include "tpp/error.hpp"
#include "tpp/rng.hpp"

namespace tpp {

Graph connect_isolated_nodes(const Graph& g, std::uint64_t seed) {
  const std::size_t n = g.num_nodes();
  std::vector<NodeId> isolated;
  std::vector<NodeId> anchors;
  for (std::size_t i = 0; i < n; ++i) {
    (g.degree(static_cast<NodeId>(i)) == 0 ? isolated : anchors).push_back(static_cast<NodeId>(i));
  }
  if (isolated.empty() || n == 1) return g;
  if (anchors.empty()) throw InvalidArgument("connect_isolated_nodes: no anchor node available");

  Rng rng(seed);
  std::uniform_int_distribution<std::size_t> pick(0, anchors.size() - 1);
  std::vector<Edge> edges = g.edge_list();
  for (NodeId v : isolated) edges.push_back({v, anchors[pick(rng)]});
  return Graph::from_edges(n, edges, g.num_features(), g.feature_storage(), g.labels());
}

void AugmentationParams::validate() const {
  auto check = [](double p, const char* name) {
    if (!(p >= 0.0 && p <= 1.0)) {
      throw InvalidArgument(std::string(name) + " must lie in [0, 1], got " + std::to_string(p));
    }
  };
  check(edge_removal_prob, "edge_removal_prob");
  check(attr_mask_prob, "attr_mask_prob");
}

Graph augment_contrastive(const Graph& g, const AugmentationParams& params) {
  params.validate();
  Rng rng(params.rng_seed);
  const std::size_t f = g.num_features();

  std::bernoulli_distribution mask_draw(params.attr_mask_prob);
  std::vector<char> masked(f);
  for (std::size_t j = 0; j < f; ++j) masked[j] = mask_draw(rng);

  std::bernoulli_distribution drop_draw(params.edge_removal_prob);
  std::vector<Edge> kept;
  for (const Edge& e : g.edge_list()) {
    if (!drop_draw(rng)) kept.push_back(e);
  }

  std::vector<float> features = g.feature_storage();
  for (std::size_t i = 0; i < g.num_nodes(); ++i) {
    for (std::size_t j = 0; j < f; ++j) {
      if (masked[j]) features[i * f + j] = 0.0f;
    }
  }
  return Graph::from_edges(g.num_nodes(), kept, f, std::move(features), g.labels());
}

}  // namespace tpp
