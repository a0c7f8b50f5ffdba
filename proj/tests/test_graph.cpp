#include <doctest.h>

#include <algorithm>
#include <numeric>
#include <random>

#include "support.hpp"
#include "tpp/error.hpp"
#include "tpp/graph.hpp"

using namespace tpp;
using namespace tpp::testing;

namespace {

Graph path4_onehot() {
  const std::vector<Edge> edges{{0, 1}, {1, 2}, {2, 3}};
  return Graph::from_edges(4, edges, Matrix(Matrix::Identity(4, 4)));
}

Graph cycle(std::size_t n, const Matrix& x) {
  std::vector<Edge> edges;
  for (std::size_t i = 0; i < n; ++i) edges.push_back({static_cast<NodeId>(i), static_cast<NodeId>((i + 1) % n)});
  return Graph::from_edges(n, edges, x);
}

}  // namespace

TEST_CASE("construction canonicalizes edges") {
  const std::vector<Edge> edges{{0, 1}, {1, 0}, {1, 1}, {2, 1}, {0, 1}};
  const Graph g = Graph::from_edges(3, edges, Matrix(Matrix::Zero(3, 2)), {0, 1, 1});
  CHECK(g.num_edges() == 2);
  CHECK(g.has_edge(0, 1));
  CHECK(g.has_edge(1, 0));
  CHECK(g.has_edge(1, 2));
  CHECK_FALSE(g.has_edge(1, 1));
  CHECK(g.degree(1) == 2);
  CHECK(g.degrees().dhat[1] == 3.0);
  CHECK(g.degrees().inv_sqrt[0] == doctest::Approx(1.0 / std::sqrt(2.0)));
  const auto list = g.edge_list();
  CHECK(list == std::vector<Edge>{{0, 1}, {1, 2}});
}

TEST_CASE("construction rejects malformed input") {
  const Matrix x = Matrix::Zero(3, 1);
  CHECK_THROWS_AS(Graph::from_edges(3, std::vector<Edge>{{0, 3}}, x), InvalidArgument);
  CHECK_THROWS_AS(Graph::from_edges(3, std::vector<Edge>{{-1, 0}}, x), InvalidArgument);
  CHECK_THROWS_AS(Graph::from_edges(2, std::vector<Edge>{}, x), InvalidArgument);
  CHECK_THROWS_AS(Graph::from_edges(3, std::vector<Edge>{}, x, {0, 1}), InvalidArgument);
  CHECK_THROWS_AS(Graph::from_edges(3, std::vector<Edge>{}, x, {0, -1, 0}), InvalidArgument);
}

TEST_CASE("features are stored as float and widened") {
  Matrix x(1, 2);
  x << 0.1, 3.0;
  const Graph g = Graph::from_edges(1, std::vector<Edge>{}, x);
  CHECK(g.features()(0, 0) == static_cast<double>(0.1f));
  CHECK(g.features()(0, 1) == 3.0);
}

TEST_CASE("smoothing with zero steps is the identity") {
  const Graph g = random_graph(12, 0.3, 4, 5);
  CHECK(smooth_features(g, 0) == g.features());
}

TEST_CASE("single node is a fixed point") {
  Matrix x(1, 3);
  x << 1.5, -2.0, 0.25;
  const Graph g = Graph::from_edges(1, std::vector<Edge>{}, x);
  CHECK(smooth_features(g, 5) == g.features());
}

TEST_CASE("path graph smoothing matches dense oracle") {
  const Graph g = path4_onehot();
  const Matrix p = dense_propagation(4, {{0, 1}, {1, 2}, {2, 3}});
  for (int s : {1, 2, 3, 7}) {
    const Matrix oracle = dense_power(p, s) * g.features();
    CHECK((smooth_features(g, s) - oracle).cwiseAbs().maxCoeff() <= 1e-10);
  }
}

TEST_CASE("propagation matches dense oracle on random graphs") {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const std::size_t n = 5 + seed * 4;
    const auto edges = random_edges(n, 0.2, seed);
    const Matrix x = random_matrix(static_cast<Eigen::Index>(n), 3, seed + 100);
    const Graph g = Graph::from_edges(n, edges, x);
    const Matrix oracle = dense_propagation(n, edges) * x;
    CHECK((propagate(g, x) - oracle).cwiseAbs().maxCoeff() <= 1e-10);
  }
}

TEST_CASE("regular graph with equal rows is invariant") {
  Matrix x(6, 2);
  x.rowwise() = Eigen::RowVector2d(0.5, -1.0);
  const Graph g = cycle(6, x);
  for (int s : {1, 4, 20}) CHECK((smooth_features(g, s) - g.features()).cwiseAbs().maxCoeff() <= 1e-12);
}

TEST_CASE("smoothing is a semigroup") {
  const Graph g = random_graph(20, 0.2, 3, 9);
  const Matrix a = smooth_features(g, 5);
  const Matrix b = smooth(g, smooth_features(g, 2), 3);
  CHECK((a - b).cwiseAbs().maxCoeff() <= 1e-10);
}

TEST_CASE("smoothing does not expand the degree-weighted norm") {
  // D^-1/2 P^s X = (D^-1 A_hat)^s D^-1/2 X and D^-1 A_hat is row-stochastic, so the largest
  // entry of D^-1/2 Z cannot grow with s. The plain 2-norm cannot grow either since |P| <= 1.
  const Graph g = random_graph(25, 0.15, 4, 11);
  const auto& inv_sqrt = g.degrees().inv_sqrt;
  auto weighted_max = [&](const Matrix& z) {
    double m = 0.0;
    for (Eigen::Index i = 0; i < z.rows(); ++i) m = std::max(m, z.row(i).cwiseAbs().maxCoeff() * inv_sqrt[i]);
    return m;
  };
  Matrix z = g.features();
  double prev_w = weighted_max(z);
  double prev_n = z.norm();
  for (int s = 1; s <= 10; ++s) {
    z = propagate(g, z);
    CHECK(weighted_max(z) <= prev_w * (1.0 + 1e-12));
    CHECK(z.norm() <= prev_n * (1.0 + 1e-12));
    prev_w = weighted_max(z);
    prev_n = z.norm();
  }
}

TEST_CASE("components") {
  const Graph g = Graph::from_edges(5, std::vector<Edge>{{0, 1}, {2, 3}}, Matrix(Matrix::Zero(5, 1)));
  CHECK(count_components(g) == 3);
  CHECK_FALSE(is_connected(g));
  CHECK(is_connected(path4_onehot()));
}

TEST_CASE("connect isolated nodes") {
  SUBCASE("no isolated nodes is a no-op") {
    const Graph g = path4_onehot();
    const Graph h = connect_isolated_nodes(g, 3);
    CHECK(h.edge_list() == g.edge_list());
  }
  SUBCASE("isolated nodes gain one edge into the connected part") {
    const Graph g = Graph::from_edges(5, std::vector<Edge>{{0, 1}, {1, 2}}, Matrix(Matrix::Zero(5, 1)));
    const Graph h = connect_isolated_nodes(g, 7);
    for (NodeId v : {3, 4}) {
      REQUIRE(h.degree(v) == 1);
      const NodeId target = h.neighbors(v)[0];
      CHECK(target >= 0);
      CHECK(target <= 2);
    }
    CHECK(h.num_edges() == 4);
  }
  SUBCASE("all isolated fails") {
    const Graph g = Graph::from_edges(2, std::vector<Edge>{}, Matrix(Matrix::Zero(2, 1)));
    CHECK_THROWS_WITH_AS(connect_isolated_nodes(g, 0), doctest::Contains("no anchor node available"), InvalidArgument);
  }
  SUBCASE("single node is left alone") {
    const Graph g = Graph::from_edges(1, std::vector<Edge>{}, Matrix(Matrix::Zero(1, 1)));
    CHECK(connect_isolated_nodes(g, 0).num_nodes() == 1);
  }
}

TEST_CASE("augmentation") {
  const Graph g = random_graph(30, 0.2, 10, 2, std::vector<int>(30, 0));
  SUBCASE("zero probabilities leave the graph unchanged") {
    const Graph h = augment_contrastive(g, {0.0, 0.0, 5});
    CHECK(h.edge_list() == g.edge_list());
    CHECK(h.feature_storage() == g.feature_storage());
  }
  SUBCASE("full edge removal") {
    CHECK(augment_contrastive(g, {1.0, 0.0, 5}).num_edges() == 0);
  }
  SUBCASE("mask replays the seeded draw") {
    const AugmentationParams params{0.2, 0.3, 42};
    const Graph h = augment_contrastive(g, params);
    Rng rng(42);
    std::bernoulli_distribution mask(0.3);
    std::vector<bool> zeroed;
    for (int j = 0; j < 10; ++j) zeroed.push_back(mask(rng));
    std::bernoulli_distribution drop(0.2);
    std::vector<Edge> kept;
    for (const Edge& e : g.edge_list()) {
      if (!drop(rng)) kept.push_back(e);
    }
    for (NodeId i = 0; i < 30; ++i) {
      for (std::size_t j = 0; j < 10; ++j) CHECK(h.feature(i, j) == (zeroed[j] ? 0.0f : g.feature(i, j)));
    }
    CHECK(h.edge_list() == kept);
    CHECK(h.labels() == g.labels());
  }
  SUBCASE("identical seeds are bit identical") {
    const Graph a = augment_contrastive(g, {0.5, 0.5, 9});
    const Graph b = augment_contrastive(g, {0.5, 0.5, 9});
    CHECK(a.edge_list() == b.edge_list());
    CHECK(a.feature_storage() == b.feature_storage());
  }
  SUBCASE("invalid probability") {
    CHECK_THROWS_AS(augment_contrastive(g, {1.5, 0.0, 0}), InvalidArgument);
  }
}

TEST_CASE("induced subgraph") {
  SUBCASE("triangle restricted to two nodes") {
    const Graph tri = Graph::from_edges(3, std::vector<Edge>{{0, 1}, {1, 2}, {0, 2}}, Matrix(Matrix::Zero(3, 1)));
    const std::vector<NodeId> nodes{0, 1};
    const Subgraph s = induced_subgraph(tri, nodes);
    CHECK(s.graph.edge_list() == std::vector<Edge>{{0, 1}});
    CHECK(s.original_ids == nodes);
  }
  SUBCASE("all nodes is a copy") {
    const Graph g = random_graph(15, 0.3, 2, 4);
    std::vector<NodeId> all(15);
    std::iota(all.begin(), all.end(), 0);
    const Subgraph s = induced_subgraph(g, all);
    CHECK(s.graph.edge_list() == g.edge_list());
    CHECK(s.graph.feature_storage() == g.feature_storage());
  }
  SUBCASE("class restriction keeps only internal edges") {
    std::vector<int> labels(40);
    for (int i = 0; i < 40; ++i) labels[i] = i / 10;
    const Graph g = random_graph(40, 0.3, 2, 8, labels);
    std::vector<NodeId> nodes;
    for (NodeId i = 0; i < 40; ++i) {
      if (g.label(i) == 2 || g.label(i) == 3) nodes.push_back(i);
    }
    const Subgraph s = induced_subgraph(g, nodes);
    for (const Edge& e : s.graph.edge_list()) {
      CHECK((s.graph.label(e.u) == 2 || s.graph.label(e.u) == 3));
      CHECK((s.graph.label(e.v) == 2 || s.graph.label(e.v) == 3));
      CHECK(g.has_edge(s.original_ids[e.u], s.original_ids[e.v]));
    }
    std::size_t expected = 0;
    for (const Edge& e : g.edge_list()) expected += g.label(e.u) >= 2 && g.label(e.v) >= 2;
    CHECK(s.graph.num_edges() == expected);
  }
  SUBCASE("errors") {
    const Graph g = path4_onehot();
    CHECK_THROWS_AS(induced_subgraph(g, std::vector<NodeId>{}), InvalidArgument);
    CHECK_THROWS_AS(induced_subgraph(g, std::vector<NodeId>{1, 1}), InvalidArgument);
    CHECK_THROWS_AS(induced_subgraph(g, std::vector<NodeId>{4}), InvalidArgument);
  }
}

TEST_CASE("disjoint union shifts ids") {
  const Graph a = path4_onehot();
  const Graph b = Graph::from_edges(2, std::vector<Edge>{{0, 1}}, Matrix(Matrix::Ones(2, 4)));
  const Graph u = disjoint_union(std::vector<Graph>{a, b});
  CHECK(u.num_nodes() == 6);
  CHECK(u.has_edge(4, 5));
  CHECK(u.num_edges() == 4);
  CHECK(count_components(u) == 2);
  CHECK(u.feature(5, 2) == 1.0f);
}

TEST_CASE("relabeled keeps structure") {
  const Graph g = Graph::from_edges(2, std::vector<Edge>{{0, 1}}, Matrix(Matrix::Zero(2, 1)), {0, 0});
  const Graph h = g.relabeled({3, 4});
  CHECK(h.label(1) == 4);
  CHECK(h.has_edge(0, 1));
}
