#include <doctest.h>

#include <filesystem>
#include <numeric>

#include "support.hpp"
#include "tpp/error.hpp"
#include "tpp/profiler.hpp"
#include "tpp/verify.hpp"

using namespace tpp;
using namespace tpp::testing;

namespace {

std::vector<NodeId> iota_nodes(std::size_t n, NodeId start = 0) {
  std::vector<NodeId> v(n);
  std::iota(v.begin(), v.end(), start);
  return v;
}

TaskPrototype proto(int id, std::vector<double> v) {
  Vector x(static_cast<Eigen::Index>(v.size()));
  for (std::size_t i = 0; i < v.size(); ++i) x[static_cast<Eigen::Index>(i)] = v[i];
  return {id, x, 3};
}

Graph complete_graph(std::size_t n, const Matrix& x) {
  std::vector<Edge> edges;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) edges.push_back({static_cast<NodeId>(i), static_cast<NodeId>(j)});
  }
  return Graph::from_edges(n, edges, x);
}

}  // namespace

TEST_CASE("default smoothing steps") { CHECK(kDefaultSmoothingSteps == 3); }

TEST_CASE("prototype of a regular graph with equal features") {
  Matrix x(6, 3);
  x.rowwise() = Eigen::RowVector3d(1.0, -2.0, 0.5);
  std::vector<Edge> edges;
  for (NodeId i = 0; i < 6; ++i) edges.push_back({i, static_cast<NodeId>((i + 1) % 6)});
  const Graph g = Graph::from_edges(6, edges, x);
  const std::vector<NodeId> nodes{1, 4};
  for (int s : {0, 3, 10}) {
    const Vector p = build_prototype(g, nodes, s, 1).vector;
    CHECK((p - x.row(0).transpose() / std::sqrt(3.0)).norm() <= 1e-12);
  }
}

TEST_CASE("prototype matches the dense oracle") {
  const std::vector<Edge> path{{0, 1}, {1, 2}, {2, 3}};
  const Matrix onehot = Matrix::Identity(4, 4);
  const Graph g = Graph::from_edges(4, path, onehot);
  const auto all = iota_nodes(4);
  CHECK((build_prototype(g, all, 3, 1).vector - dense_prototype(4, path, onehot, all, 3)).cwiseAbs().maxCoeff() <= 1e-10);

  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const auto edges = random_edges(30, 0.15, seed);
    const Matrix x = random_matrix(30, 5, seed + 7);
    const Graph r = Graph::from_edges(30, edges, x);
    const auto all30 = iota_nodes(30);
    if (!std::all_of(all30.begin(), all30.end(), [&](NodeId v) { return r.degree(v) > 0; })) continue;
    const std::vector<NodeId> nodes{0, 3, 9, 17, 28};
    const Vector got = build_prototype(r, nodes, 3, 1).vector;
    const Vector want = dense_prototype(30, edges, r.features(), nodes, 3);
    CHECK((got - want).cwiseAbs().maxCoeff() <= 1e-10);
  }
}

TEST_CASE("prototype applies the isolated-node fix first") {
  const Matrix x = random_matrix(5, 2, 3);
  const Graph g = Graph::from_edges(5, std::vector<Edge>{{0, 1}, {1, 2}}, x);
  const Graph fixed = connect_isolated_nodes(g, 11);
  const auto all = iota_nodes(5);
  CHECK(build_prototype(g, all, 3, 1, 11).vector == build_prototype(fixed, all, 3, 1, 11).vector);
  CHECK_THROWS_AS(build_prototype(g, std::vector<NodeId>{}, 3, 1), InvalidArgument);
}

TEST_CASE("prototype is linear in the node set") {
  const Graph g = random_graph(20, 0.3, 4, 21);
  const std::vector<NodeId> a{0, 2, 5};
  const std::vector<NodeId> b{7, 8, 11, 19};
  std::vector<NodeId> u = a;
  u.insert(u.end(), b.begin(), b.end());
  const Vector pa = build_prototype(g, a, 3, 1).vector;
  const Vector pb = build_prototype(g, b, 3, 1).vector;
  const Vector pu = build_prototype(g, u, 3, 1).vector;
  CHECK((pu - (3.0 * pa + 4.0 * pb) / 7.0).cwiseAbs().maxCoeff() <= 1e-12);
}

TEST_CASE("attribute prototype is the plain mean") {
  Matrix x(3, 2);
  x << 1, 2, 3, 4, 5, 9;
  const Graph g = Graph::from_edges(3, std::vector<Edge>{{0, 1}}, x);
  const Vector p = attribute_prototype(g, std::vector<NodeId>{0, 2}, 1).vector;
  CHECK(p[0] == 3.0);
  CHECK(p[1] == 5.5);
}

TEST_CASE("predict task") {
  PrototypePool pool;
  CHECK_THROWS_AS(predict_task(pool, proto(1, {0.0})), InvalidArgument);
  pool.add(proto(1, {0.0, 0.0}));
  CHECK(predict_task(pool, proto(0, {5.0, 5.0})) == 1);
  pool.add(proto(2, {1.0, 1.0}));
  pool.add(proto(3, {-1.0, 2.0}));
  CHECK(predict_task(pool, proto(0, {1.0, 1.0})) == 2);
  SUBCASE("ties go to the smaller id") {
    CHECK(predict_task(pool, proto(0, {0.5, 0.5})) == 1);
  }
  SUBCASE("dimension mismatch") {
    CHECK_THROWS_AS(predict_task(pool, proto(0, {1.0})), InvalidArgument);
  }
}

TEST_CASE("predict task is invariant to pool order") {
  std::vector<TaskPrototype> ps;
  for (int t = 0; t < 6; ++t) {
    const Matrix v = random_matrix(1, 4, static_cast<std::uint64_t>(t));
    ps.push_back({t + 1, v.row(0).transpose(), 3});
  }
  const std::vector<int> perm{4, 1, 5, 0, 3, 2};
  PrototypePool a, b;
  for (const auto& p : ps) a.add(p);
  for (std::size_t i = 0; i < perm.size(); ++i) b.add({static_cast<int>(i + 1), ps[perm[i]].vector, 3});
  for (std::uint64_t s = 10; s < 30; ++s) {
    const Matrix q = random_matrix(1, 4, s);
    const TaskPrototype probe{0, q.row(0).transpose(), 3};
    CHECK(perm[predict_task(b, probe) - 1] + 1 == predict_task(a, probe));
  }
}

TEST_CASE("each enrolled task predicts itself") {
  PrototypePool pool;
  std::vector<Graph> graphs;
  for (int t = 0; t < 4; ++t) {
    Matrix x = random_matrix(30, 6, 50 + static_cast<std::uint64_t>(t), 0.3);
    x.col(t).array() += 2.0;
    graphs.push_back(Graph::from_edges(30, random_edges(30, 0.2, 60 + static_cast<std::uint64_t>(t)), x));
    pool.add(build_prototype(graphs.back(), iota_nodes(20), 3, t + 1));
    CHECK(predict_task(pool, build_prototype(graphs.back(), iota_nodes(20), 3, 0)) == t + 1);
  }
  for (int t = 0; t < 4; ++t) CHECK(predict_task(pool, build_prototype(graphs[t], iota_nodes(10, 20), 3, 0)) == t + 1);
}

TEST_CASE("pool enforces contiguous ids and dimensions") {
  PrototypePool pool;
  CHECK_THROWS_AS(pool.add(proto(2, {0.0})), InvalidArgument);
  pool.add(proto(1, {0.0, 1.0}));
  CHECK_THROWS_AS(pool.add(proto(2, {0.0})), InvalidArgument);
}

TEST_CASE("pool persistence") {
  PrototypePool pool;
  pool.add(proto(1, {0.25, -1.0, 3.5}));
  pool.add(proto(2, {1e-300, 2.0, -0.0}));
  const std::string bytes = pool.serialize();
  CHECK(bytes.substr(0, 8) == "TPPPOOL1");
  CHECK(bytes.size() == 8 + 2 * (24 + 3 * 8));
  const PrototypePool back = PrototypePool::deserialize(bytes);
  REQUIRE(back.size() == 2);
  CHECK(back[1].vector == pool[1].vector);
  CHECK(back[0].steps == 3);

  const auto path = std::filesystem::temp_directory_path() / "tpp_pool_test.bin";
  pool.save(path);
  CHECK(PrototypePool::load(path)[0].vector == pool[0].vector);
  std::filesystem::remove(path);

  std::string bad = bytes;
  bad[0] = 'X';
  CHECK_THROWS_AS(PrototypePool::deserialize(bad), IoError);
  CHECK_THROWS_AS(PrototypePool::deserialize(bytes.substr(0, bytes.size() - 3)), IoError);
}

TEST_CASE("limit prototype") {
  SUBCASE("single node") {
    Matrix x(1, 2);
    x << 3.0, -1.0;
    const Graph g = Graph::from_edges(1, std::vector<Edge>{}, x);
    CHECK(limit_prototype(g) == x.row(0).transpose());
  }
  SUBCASE("two joined nodes") {
    Matrix x(2, 2);
    x << 1.0, 2.0, 5.0, -4.0;
    const Graph g = Graph::from_edges(2, std::vector<Edge>{{0, 1}}, x);
    const Vector want = (std::sqrt(2.0) * x.row(0) + std::sqrt(2.0) * x.row(1)).transpose() / 4.0;
    CHECK((limit_prototype(g) - want).norm() <= 1e-15);
    const Vector p = build_prototype(g, std::vector<NodeId>{0, 1}, 200, 1).vector;
    CHECK((p - want).norm() <= 1e-12);
  }
  SUBCASE("disconnected graph") {
    const Graph g = Graph::from_edges(4, std::vector<Edge>{{0, 1}, {2, 3}}, Matrix(Matrix::Ones(4, 1)));
    CHECK_THROWS_WITH_AS(limit_prototype(g), doctest::Contains("limit not unique"), InvalidArgument);
  }
}

TEST_CASE("spectral oracle") {
  const Graph g = random_mixing_graph(20, 0.4, 3, 5);
  const SpectralOracle o = SpectralOracle::compute(g);
  const Vector& lambda = o.eigenvalues();
  CHECK(lambda[lambda.size() - 1] == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(lambda.minCoeff() > -1.0);
  // Top eigenvector is proportional to sqrt(dhat).
  Vector root(20);
  for (int i = 0; i < 20; ++i) root[i] = std::sqrt(g.degrees().dhat[static_cast<std::size_t>(i)]);
  root.normalize();
  const Vector top = o.eigenvectors().col(19);
  CHECK(std::abs(std::abs(top.dot(root)) - 1.0) <= 1e-10);
  CHECK(o.gap() == doctest::Approx(1.0 - lambda[18]));
  CHECK(o.second_modulus() == doctest::Approx(std::max(std::abs(lambda[0]), std::abs(lambda[18]))));
  const auto edges = g.edge_list();
  CHECK((SpectralOracle::dense_operator(g) - dense_propagation(20, edges)).cwiseAbs().maxCoeff() <= 1e-15);
}

TEST_CASE("prototype convergence") {
  SUBCASE("complete graph converges fast") {
    const Graph k5 = complete_graph(5, random_matrix(5, 3, 8));
    const std::vector<NodeId> a{0, 1};
    const std::vector<NodeId> b{2, 3, 4};
    const std::vector<int> steps{1, 50};
    const Theorem1Report r = verify_theorem1(k5, a, b, steps);
    CHECK(r.distances[1] <= 1e-8);
    CHECK(r.gap_qualifies);
    CHECK(r.passed);
  }
  SUBCASE("identical splits") {
    const Graph g = random_mixing_graph(15, 0.4, 3, 1);
    const std::vector<NodeId> a{0, 4, 9};
    const std::vector<int> steps{1, 5, 50};
    const Theorem1Report r = verify_theorem1(g, a, a, steps);
    for (double d : r.distances) CHECK(d == 0.0);
  }
  SUBCASE("fifty-node block graph") {
    std::vector<Edge> edges;
    Rng rng(4);
    std::bernoulli_distribution intra(0.3), inter(0.05);
    for (NodeId i = 0; i < 50; ++i) {
      for (NodeId j = i + 1; j < 50; ++j) {
        if ((i < 25) == (j < 25) ? intra(rng) : inter(rng)) edges.push_back({i, j});
      }
    }
    const Graph g = Graph::from_edges(50, edges, random_matrix(50, 4, 4));
    REQUIRE(is_connected(g));
    const SpectralOracle o = SpectralOracle::compute(g);
    REQUIRE(o.gap() >= 0.1);
    const std::vector<int> steps{1, 200};
    const Theorem1Report r = verify_theorem1(g, iota_nodes(25), iota_nodes(25, 25), steps);
    CHECK(r.distances[1] / r.distances[0] <= 1e-3);
  }
  SUBCASE("disconnected graph") {
    const Graph g = Graph::from_edges(4, std::vector<Edge>{{0, 1}, {2, 3}}, Matrix(Matrix::Ones(4, 1)));
    const std::vector<int> steps{1};
    CHECK_THROWS_AS(verify_theorem1(g, std::vector<NodeId>{0}, std::vector<NodeId>{2}, steps), InvalidArgument);
  }
}

TEST_CASE("gap diagnostic") {
  const Graph g = random_mixing_graph(20, 0.4, 3, 12);
  const auto edges = g.edge_list();
  SUBCASE("identical tasks") {
    const Theorem2Report r = theorem2_gap_diagnostic(g, g, identity_alignment(g, g));
    CHECK(r.difference.degree_gap_norm == 0.0);
    CHECK(r.difference.attribute_gap_norm == 0.0);
    CHECK(r.predicted_gap == 0.0);
    CHECK(r.measured_gap == 0.0);
  }
  SUBCASE("constant attribute shift") {
    const Graph h = Graph::from_edges(20, edges, Matrix(g.features().array() + 0.5));
    const Theorem2Report r = theorem2_gap_diagnostic(g, h, identity_alignment(g, h));
    CHECK(r.difference.degree_gap_norm == 0.0);
    CHECK(r.difference.attribute_gap_norm == doctest::Approx(0.5 * std::sqrt(60.0)).epsilon(1e-6));
    // Formula: ||sum_i sqrt(dhat_i) * 0.5|| over 3 columns.
    double root_sum = 0.0;
    for (double d : g.degrees().dhat) root_sum += std::sqrt(d);
    CHECK(r.predicted_gap == doctest::Approx(0.5 * root_sum * std::sqrt(3.0)).epsilon(1e-6));
    const Graph h2 = Graph::from_edges(20, edges, Matrix(g.features().array() + 1.0));
    const Theorem2Report r2 = theorem2_gap_diagnostic(g, h2, identity_alignment(g, h2));
    CHECK(r2.predicted_gap / r.predicted_gap == doctest::Approx(2.0).epsilon(1e-6));
  }
  SUBCASE("alignment conventions") {
    const Graph small = random_mixing_graph(12, 0.5, 3, 13);
    CHECK_THROWS_AS(identity_alignment(g, small), InvalidArgument);
    const NodeAlignment a = sorted_alignment(g, small);
    CHECK(a.truncated);
    CHECK(a.pairs.size() == 12);
    for (std::size_t i = 1; i < a.pairs.size(); ++i) {
      CHECK(g.degree(a.pairs[i - 1].first) <= g.degree(a.pairs[i].first));
      CHECK(small.degree(a.pairs[i - 1].second) <= small.degree(a.pairs[i].second));
    }
    const Theorem2Report r = theorem2_gap_diagnostic(g, small, a);
    CHECK(r.truncated);
    CHECK(r.aligned_nodes == 12);
  }
}

TEST_CASE("theorem suites pass") {
  SuiteOptions opts;
  opts.graphs = 5;
  for (const CheckResult& c : run_theorem_suites(opts)) {
    INFO(c.name << ": " << c.detail);
    CHECK(c.passed);
  }
}
