#include <doctest.h>

#include <filesystem>
#include <numeric>

#include "support.hpp"
#include "tpp/error.hpp"
#include "tpp/prompt.hpp"

using namespace tpp;
using namespace tpp::testing;

namespace {

// Two well separated classes on a block graph; labels offset by `offset`.
Graph separable_task(int offset, std::uint64_t seed) {
  Rng rng(seed);
  std::bernoulli_distribution intra(0.3), inter(0.02);
  std::normal_distribution<double> noise(0.0, 0.3);
  const std::size_t n = 40;
  std::vector<Edge> edges;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      if ((i < 20) == (j < 20) ? intra(rng) : inter(rng)) edges.push_back({static_cast<NodeId>(i), static_cast<NodeId>(j)});
    }
  }
  Matrix x(40, 5);
  std::vector<int> labels(n);
  for (std::size_t i = 0; i < n; ++i) {
    const int c = i < 20 ? 0 : 1;
    labels[i] = offset + c;
    for (Eigen::Index j = 0; j < 5; ++j) x(static_cast<Eigen::Index>(i), j) = noise(rng) + (j == c ? 2.0 : 0.0);
  }
  return Graph::from_edges(n, edges, x, labels);
}

SgcBackbone frozen_backbone(std::size_t f, std::size_t d, std::uint64_t seed) {
  SgcBackbone bb = SgcBackbone::init(f, d, 1, seed);
  bb.freeze();
  return bb;
}

std::vector<NodeId> every_other(std::size_t n, std::size_t phase) {
  std::vector<NodeId> v;
  for (std::size_t i = phase; i < n; i += 2) v.push_back(static_cast<NodeId>(i));
  return v;
}

}  // namespace

TEST_CASE("prompt defaults") {
  CHECK(kDefaultPromptTokens == 3);
  const GraphPrompt p = GraphPrompt::init(3, 200, 1);
  CHECK(p.size() == 3);
  CHECK(p.dim() == 200);
  const double sd = std::sqrt(p.tokens.squaredNorm() / static_cast<double>(p.tokens.size()));
  CHECK(sd == doctest::Approx(0.01).epsilon(0.15));
}

TEST_CASE("apply prompt examples") {
  Vector x(2);
  x << 0.3, -1.2;
  SUBCASE("single token") {
    GraphPrompt p = GraphPrompt::init(1, 2, 3);
    const Vector out = apply_prompt(p, x);
    CHECK((out - (x + p.tokens.row(0).transpose())).norm() <= 1e-15);
  }
  SUBCASE("zero tokens are the identity") {
    GraphPrompt p = GraphPrompt::init(3, 2, 3);
    p.tokens.setZero();
    CHECK(apply_prompt(p, x) == x);
  }
  SUBCASE("hand-evaluated softmax") {
    GraphPrompt p;
    p.projections = Matrix::Zero(2, 2);
    Vector unit(2);
    unit << 1.0, 0.0;
    p.projections(0, 0) = std::log(3.0);
    p.tokens.resize(2, 2);
    p.tokens << 1.0, 2.0, -4.0, 0.5;
    Matrix alpha;
    const Matrix out = apply_prompt(p, Matrix(unit.transpose()), &alpha);
    CHECK(alpha(0, 0) == doctest::Approx(0.75).epsilon(1e-14));
    CHECK(alpha(0, 1) == doctest::Approx(0.25).epsilon(1e-14));
    CHECK(out(0, 0) == doctest::Approx(1.0 + 0.75 * 1.0 + 0.25 * -4.0));
    CHECK(out(0, 1) == doctest::Approx(0.75 * 2.0 + 0.25 * 0.5));
  }
}

TEST_CASE("prompt weights form a distribution") {
  GraphPrompt p = GraphPrompt::init(4, 6, 9, 1.0);
  const Matrix x = random_matrix(50, 6, 10, 3.0);
  Matrix alpha;
  apply_prompt(p, x, &alpha);
  CHECK(alpha.minCoeff() >= 0.0);
  for (Eigen::Index i = 0; i < alpha.rows(); ++i) CHECK(std::abs(alpha.row(i).sum() - 1.0) <= 1e-12);
}

TEST_CASE("prompt objective gradients match finite differences") {
  const Graph g = separable_task(0, 20);
  const SgcBackbone bb = frozen_backbone(5, 4, 21);
  GraphPrompt prompt = GraphPrompt::init(3, 5, 22, 0.5);
  ClassifierHead head = ClassifierHead::init(4, 2, 0, 23);
  head.bias = random_matrix(1, 2, 24, 0.1);
  const std::vector<NodeId> nodes = every_other(40, 0);
  std::vector<int> labels;
  for (NodeId v : nodes) labels.push_back(g.label(v));
  const Matrix x = g.features();
  const PromptObjective obj = prompt_objective(g, x, nodes, labels, bb, prompt, head);
  auto loss = [&] { return prompt_objective(g, x, nodes, labels, bb, prompt, head).loss; };
  CHECK(gradient_error(prompt.tokens, obj.prompt.tokens, loss, 10, 1) <= 1e-4);
  CHECK(gradient_error(prompt.projections, obj.prompt.projections, loss, 10, 2) <= 1e-4);
  CHECK(gradient_error(head.weight, obj.head_weight, loss, 10, 3) <= 1e-4);
  CHECK(gradient_error(head.bias, obj.head_bias, loss, 2, 4) <= 1e-4);
}

TEST_CASE("train task") {
  const Graph g = separable_task(4, 30);
  const SgcBackbone bb = frozen_backbone(5, 8, 31);
  const std::vector<NodeId> train = every_other(40, 0);
  const std::vector<NodeId> test = every_other(40, 1);
  TrainConfig cfg;
  PromptTrainOptions opts;
  opts.seed = 32;

  SUBCASE("zero epochs equals initialization") {
    cfg.epochs = 0;
    const TaskArtifacts art = train_task(g, train, bb, cfg, opts, 3, 4, 2);
    const GraphPrompt init = GraphPrompt::init(3, 5, 32, 0.01);
    CHECK(art.prompt.tokens == init.tokens);
    CHECK(art.prompt.projections == init.projections);
    const ClassifierHead h = ClassifierHead::init(8, 2, 4, derive_seed(32, seed_tag::kPrompt));
    CHECK(art.head.weight == h.weight);
    CHECK(art.head.bias == h.bias);
    CHECK(art.task_id == 3);
    CHECK(art.head.class_offset == 4);
  }
  SUBCASE("separable task is learned") {
    const TaskArtifacts art = train_task(g, train, bb, cfg, opts, 1, 4, 2);
    const auto pred = classify(g, train, art, bb);
    std::size_t hits = 0;
    for (std::size_t i = 0; i < train.size(); ++i) hits += pred[i] == g.label(train[i]);
    CHECK(static_cast<double>(hits) / static_cast<double>(train.size()) >= 0.99);
    for (int c : classify(g, test, art, bb)) CHECK((c == 4 || c == 5));
    CHECK_NOTHROW(bb.check_unchanged());
  }
  SUBCASE("prompt off keeps tokens at zero") {
    opts.prompt_on = false;
    const TaskArtifacts art = train_task(g, train, bb, cfg, opts, 1, 4, 2);
    CHECK(art.prompt.tokens.cwiseAbs().maxCoeff() == 0.0);
    CHECK(art.prompt.projections == GraphPrompt::init(3, 5, 32, 0.01).projections);
  }
  SUBCASE("head off keeps the random head") {
    opts.head_on = false;
    const TaskArtifacts art = train_task(g, train, bb, cfg, opts, 1, 4, 2);
    CHECK(art.head.weight == ClassifierHead::init(8, 2, 4, derive_seed(32, seed_tag::kPrompt)).weight);
  }
  SUBCASE("both off uses class means") {
    opts.prompt_on = false;
    opts.head_on = false;
    const TaskArtifacts art = train_task(g, train, bb, cfg, opts, 1, 4, 2);
    const Matrix h = sgc_forward(bb, g);
    Eigen::RowVectorXd mu0 = Eigen::RowVectorXd::Zero(8);
    int count = 0;
    for (NodeId v : train) {
      if (g.label(v) == 4) {
        mu0 += h.row(v);
        ++count;
      }
    }
    mu0 /= count;
    CHECK((art.head.weight.col(0).transpose() - 2.0 * mu0).cwiseAbs().maxCoeff() <= 1e-12);
    CHECK(art.head.bias(0, 0) == doctest::Approx(-mu0.squaredNorm()).epsilon(1e-12));
  }
  SUBCASE("errors") {
    SgcBackbone loose = SgcBackbone::init(5, 8, 1, 31);
    CHECK_THROWS_AS(train_task(g, train, loose, cfg, opts, 1, 4, 2), InvalidArgument);
    CHECK_THROWS_AS(train_task(g, train, bb, cfg, opts, 1, 0, 2), InvalidArgument);
    const Graph unlabeled = Graph::from_edges(40, g.edge_list(), g.features());
    CHECK_THROWS_AS(train_task(unlabeled, train, bb, cfg, opts, 1, 4, 2), InvalidArgument);
  }
}

TEST_CASE("training one task leaves earlier artifacts untouched") {
  const SgcBackbone bb = frozen_backbone(5, 8, 40);
  TrainConfig cfg;
  cfg.epochs = 20;
  std::vector<TaskArtifacts> learned;
  std::vector<std::uint64_t> hashes;
  for (int t = 0; t < 3; ++t) {
    const Graph g = separable_task(2 * t, 41 + static_cast<std::uint64_t>(t));
    PromptTrainOptions opts;
    opts.seed = static_cast<std::uint64_t>(t);
    learned.push_back(train_task(g, every_other(40, 0), bb, cfg, opts, t + 1, 2 * t, 2));
    hashes.push_back(learned.back().fingerprint());
    for (std::size_t i = 0; i < learned.size(); ++i) CHECK(learned[i].fingerprint() == hashes[i]);
  }
  CHECK(hashes[0] != hashes[1]);
}

TEST_CASE("classify") {
  const Graph g = separable_task(6, 50);
  const SgcBackbone bb = frozen_backbone(5, 3, 51);
  TaskArtifacts art;
  art.task_id = 1;
  art.prompt = GraphPrompt::init(3, 5, 52);
  art.head = ClassifierHead::init(3, 2, 6, 53);
  SUBCASE("huge bias wins") {
    art.head.bias(0, 0) = 1e6;
    for (int c : classify(g, every_other(40, 0), art, bb)) CHECK(c == 6);
  }
  SUBCASE("ties break to the smaller class") {
    art.head.weight.setZero();
    for (int c : classify(g, every_other(40, 1), art, bb)) CHECK(c == 6);
  }
  SUBCASE("dense oracle on a six-node toy task") {
    const auto edges = random_edges(6, 0.5, 54);
    const Matrix x = random_matrix(6, 5, 55);
    const Graph toy = Graph::from_edges(6, edges, x, {6, 7, 6, 7, 6, 7});
    const Matrix p = dense_propagation(6, edges);
    const Matrix xt = toy.features();
    const Matrix alpha = softmax_rows(xt * art.prompt.projections.transpose());
    const Matrix prompted = xt + alpha * art.prompt.tokens;
    const Matrix h = p * (p * prompted * bb.w1()) * bb.w2();
    const Matrix oracle = (h * art.head.weight).rowwise() + art.head.bias.row(0);
    CHECK((task_logits(toy, art, bb) - oracle).cwiseAbs().maxCoeff() <= 1e-10);
  }
}

TEST_CASE("argmax rows") {
  Matrix m(3, 3);
  m << 1, 3, 3, 0, 0, 0, -1, -2, 5;
  CHECK(argmax_rows(m) == std::vector<int>{1, 0, 2});
}

TEST_CASE("artifact persistence") {
  TaskArtifacts art;
  art.task_id = 4;
  art.prompt = GraphPrompt::init(3, 7, 60);
  art.head = ClassifierHead::init(5, 2, 6, 61);
  art.head.bias = random_matrix(1, 2, 62);
  CHECK(art.parameter_count() == 2 * 3 * 7 + 5 * 2 + 2);
  const std::string bytes = art.serialize();
  CHECK(bytes.substr(0, 7) == "TPPART1");
  CHECK(bytes.size() == 7 + 6 * 8 + 8 * art.parameter_count());
  const TaskArtifacts back = TaskArtifacts::deserialize(bytes);
  CHECK(back.task_id == 4);
  CHECK(back.head.class_offset == 6);
  CHECK(back.fingerprint() == art.fingerprint());

  const auto path = std::filesystem::temp_directory_path() / "tpp_artifact_test.bin";
  art.save(path);
  CHECK(TaskArtifacts::load(path).prompt.tokens == art.prompt.tokens);
  std::filesystem::remove(path);

  CHECK_THROWS_AS(TaskArtifacts::deserialize("XPPART1" + bytes.substr(7)), IoError);
  CHECK_THROWS_AS(TaskArtifacts::deserialize(bytes.substr(0, bytes.size() - 1)), IoError);
}
