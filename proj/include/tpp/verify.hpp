#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "tpp/graph.hpp"

namespace tpp {

struct CheckResult {
  std::string name;
  bool passed = false;
  std::string detail;
};

struct SuiteOptions {
  std::size_t graphs = 20;
  std::uint64_t seed = 0;
  std::size_t min_nodes = 10;
  std::size_t max_nodes = 40;
  double edge_prob = 0.3;
  std::size_t feature_dim = 8;
  double min_gap = 0.1;
};

// Erdos-Renyi graph with N(0, 1) features, redrawn until it is connected and its propagation
// operator has both 1 - lambda_{N-1} and 1 - max_{i<N} |lambda_i| at least `min_gap`.
Graph random_mixing_graph(std::size_t n, double p, std::size_t f, std::uint64_t seed, double min_gap = 0.1);

// Prototype convergence, closed-form limit and the degree/attribute gap diagnostic over a family
// of random mixing graphs. One entry per check.
std::vector<CheckResult> run_theorem_suites(const SuiteOptions& options = {});

}  // namespace tpp
