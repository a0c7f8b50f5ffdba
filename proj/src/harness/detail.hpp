#pragma once

#include <chrono>
#include <functional>
#include <string>
#include <vector>

#include "tpp/harness.hpp"

namespace tpp::detail {

class PhaseClock {
 public:
  explicit PhaseClock(std::vector<PhaseTiming>& sink) : sink_(sink) {}
  // Adds the time since the previous mark to `phase`, accumulating repeated phases.
  void mark(const std::string& phase);

 private:
  std::vector<PhaseTiming>& sink_;
  std::chrono::steady_clock::time_point last_ = std::chrono::steady_clock::now();
};

std::uint64_t isolated_seed(const RunConfig& cfg);

// Prototype of `nodes` in task graph g under the configured profiling mode.
TaskPrototype profile_nodes(const Graph& g, std::span<const NodeId> nodes, int task_id, Profiling mode,
                            const RunConfig& cfg);

std::vector<int> test_labels(const Task& task);

double task_accuracy(const Task& task, const std::vector<int>& predicted, const RunConfig& cfg);

// Fills a routed run: after each task t, task j's test prototype is matched against the pool of
// tasks 0..t and `classify_with(i, j)` labels task j's test nodes with task i's model.
// `learn(t)` trains task t. Prototypes are built from training nodes.
void routed_protocol(const TaskStream& stream, const RunConfig& cfg, Profiling mode, RunResult& result,
                     PhaseClock& clock, PrototypePool* pool_out, const std::function<void(std::size_t)>& learn,
                     const std::function<std::vector<int>(std::size_t, std::size_t)>& classify_with);

// Task-id accuracy per task, metrics and snapshot.
void finalize(RunResult& result, const RunConfig& cfg);

}  // namespace tpp::detail
