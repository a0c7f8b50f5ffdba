#include <cmath>
#include <limits>
#include <map>
#include <sstream>
#include <string>

#include "tpp/error.hpp"
#include "tpp/harness.hpp"

namespace tpp {

AccuracyMatrix::AccuracyMatrix(std::size_t tasks)
    : tasks_(tasks), values_(tasks * tasks, std::numeric_limits<double>::quiet_NaN()) {}

void AccuracyMatrix::set(std::size_t t, std::size_t j, double value) {
  if (t >= tasks_ || j > t) throw InvalidArgument("AccuracyMatrix: entry (" + std::to_string(t) + ", " + std::to_string(j) + ") is undefined");
  if (!(value >= 0.0 && value <= 1.0)) throw InvalidArgument("AccuracyMatrix: accuracy outside [0, 1]");
  values_[t * tasks_ + j] = value;
}

bool AccuracyMatrix::has(std::size_t t, std::size_t j) const {
  return t < tasks_ && j <= t && !std::isnan(values_[t * tasks_ + j]);
}

double AccuracyMatrix::at(std::size_t t, std::size_t j) const {
  if (!has(t, j)) throw InvalidArgument("AccuracyMatrix: entry (" + std::to_string(t) + ", " + std::to_string(j) + ") is not set");
  return values_[t * tasks_ + j];
}

bool AccuracyMatrix::complete() const {
  for (std::size_t t = 0; t < tasks_; ++t) {
    for (std::size_t j = 0; j <= t; ++j) {
      if (!has(t, j)) return false;
    }
  }
  return true;
}

std::string AccuracyMatrix::to_csv() const {
  std::ostringstream out;
  out.precision(17);
  out << "after_task";
  for (std::size_t j = 0; j < tasks_; ++j) out << ",task_" << j + 1;
  out << '\n';
  for (std::size_t t = 0; t < tasks_; ++t) {
    out << t + 1;
    for (std::size_t j = 0; j < tasks_; ++j) {
      out << ',';
      if (has(t, j)) out << at(t, j);
    }
    out << '\n';
  }
  return out.str();
}

bool operator==(const AccuracyMatrix& a, const AccuracyMatrix& b) {
  if (a.tasks_ != b.tasks_) return false;
  for (std::size_t i = 0; i < a.values_.size(); ++i) {
    const double x = a.values_[i];
    const double y = b.values_[i];
    if (std::isnan(x) != std::isnan(y)) return false;
    if (!std::isnan(x) && x != y) return false;
  }
  return true;
}

Metrics compute_metrics(const AccuracyMatrix& m) {
  const std::size_t T = m.tasks();
  if (T == 0) throw InvalidArgument("compute_metrics: empty accuracy matrix");
  if (!m.complete()) throw InvalidArgument("compute_metrics: accuracy matrix is not fully populated");
  Metrics out;
  double sum = 0.0;
  for (std::size_t j = 0; j < T; ++j) sum += m.at(T - 1, j);
  out.aa = sum / static_cast<double>(T);
  if (T > 1) {
    double drop = 0.0;
    for (std::size_t j = 0; j + 1 < T; ++j) drop += m.at(T - 1, j) - m.at(j, j);
    out.af = drop / static_cast<double>(T - 1);
  }
  return out;
}

double accuracy(std::span<const int> predicted, std::span<const int> truth, bool balanced) {
  if (predicted.size() != truth.size()) throw InvalidArgument("accuracy: size mismatch");
  if (truth.empty()) throw InvalidArgument("accuracy: no samples");
  if (!balanced) {
    std::size_t hits = 0;
    for (std::size_t i = 0; i < truth.size(); ++i) hits += predicted[i] == truth[i];
    return static_cast<double>(hits) / static_cast<double>(truth.size());
  }
  std::map<int, std::pair<std::size_t, std::size_t>> per_class;  // hits, total
  for (std::size_t i = 0; i < truth.size(); ++i) {
    auto& [hits, total] = per_class[truth[i]];
    hits += predicted[i] == truth[i];
    ++total;
  }
  double recall = 0.0;
  for (const auto& [c, ht] : per_class) recall += static_cast<double>(ht.first) / static_cast<double>(ht.second);
  return recall / static_cast<double>(per_class.size());
}

}  // namespace tpp
