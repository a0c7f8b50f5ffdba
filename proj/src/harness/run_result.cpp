#include <cmath>

#include <nlohmann/json.hpp>

#include "tpp/binary_io.hpp"
#include "tpp/error.hpp"
#include "tpp/harness.hpp"

namespace tpp {

using nlohmann::json;

double RunResult::overall_task_id_accuracy() const {
  std::size_t hits = 0;
  std::size_t total = 0;
  for (std::size_t t = 0; t < predicted_task_ids.size(); ++t) {
    for (std::size_t j = 0; j < predicted_task_ids[t].size(); ++j) {
      hits += predicted_task_ids[t][j] == static_cast<int>(j) + 1;
      ++total;
    }
  }
  return total ? static_cast<double>(hits) / static_cast<double>(total) : 0.0;
}

std::string serialize_run_result(const RunResult& r) {
  json doc;
  doc["method"] = r.method;
  doc["seed"] = r.seed;
  doc["config"] = r.config_snapshot;
  json rows = json::array();
  for (std::size_t t = 0; t < r.accuracy.tasks(); ++t) {
    json row = json::array();
    for (std::size_t j = 0; j <= t; ++j) row.push_back(r.accuracy.at(t, j));
    rows.push_back(std::move(row));
  }
  doc["accuracy"] = std::move(rows);
  doc["aa"] = r.aa;
  doc["af"] = r.af ? json(*r.af) : json(nullptr);
  doc["predicted_task_ids"] = r.predicted_task_ids;
  doc["task_id_accuracy"] = r.task_id_accuracy;
  return doc.dump(2) + "\n";
}

RunResult parse_run_result(std::string_view text) {
  RunResult r;
  try {
    const json doc = json::parse(text);
    r.method = doc.at("method").get<std::string>();
    r.seed = doc.at("seed").get<std::uint64_t>();
    r.config_snapshot = doc.at("config").get<std::string>();
    const auto& rows = doc.at("accuracy");
    r.accuracy = AccuracyMatrix(rows.size());
    for (std::size_t t = 0; t < rows.size(); ++t) {
      if (rows[t].size() != t + 1) throw IoError("run result: accuracy row " + std::to_string(t + 1) + " has wrong length");
      for (std::size_t j = 0; j <= t; ++j) r.accuracy.set(t, j, rows[t][j].get<double>());
    }
    r.aa = doc.at("aa").get<double>();
    if (!doc.at("af").is_null()) r.af = doc.at("af").get<double>();
    r.predicted_task_ids = doc.at("predicted_task_ids").get<std::vector<std::vector<int>>>();
    r.task_id_accuracy = doc.at("task_id_accuracy").get<std::vector<double>>();
  } catch (const json::exception& e) {
    throw IoError(std::string("run result: ") + e.what());
  }
  const Metrics m = compute_metrics(r.accuracy);
  if (m.aa != r.aa || m.af.has_value() != r.af.has_value() || (m.af && *m.af != *r.af)) {
    throw IoError("run result: stored AA/AF do not match the accuracy matrix");
  }
  return r;
}

std::string serialize_timings(const RunResult& r) {
  json doc = json::object();
  for (const PhaseTiming& p : r.timings) doc[p.phase] = p.seconds;
  return doc.dump(2) + "\n";
}

void write_run_outputs(const std::filesystem::path& dir, const RunResult& r) {
  std::filesystem::create_directories(dir);
  binary::write_file_atomic(dir / "result.json", serialize_run_result(r));
  binary::write_file_atomic(dir / "accuracy.csv", r.accuracy.to_csv());
  binary::write_file_atomic(dir / "timings.json", serialize_timings(r));
}

}  // namespace tpp
