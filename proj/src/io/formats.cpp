#include <charconv>
#include <string>

#include <nlohmann/json.hpp>

#include "tpp/binary_io.hpp"
#include "tpp/io.hpp"

namespace tpp {

namespace {

constexpr std::string_view kFeatureMagic = "GCILF1";

template <typename T>
T parse_number(std::string_view token, std::size_t line, const char* what) {
  T value{};
  const auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), value);
  if (ec != std::errc() || ptr != token.data() + token.size()) {
    throw FormatError(std::string(what) + " line " + std::to_string(line) + ": cannot parse '" + std::string(token) + "'");
  }
  return value;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

// Calls fn(line_number, line) for every non-blank line.
template <typename Fn>
void for_each_line(std::string_view text, Fn fn) {
  std::size_t number = 0;
  while (!text.empty()) {
    const auto end = text.find('\n');
    const std::string_view line = trim(text.substr(0, end));
    ++number;
    if (!line.empty()) fn(number, line);
    if (end == std::string_view::npos) break;
    text.remove_prefix(end + 1);
  }
}

}  // namespace

std::string encode_features(const FeatureTable& t) {
  if (t.values.size() != t.rows * t.cols) throw InvalidArgument("encode_features: value count does not match shape");
  binary::Writer w;
  w.bytes(kFeatureMagic);
  w.u64(t.rows);
  w.u64(t.cols);
  for (float v : t.values) w.f32(v);
  return w.data();
}

FeatureTable decode_features(std::string data) {
  binary::Reader r(std::move(data));
  if (r.remaining() < kFeatureMagic.size() + 16 || r.bytes(kFeatureMagic.size()) != kFeatureMagic) {
    throw FormatError("features: missing GCILF1 header");
  }
  FeatureTable t;
  t.rows = r.u64();
  t.cols = r.u64();
  if (t.cols != 0 && t.rows > r.remaining() / 4 / t.cols) throw FormatError("features: payload shorter than header says");
  if (r.remaining() != 4 * t.rows * t.cols) throw FormatError("features: payload size does not match header");
  t.values.resize(t.rows * t.cols);
  for (float& v : t.values) v = r.f32();
  return t;
}

std::string encode_edges(std::span<const Edge> edges) {
  std::string out;
  for (const Edge& e : edges) {
    out += std::to_string(e.u);
    out += '\t';
    out += std::to_string(e.v);
    out += '\n';
  }
  return out;
}

std::vector<Edge> decode_edges(std::string_view text) {
  std::vector<Edge> out;
  for_each_line(text, [&](std::size_t n, std::string_view line) {
    const auto tab = line.find_first_of("\t ");
    if (tab == std::string_view::npos) throw FormatError("edges line " + std::to_string(n) + ": expected two node ids");
    out.push_back({parse_number<NodeId>(trim(line.substr(0, tab)), n, "edges"),
                   parse_number<NodeId>(trim(line.substr(tab + 1)), n, "edges")});
  });
  return out;
}

std::string encode_labels(std::span<const int> labels) {
  std::string out;
  for (int y : labels) {
    out += std::to_string(y);
    out += '\n';
  }
  return out;
}

std::vector<int> decode_labels(std::string_view text) {
  std::vector<int> out;
  for_each_line(text, [&](std::size_t n, std::string_view line) { out.push_back(parse_number<int>(line, n, "labels")); });
  return out;
}

std::string encode_task_spec(const std::vector<std::vector<int>>& groups) {
  return nlohmann::json{{"tasks", groups}}.dump() + "\n";
}

std::vector<std::vector<int>> decode_task_spec(std::string_view text) {
  try {
    auto groups = nlohmann::json::parse(text).at("tasks").get<std::vector<std::vector<int>>>();
    if (groups.empty()) throw FormatError("task spec: no tasks");
    for (const auto& g : groups) {
      if (g.empty()) throw FormatError("task spec: empty class group");
    }
    return groups;
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("task spec: ") + e.what());
  }
}

}  // namespace tpp
