#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "tpp/dense.hpp"

namespace tpp::binary {

// Little-endian byte sink.
class Writer {
 public:
  void bytes(std::string_view raw);
  void u64(std::uint64_t v);
  void f64(double v);
  void f32(float v);
  void matrix(const Matrix& m);  // row-major f64 payload, no shape

  const std::string& data() const { return buf_; }

 private:
  std::string buf_;
};

// Little-endian byte source over an in-memory buffer. Reads past the end throw IoError.
class Reader {
 public:
  explicit Reader(std::string data) : data_(std::move(data)) {}

  bool at_end() const { return pos_ == data_.size(); }
  std::size_t remaining() const { return data_.size() - pos_; }
  std::string bytes(std::size_t n);
  std::uint64_t u64();
  double f64();
  float f32();
  Matrix matrix(std::size_t rows, std::size_t cols);

 private:
  void need(std::size_t n) const;

  std::string data_;
  std::size_t pos_ = 0;
};

std::string read_file(const std::filesystem::path& path);

// Writes to a sibling temp file then renames over `path`.
void write_file_atomic(const std::filesystem::path& path, std::string_view contents);

// FNV-1a over the raw bytes of every entry.
std::uint64_t fingerprint(std::span<const double> values, std::uint64_t seed = 0xcbf29ce484222325ULL);
std::uint64_t fingerprint(const Matrix& m, std::uint64_t seed = 0xcbf29ce484222325ULL);

}  // namespace tpp::binary
