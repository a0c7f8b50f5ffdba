#include "tpp/binary_io.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <sstream>

#include "tpp/error.hpp"

namespace tpp::binary {

namespace {

void put_le(std::string& buf, std::uint64_t v, int width) {
  for (int i = 0; i < width; ++i) {
    buf.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
  }
}

}  // namespace

void Writer::bytes(std::string_view raw) { buf_.append(raw); }
void Writer::u64(std::uint64_t v) { put_le(buf_, v, 8); }
void Writer::f64(double v) { put_le(buf_, std::bit_cast<std::uint64_t>(v), 8); }
void Writer::f32(float v) { put_le(buf_, std::bit_cast<std::uint32_t>(v), 4); }

void Writer::matrix(const Matrix& m) {
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) f64(m(i, j));
  }
}

void Reader::need(std::size_t n) const {
  if (remaining() < n) {
    throw IoError("unexpected end of data: need " + std::to_string(n) + " bytes, have " +
                  std::to_string(remaining()));
  }
}

std::string Reader::bytes(std::size_t n) {
  need(n);
  std::string out = data_.substr(pos_, n);
  pos_ += n;
  return out;
}

std::uint64_t Reader::u64() {
  need(8);
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i) {
    v |= static_cast<std::uint64_t>(static_cast<unsigned char>(data_[pos_ + i])) << (8 * i);
  }
  pos_ += 8;
  return v;
}

double Reader::f64() { return std::bit_cast<double>(u64()); }

float Reader::f32() {
  need(4);
  std::uint32_t v = 0;
  for (int i = 0; i < 4; ++i) {
    v |= static_cast<std::uint32_t>(static_cast<unsigned char>(data_[pos_ + i])) << (8 * i);
  }
  pos_ += 4;
  return std::bit_cast<float>(v);
}

Matrix Reader::matrix(std::size_t rows, std::size_t cols) {
  need(rows * cols * 8);
  Matrix m(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) m(i, j) = f64();
  }
  return m;
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file_atomic(const std::filesystem::path& path, std::string_view contents) {
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write " + tmp.string());
    out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
    if (!out) throw IoError("short write to " + tmp.string());
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) throw IoError("cannot rename " + tmp.string() + " -> " + path.string() + ": " + ec.message());
}

std::uint64_t fingerprint(std::span<const double> values, std::uint64_t seed) {
  std::uint64_t h = seed;
  for (double v : values) {
    const auto bits = std::bit_cast<std::uint64_t>(v);
    for (int i = 0; i < 8; ++i) {
      h ^= (bits >> (8 * i)) & 0xff;
      h *= 0x100000001b3ULL;
    }
  }
  return h;
}

std::uint64_t fingerprint(const Matrix& m, std::uint64_t seed) {
  std::uint64_t h = fingerprint(std::span<const double>(m.data(), static_cast<std::size_t>(m.size())), seed);
  // fold the shape in so a reshaped copy does not collide
  const double shape[2] = {static_cast<double>(m.rows()), static_cast<double>(m.cols())};
  return fingerprint(std::span<const double>(shape, 2), h);
}

}  // namespace tpp::binary
