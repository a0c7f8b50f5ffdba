#include "tpp/profiler.hpp"

#include <string>

#include "tpp/binary_io.hpp"
#include "tpp/error.hpp"

namespace tpp {

namespace {
constexpr std::string_view kPoolMagic = "TPPPOOL1";
}

void PrototypePool::add(TaskPrototype p) {
  if (p.task_id != static_cast<int>(prototypes_.size()) + 1) {
    throw InvalidArgument("PrototypePool: expected task id " + std::to_string(prototypes_.size() + 1) +
                          ", got " + std::to_string(p.task_id));
  }
  if (!prototypes_.empty() && p.vector.size() != prototypes_.front().vector.size()) {
    throw InvalidArgument("PrototypePool: dimensionality mismatch");
  }
  if (!p.vector.allFinite()) throw InvalidArgument("PrototypePool: non-finite prototype");
  prototypes_.push_back(std::move(p));
}

std::string PrototypePool::serialize() const {
  binary::Writer w;
  w.bytes(kPoolMagic);
  for (const TaskPrototype& p : prototypes_) {
    w.u64(static_cast<std::uint64_t>(p.task_id));
    w.u64(static_cast<std::uint64_t>(p.steps));
    w.u64(static_cast<std::uint64_t>(p.vector.size()));
    for (Eigen::Index j = 0; j < p.vector.size(); ++j) w.f64(p.vector[j]);
  }
  return w.data();
}

PrototypePool PrototypePool::deserialize(std::string data) {
  binary::Reader r(std::move(data));
  if (r.remaining() < kPoolMagic.size() || r.bytes(kPoolMagic.size()) != kPoolMagic) {
    throw IoError("prototype pool: bad magic header");
  }
  PrototypePool pool;
  while (!r.at_end()) {
    TaskPrototype p;
    p.task_id = static_cast<int>(r.u64());
    p.steps = static_cast<int>(r.u64());
    const auto f = r.u64();
    if (f > r.remaining() / 8) throw IoError("prototype pool: truncated record");
    p.vector.resize(static_cast<Eigen::Index>(f));
    for (Eigen::Index j = 0; j < p.vector.size(); ++j) p.vector[j] = r.f64();
    pool.add(std::move(p));
  }
  return pool;
}

void PrototypePool::save(const std::filesystem::path& path) const {
  binary::write_file_atomic(path, serialize());
}

PrototypePool PrototypePool::load(const std::filesystem::path& path) {
  return deserialize(binary::read_file(path));
}

}  // namespace tpp
