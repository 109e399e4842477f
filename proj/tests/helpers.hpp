#pragma once

#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>

#include "tnt/event.hpp"
#include "tnt/sim.hpp"

namespace tnt::test {

// Integer-pixel microsecond stream, canonical order.
inline EventStream random_raw_stream(std::mt19937_64& rng, int n, SensorGeometry g = {34, 34},
                                     std::uint64_t span_us = 100000) {
  EventStream s;
  s.geometry = g;
  for (int i = 0; i < n; ++i) {
    Event e;
    e.t = static_cast<double>(rng() % (span_us + 1));
    e.x = static_cast<double>(rng() % static_cast<unsigned>(g.width));
    e.y = static_cast<double>(rng() % static_cast<unsigned>(g.height));
    e.p = (rng() & 1) ? 1 : -1;
    s.events.push_back(e);
  }
  return canonicalize(std::move(s));
}

// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    std::random_device rd;
    path_ = std::filesystem::temp_directory_path() /
            ("tnt_" + tag + "_" + std::to_string(rd()) + std::to_string(rd()));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

inline std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void spit(const std::filesystem::path& p, const std::string& bytes) {
  std::ofstream out(p, std::ios::binary);
  out << bytes;
}

}  // namespace tnt::test
