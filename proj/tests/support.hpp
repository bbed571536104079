#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <unistd.h>

#include "tsawf/rng.hpp"
#include "tsawf/trace.hpp"

namespace tsawf::testing {

/// Gaussian random walk of length n.
inline std::vector<double> random_walk(Rng& rng, std::size_t n) {
  std::vector<double> v(n);
  double x = 0.0;
  for (auto& e : v) e = (x += standard_normal(rng));
  return v;
}

inline std::vector<double> uniform_vector(Rng& rng, std::size_t n, double lo = -1.0, double hi = 1.0) {
  std::vector<double> v(n);
  for (auto& e : v) e = uniform_real(rng, lo, hi);
  return v;
}

/// Trace with increasing integer-ms times and random directions.
inline Trace random_trace(Rng& rng, std::size_t n, double out_probability = 0.5) {
  std::vector<PacketEvent> ev(n);
  double t = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    ev[i].time = t;
    ev[i].direction = uniform01(rng) < out_probability ? Direction::Outgoing : Direction::Incoming;
    t += static_cast<double>(1 + uniform_index(rng, 20));
  }
  return Trace(std::move(ev));
}

inline Trace make_trace(std::initializer_list<std::pair<double, int>> items) {
  std::vector<PacketEvent> ev;
  for (auto [t, d] : items) ev.push_back({t, d > 0 ? Direction::Outgoing : Direction::Incoming});
  return Trace(std::move(ev));
}

/// Fresh empty directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    static int counter = 0;
    path_ = std::filesystem::temp_directory_path() /
            ("tsawf_test_" + tag + "_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
    std::filesystem::remove_all(path_);
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::string str() const { return path_.string(); }

 private:
  std::filesystem::path path_;
};

}  // namespace tsawf::testing
