#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <random>
#include <initializer_list>

namespace tsawf {

/// All randomness in the toolkit flows through explicitly passed engines of this type.
using Rng = std::mt19937_64;

inline std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Derives an independent stream seed from a base seed and a path of stream ids
/// (class id, sample index, ...). Parallel and serial schedules agree because
/// no stream depends on how many draws another stream made.
inline std::uint64_t derive_seed(std::uint64_t base, std::initializer_list<std::uint64_t> path) noexcept {
  std::uint64_t s = splitmix64(base);
  for (auto p : path) s = splitmix64(s ^ splitmix64(p + 0x632be59bd9b4e019ULL));
  return s;
}

inline Rng make_rng(std::uint64_t base, std::initializer_list<std::uint64_t> path = {}) {
  return Rng(derive_seed(base, path));
}

/// Uniform index in [0, n). Avoids std::uniform_int_distribution so draws are
/// identical across standard library implementations.
inline std::size_t uniform_index(Rng& rng, std::size_t n) {
  // Lemire-style rejection on 64-bit draws.
  const std::uint64_t bound = n;
  const std::uint64_t limit = UINT64_MAX - UINT64_MAX % bound;
  std::uint64_t x;
  do {
    x = rng();
  } while (x >= limit);
  return static_cast<std::size_t>(x % bound);
}

/// Uniform real in [0, 1) built from the top 53 bits of one draw.
inline double uniform01(Rng& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

inline double uniform_real(Rng& rng, double lo, double hi) { return lo + (hi - lo) * uniform01(rng); }

/// Box-Muller standard normal; one value per call (the pair's second half is dropped).
inline double standard_normal(Rng& rng) {
  double u1 = uniform01(rng);
  while (u1 <= 0.0) u1 = uniform01(rng);
  const double u2 = uniform01(rng);
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586 * u2);
}

inline double exponential(Rng& rng, double mean) { return -mean * std::log1p(-uniform01(rng)); }

}  // namespace tsawf
