#pragma once

#include <cstdint>
#include <cstring>
#include <span>
#include <string>
#include <string_view>

namespace tsawf {

/// Incremental 64-bit FNV-1a. Used for cache keys and schema fingerprints,
/// never for anything adversarial.
class Fnv1a {
 public:
  Fnv1a& bytes(const void* data, std::size_t n) noexcept {
    const auto* p = static_cast<const unsigned char*>(data);
    for (std::size_t i = 0; i < n; ++i) {
      state_ ^= p[i];
      state_ *= 0x100000001b3ULL;
    }
    return *this;
  }
  Fnv1a& str(std::string_view s) noexcept {
    u64(s.size());
    return bytes(s.data(), s.size());
  }
  Fnv1a& u64(std::uint64_t v) noexcept { return bytes(&v, sizeof v); }
  Fnv1a& f64(double v) noexcept {
    if (v == 0.0) v = 0.0;  // fold -0
    return bytes(&v, sizeof v);
  }
  Fnv1a& f64s(std::span<const double> v) noexcept {
    u64(v.size());
    for (double x : v) f64(x);
    return *this;
  }

  std::uint64_t value() const noexcept { return state_; }

 private:
  std::uint64_t state_ = 0xcbf29ce484222325ULL;
};

std::string hex64(std::uint64_t v);

}  // namespace tsawf
