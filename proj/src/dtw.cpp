#include "tsawf/dtw.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "tsawf/error.hpp"

namespace tsawf {

namespace {

template <class ValueA, class ValueB>
double dtw_impl(std::size_t n, std::size_t m, ValueA value_a, ValueB value_b, std::optional<std::size_t> window) {
  if (n == 0 || m == 0) fail(Errc::InvalidLength, "dtw on an empty sequence");
  const std::size_t diff = n > m ? n - m : m - n;
  const std::size_t band = window ? std::max(*window, diff) : std::max(n, m);
  constexpr double inf = std::numeric_limits<double>::infinity();

  // Two rolling rows over j in [0, m]; column 0 is the virtual boundary.
  std::vector<double> prev(m + 1, inf), cur(m + 1, inf);
  prev[0] = 0.0;
  for (std::size_t i = 1; i <= n; ++i) {
    std::fill(cur.begin(), cur.end(), inf);
    const std::size_t lo = i > band ? i - band : 1;
    const std::size_t hi = std::min(m, i + band);
    const double ai = value_a(i - 1);
    for (std::size_t j = lo; j <= hi; ++j) {
      const double d = ai - value_b(j - 1);
      const double best = std::min({prev[j - 1], prev[j], cur[j - 1]});
      cur[j] = d * d + best;
    }
    std::swap(prev, cur);
  }
  return std::sqrt(prev[m]);
}

}  // namespace

double dtw(std::span<const double> a, std::span<const double> b, std::optional<std::size_t> window) {
  auto va = [&](std::size_t i) { return a[i]; };
  auto vb = [&](std::size_t j) { return b[j]; };
  return dtw_impl(a.size(), b.size(), va, vb, window);
}

double dtw_rebased(std::span<const double> a, std::span<const double> b, std::optional<std::size_t> window) {
  if (a.empty() || b.empty()) fail(Errc::InvalidLength, "dtw on an empty sequence");
  const double a0 = a[0], b0 = b[0];
  auto va = [&](std::size_t i) { return a[i] - a0; };
  auto vb = [&](std::size_t j) { return b[j] - b0; };
  return dtw_impl(a.size(), b.size(), va, vb, window);
}

}  // namespace tsawf
