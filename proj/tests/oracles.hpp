#pragma once

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <optional>
#include <vector>

/// Reference implementations written independently of the library, shared by
/// the unit tests and the acceptance suite.
namespace tsawf::testing {

// Direct per-offset evaluation, written independently of the library.
inline std::vector<double> oracle_profile(const std::vector<double>& q, const std::vector<double>& t, bool normalized,
                                   bool rebase, const std::vector<double>& w = {}) {
  const std::size_t m = q.size();
  auto znorm = [m](const double* x, std::vector<double>& out) {
    double mean = 0, sq = 0;
    for (std::size_t k = 0; k < m; ++k) mean += x[k];
    mean /= m;
    for (std::size_t k = 0; k < m; ++k) sq += x[k] * x[k];
    double var = 0;
    for (std::size_t k = 0; k < m; ++k) var += (x[k] - mean) * (x[k] - mean);
    var /= m;
    if (var <= 1e-12 * std::max(1.0, sq / m)) return false;
    out.resize(m);
    for (std::size_t k = 0; k < m; ++k) out[k] = (x[k] - mean) / std::sqrt(var);
    return true;
  };
  std::vector<double> prof;
  std::vector<double> zq, zw;
  const bool q_ok = normalized && znorm(q.data(), zq);
  for (std::size_t j = 0; j + m <= t.size(); ++j) {
    double acc = 0;
    if (normalized) {
      const bool w_ok = znorm(t.data() + j, zw);
      if (!q_ok && !w_ok) {
        prof.push_back(0.0);
        continue;
      }
      if (!q_ok || !w_ok) {
        prof.push_back(std::sqrt(double(m)));
        continue;
      }
      for (std::size_t k = 0; k < m; ++k) acc += (zq[k] - zw[k]) * (zq[k] - zw[k]);
    } else {
      for (std::size_t k = 0; k < m; ++k) {
        const double d = (t[j + k] - (rebase ? t[j] : 0.0)) - (q[k] - (rebase ? q[0] : 0.0));
        acc += (w.empty() ? 1.0 : w[k]) * d * d;
      }
    }
    prof.push_back(std::sqrt(acc));
  }
  return prof;
}

// Full (n+1) x (m+1) cost matrix with an explicit band test per cell.
inline double oracle_dtw(const std::vector<double>& a, const std::vector<double>& b, std::optional<std::size_t> window) {
  const std::size_t n = a.size(), m = b.size();
  const double inf = std::numeric_limits<double>::infinity();
  const long band = window ? std::max<long>(static_cast<long>(*window), std::labs(long(n) - long(m))) : 1L << 40;
  std::vector<std::vector<double>> D(n + 1, std::vector<double>(m + 1, inf));
  D[0][0] = 0;
  for (std::size_t i = 1; i <= n; ++i)
    for (std::size_t j = 1; j <= m; ++j) {
      if (std::labs(long(i) - long(j)) > band) continue;
      const double c = (a[i - 1] - b[j - 1]) * (a[i - 1] - b[j - 1]);
      D[i][j] = c + std::min(D[i - 1][j - 1], std::min(D[i - 1][j], D[i][j - 1]));
    }
  return std::sqrt(D[n][m]);
}

}  // namespace tsawf::testing
