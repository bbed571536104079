#include "tsawf/sliding.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <map>
#include <mutex>
#include <numeric>

#include "tsawf/error.hpp"

namespace tsawf {

namespace {

// FFTW's planner is not thread-safe; execution on distinct plans is.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

struct Plan {
  explicit Plan(std::size_t n) : size(n) {
    real = static_cast<double*>(fftw_malloc(sizeof(double) * n));
    spec = static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * (n / 2 + 1)));
    std::lock_guard lock(planner_mutex());
    forward = fftw_plan_dft_r2c_1d(static_cast<int>(n), real, spec, FFTW_ESTIMATE);
    inverse = fftw_plan_dft_c2r_1d(static_cast<int>(n), spec, real, FFTW_ESTIMATE);
  }
  ~Plan() {
    {
      std::lock_guard lock(planner_mutex());
      fftw_destroy_plan(forward);
      fftw_destroy_plan(inverse);
    }
    fftw_free(real);
    fftw_free(spec);
  }
  Plan(const Plan&) = delete;
  Plan& operator=(const Plan&) = delete;

  std::size_t size;
  double* real;
  fftw_complex* spec;
  fftw_plan forward;
  fftw_plan inverse;
};

Plan& plan_for(std::size_t n) {
  thread_local std::map<std::size_t, std::unique_ptr<Plan>> cache;
  auto& slot = cache[n];
  if (!slot) slot = std::make_unique<Plan>(n);
  return *slot;
}

std::size_t next_pow2(std::size_t n) {
  std::size_t p = 1;
  while (p < n) p <<= 1;
  return p;
}

// Per-window mean and variance from long-double prefix sums.
struct WindowMoments {
  std::vector<long double> s1, s2;

  explicit WindowMoments(std::span<const double> x) : s1(x.size() + 1, 0.0L), s2(x.size() + 1, 0.0L) {
    for (std::size_t i = 0; i < x.size(); ++i) {
      s1[i + 1] = s1[i] + x[i];
      s2[i + 1] = s2[i] + static_cast<long double>(x[i]) * x[i];
    }
  }
  long double sum(std::size_t i, std::size_t m) const { return s1[i + m] - s1[i]; }
  long double sumsq(std::size_t i, std::size_t m) const { return s2[i + m] - s2[i]; }
};

// A sequence counts as constant when its variance is negligible against its
// energy; the threshold sits far above prefix-sum round-off.
bool is_constant(long double var, long double meansq) { return var <= 1e-12L * std::max(1.0L, meansq); }

constexpr std::size_t kRefineCandidates = 8;

void validate(std::span<const double> query, std::span<const double> series, const SlidingOptions& o) {
  if (query.empty() || series.empty()) fail(Errc::InvalidLength, "sliding search on an empty sequence");
  if (query.size() > series.size())
    fail(Errc::WindowTooLarge, "query (" + std::to_string(query.size()) + ") longer than series (" +
                                   std::to_string(series.size()) + ")");
  if (!o.weights.empty() && o.weights.size() != query.size())
    fail(Errc::LengthMismatch, "weight vector length differs from query length");
  if (!o.weights.empty() && o.normalized)
    fail(Errc::InvalidConfig, "weighted sliding search cannot be z-normalized");
  if (o.stride < 1) fail(Errc::InvalidConfig, "stride must be >= 1");
}

}  // namespace

// ---------------------------------------------------------------------------

struct FftCorrelator::Impl {
  std::size_t n;
  std::size_t m;
  std::size_t fft_size;
  std::vector<std::complex<double>> series_spec;
};

FftCorrelator::FftCorrelator(std::span<const double> series, std::size_t query_len)
    : impl_(std::make_unique<Impl>()) {
  impl_->n = series.size();
  impl_->m = query_len;
  impl_->fft_size = next_pow2(series.size());
  Plan& p = plan_for(impl_->fft_size);
  std::fill(p.real, p.real + p.size, 0.0);
  std::copy(series.begin(), series.end(), p.real);
  fftw_execute(p.forward);
  impl_->series_spec.resize(p.size / 2 + 1);
  for (std::size_t k = 0; k < impl_->series_spec.size(); ++k)
    impl_->series_spec[k] = {p.spec[k][0], p.spec[k][1]};
}

FftCorrelator::~FftCorrelator() = default;

void FftCorrelator::correlate(std::span<const double> query, std::vector<double>& out) const {
  const auto& im = *impl_;
  Plan& p = plan_for(im.fft_size);
  std::fill(p.real, p.real + p.size, 0.0);
  std::copy(query.begin(), query.end(), p.real);
  fftw_execute(p.forward);
  // conj(Q) * T gives the circular cross-correlation; no wrap-around reaches
  // offsets <= n - m because fft_size >= n.
  for (std::size_t k = 0; k < im.series_spec.size(); ++k) {
    const std::complex<double> q(p.spec[k][0], -p.spec[k][1]);
    const std::complex<double> r = q * im.series_spec[k];
    p.spec[k][0] = r.real();
    p.spec[k][1] = r.imag();
  }
  fftw_execute(p.inverse);
  const std::size_t count = im.n - query.size() + 1;
  out.resize(count);
  const double scale = 1.0 / static_cast<double>(p.size);
  for (std::size_t i = 0; i < count; ++i) out[i] = p.real[i] * scale;
}

// ---------------------------------------------------------------------------

std::size_t sliding_offset_count(std::size_t query_len, std::size_t series_len, std::size_t stride) {
  if (query_len == 0 || query_len > series_len || stride == 0) return 0;
  return (series_len - query_len) / stride + 1;
}

double window_distance(std::span<const double> query, std::span<const double> window,
                       const SlidingOptions& o) {
  const std::size_t m = query.size();
  if (o.normalized) {
    auto moments = [m](std::span<const double> x) {
      long double mean = 0.0L;
      for (double v : x) mean += v;
      mean /= static_cast<long double>(m);
      long double var = 0.0L, meansq = 0.0L;
      for (double v : x) {
        var += (v - mean) * (v - mean);
        meansq += static_cast<long double>(v) * v;
      }
      return std::tuple{mean, var / static_cast<long double>(m), meansq / static_cast<long double>(m)};
    };
    auto [mq, vq, sq] = moments(query);
    auto [mw, vw, sw] = moments(window);
    const bool cq = is_constant(vq, sq);
    const bool cw = is_constant(vw, sw);
    if (cq && cw) return 0.0;
    if (cq || cw) return std::sqrt(static_cast<double>(m));
    const long double sdq = std::sqrt(vq), sdw = std::sqrt(vw);
    long double acc = 0.0L;
    for (std::size_t k = 0; k < m; ++k) {
      const long double d = (window[k] - mw) / sdw - (query[k] - mq) / sdq;
      acc += d * d;
    }
    return std::sqrt(static_cast<double>(acc));
  }
  const double q0 = o.rebase ? query[0] : 0.0;
  const double w0 = o.rebase ? window[0] : 0.0;
  double acc = 0.0;
  for (std::size_t k = 0; k < m; ++k) {
    const double d = (window[k] - w0) - (query[k] - q0);
    acc += (o.weights.empty() ? 1.0 : o.weights[k]) * d * d;
  }
  return std::sqrt(acc);
}

namespace {

void naive_profile(std::span<const double> query, std::span<const double> series, const SlidingOptions& o,
                   std::vector<double>& profile) {
  const std::size_t m = query.size();
  const std::size_t count = sliding_offset_count(m, series.size(), o.stride);
  profile.resize(count);
  for (std::size_t j = 0; j < count; ++j) profile[j] = window_distance(query, series.subspan(j * o.stride, m), o);
}

void fft_profile(std::span<const double> query, std::span<const double> series, const SlidingOptions& o,
                 std::vector<double>& profile) {
  const std::size_t m = query.size();
  const std::size_t n = series.size();
  const std::size_t count = sliding_offset_count(m, n, o.stride);
  profile.resize(count);

  // Shift both sequences by the series mean; every mode below is invariant
  // to a common shift and the smaller magnitudes keep round-off down.
  const double center = std::accumulate(series.begin(), series.end(), 0.0) / static_cast<double>(n);
  std::vector<double> t(n);
  for (std::size_t i = 0; i < n; ++i) t[i] = series[i] - center;

  const FftCorrelator corr_t(t, m);
  const WindowMoments mom(t);
  const long double lm = static_cast<long double>(m);

  if (o.normalized) {
    long double mq = 0.0L;
    for (double v : query) mq += v;
    mq /= lm;
    long double vq = 0.0L, sq = 0.0L;
    for (double v : query) {
      vq += (v - mq) * (v - mq);
      sq += static_cast<long double>(v) * v;
    }
    vq /= lm;
    sq /= lm;
    const bool query_constant = is_constant(vq, sq);
    std::vector<double> zq(m, 0.0);
    if (!query_constant) {
      const long double sd = std::sqrt(vq);
      for (std::size_t k = 0; k < m; ++k) zq[k] = static_cast<double>((query[k] - mq) / sd);
    }
    std::vector<double> qt;
    if (!query_constant) corr_t.correlate(zq, qt);
    for (std::size_t j = 0; j < count; ++j) {
      const std::size_t i = j * o.stride;
      // Window moments are taken on the uncentered values for the constancy
      // test so it matches the direct evaluation.
      const long double mw_c = mom.sum(i, m) / lm;
      long double vw = mom.sumsq(i, m) / lm - mw_c * mw_c;
      if (vw < 0.0L) vw = 0.0L;
      const long double mw = mw_c + center;
      const long double sw = vw + mw * mw;

      const bool window_constant = is_constant(vw, sw);
      if (query_constant && window_constant) {
        profile[j] = 0.0;
      } else if (query_constant || window_constant) {
        profile[j] = std::sqrt(static_cast<double>(m));
      } else {
        long double c = qt[i] / (lm * std::sqrt(vw));
        c = std::clamp(c, -1.0L, 1.0L);
        profile[j] = std::sqrt(static_cast<double>(std::max(0.0L, 2.0L * lm * (1.0L - c))));
      }
    }
    return;
  }

  // Raw (optionally rebased, optionally weighted):
  //   sum_k w_k (a_k - a0 - qq_k)^2
  //     = sum w a^2 - 2 a0 sum w a + a0^2 sum w - 2 sum w qq a + 2 a0 sum w qq + sum w qq^2
  // with a0 = first window value when rebasing (else 0) and qq the query
  // rebased to its first value (else shifted by the same center as the series).
  std::vector<double> qq(m);
  for (std::size_t k = 0; k < m; ++k) qq[k] = o.rebase ? query[k] - query[0] : query[k] - center;
  const bool weighted = !o.weights.empty();
  long double sw = 0.0L, swq = 0.0L, swqq = 0.0L;
  std::vector<double> wq(m);
  for (std::size_t k = 0; k < m; ++k) {
    const long double w = weighted ? o.weights[k] : 1.0L;
    sw += w;
    swq += w * qq[k];
    swqq += w * qq[k] * qq[k];
    wq[k] = static_cast<double>(w * qq[k]);
  }
  std::vector<double> cross;
  corr_t.correlate(wq, cross);

  std::vector<double> wa, waa;
  if (weighted) {
    std::vector<double> t2(n);
    for (std::size_t i = 0; i < n; ++i) t2[i] = t[i] * t[i];
    const FftCorrelator corr_t2(t2, m);
    corr_t.correlate(o.weights, wa);
    corr_t2.correlate(o.weights, waa);
  }
  for (std::size_t j = 0; j < count; ++j) {
    const std::size_t i = j * o.stride;
    const long double a0 = o.rebase ? t[i] : 0.0L;
    const long double s_wa = weighted ? static_cast<long double>(wa[i]) : mom.sum(i, m);
    const long double s_waa = weighted ? static_cast<long double>(waa[i]) : mom.sumsq(i, m);
    const long double d2 = s_waa - 2.0L * a0 * s_wa + a0 * a0 * sw - 2.0L * cross[i] + 2.0L * a0 * swq + swqq;
    profile[j] = std::sqrt(static_cast<double>(std::max(0.0L, d2)));
  }
}

}  // namespace

SlidingResult sliding_min_euclidean(std::span<const double> query, std::span<const double> series,
                                    const SlidingOptions& options) {
  validate(query, series, options);
  const std::size_t m = query.size();
  const std::size_t count = sliding_offset_count(m, series.size(), options.stride);

  SlidingPath path = options.path;
  if (path == SlidingPath::Auto) path = (m <= 8 || count * m <= (1u << 15)) ? SlidingPath::Naive : SlidingPath::Fft;

  std::vector<double> profile;
  if (path == SlidingPath::Naive) {
    naive_profile(query, series, options, profile);
  } else {
    fft_profile(query, series, options, profile);
    // Re-evaluate the best few offsets directly so the minimum is exact.
    std::vector<std::size_t> order(count);
    std::iota(order.begin(), order.end(), std::size_t{0});
    const std::size_t k = std::min(kRefineCandidates, count);
    std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(k), order.end(),
                      [&](std::size_t a, std::size_t b) {
                        return profile[a] < profile[b] || (profile[a] == profile[b] && a < b);
                      });
    for (std::size_t r = 0; r < k; ++r) {
      const std::size_t j = order[r];
      profile[j] = window_distance(query, series.subspan(j * options.stride, m), options);
    }
  }

  SlidingResult result;
  result.min_distance = std::numeric_limits<double>::infinity();
  for (std::size_t j = 0; j < count; ++j) {
    if (profile[j] < result.min_distance) {
      result.min_distance = profile[j];
      result.argmin_offset = j * options.stride;
    }
  }
  if (options.keep_profile) result.profile = std::move(profile);
  return result;
}

}  // namespace tsawf
