#pragma once

#include <cstddef>
#include <memory>
#include <span>
#include <vector>

namespace tsawf {

enum class SlidingPath { Auto, Fft, Naive };

struct SlidingOptions {
  /// z-normalize the query and every window (matrix-profile convention:
  /// two constant sequences are at distance 0, a constant and a
  /// non-constant one at sqrt(m)).
  bool normalized = false;
  /// Subtract the first value from the query and from each window before
  /// comparing, so a time-shifted copy matches exactly. Ignored when normalized.
  bool rebase = false;
  /// Optional per-position weights (length must equal the query length);
  /// cannot be combined with `normalized`.
  std::span<const double> weights{};
  SlidingPath path = SlidingPath::Auto;
  /// Evaluate offsets 0, stride, 2*stride, ...
  std::size_t stride = 1;
  bool keep_profile = false;
};

struct SlidingResult {
  double min_distance = 0.0;
  std::size_t argmin_offset = 0;
  /// Distance at each evaluated offset (only filled when keep_profile).
  std::vector<double> profile;
};

/// Distance from `query` to every window of `series` of the same length,
/// minimum and first offset attaining it. The FFT path computes all sliding
/// dot products in O(n log n) and then re-evaluates its few best offsets
/// exactly, so the reported minimum carries no transform round-off.
/// Throws WindowTooLarge when |query| > |series|, InvalidLength on empty input.
SlidingResult sliding_min_euclidean(std::span<const double> query, std::span<const double> series,
                                    const SlidingOptions& options = {});

/// Number of offsets evaluated for the given lengths and stride.
std::size_t sliding_offset_count(std::size_t query_len, std::size_t series_len, std::size_t stride);

/// Distance between the query and a single window, computed directly.
double window_distance(std::span<const double> query, std::span<const double> window,
                       const SlidingOptions& options);

/// Cross-correlation via FFTW: out[i] = sum_k query[k] * series[i + k] for
/// i in [0, |series| - |query|]. Transform plans are cached per thread.
class FftCorrelator {
 public:
  FftCorrelator(std::span<const double> series, std::size_t query_len);
  ~FftCorrelator();
  FftCorrelator(const FftCorrelator&) = delete;
  FftCorrelator& operator=(const FftCorrelator&) = delete;

  void correlate(std::span<const double> query, std::vector<double>& out) const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace tsawf
