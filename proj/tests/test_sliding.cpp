#include <gtest/gtest.h>

#include <chrono>
#include <cmath>

#include "oracles.hpp"
#include "support.hpp"
#include "tsawf/distance.hpp"
#include "tsawf/error.hpp"
#include "tsawf/sliding.hpp"
#include "tsawf/weights.hpp"

namespace tsawf {
namespace {

using testing::oracle_profile;

void expect_profile_matches(const std::vector<double>& q, const std::vector<double>& t, SlidingOptions o,
                            const std::vector<double>& w = {}) {
  o.keep_profile = true;
  const auto r = sliding_min_euclidean(q, t, o);
  const auto want = oracle_profile(q, t, o.normalized, o.rebase, w);
  ASSERT_EQ(r.profile.size(), want.size());
  std::size_t argmin = 0;
  for (std::size_t j = 0; j < want.size(); ++j) {
    ASSERT_LE(std::fabs(r.profile[j] - want[j]), 1e-6 * std::max(1.0, want[j]))
        << "offset " << j << " m=" << q.size() << " n=" << t.size();
    if (want[j] < want[argmin]) argmin = j;
  }
  EXPECT_LE(std::fabs(r.min_distance - want[argmin]), 1e-9 * std::max(1.0, want[argmin]));
}

TEST(SlidingEuclidean, FftMatchesOracleRandomWalks) {
  Rng rng(2024);
  for (int iter = 0; iter < 60; ++iter) {
    const std::size_t m = 8 + uniform_index(rng, 249);
    const std::size_t n = m + uniform_index(rng, 4000);
    const auto q = testing::random_walk(rng, m);
    const auto t = testing::random_walk(rng, n);
    for (int mode = 0; mode < 3; ++mode) {
      SlidingOptions o;
      o.path = SlidingPath::Fft;
      o.normalized = mode == 0;
      o.rebase = mode == 2;
      expect_profile_matches(q, t, o);
    }
  }
}

TEST(SlidingEuclidean, WeightedFftMatchesOracle) {
  Rng rng(77);
  for (int iter = 0; iter < 30; ++iter) {
    const std::size_t m = 8 + uniform_index(rng, 200);
    const std::size_t n = m + uniform_index(rng, 3000);
    const auto q = testing::random_walk(rng, m);
    const auto t = testing::random_walk(rng, n);
    const auto w = make_weights(WeightScheme::ReflectedLogarithmic, m).values;
    SlidingOptions o;
    o.path = SlidingPath::Fft;
    o.rebase = iter % 2 == 0;
    o.weights = w;
    expect_profile_matches(q, t, o, w);
  }
}

TEST(SlidingEuclidean, TimestampLikeSeriesWithLargeOffsets) {
  // Component time series: increasing, large magnitude, compared re-based.
  Rng rng(5);
  for (int iter = 0; iter < 20; ++iter) {
    const std::size_t m = 50 + uniform_index(rng, 300);
    const std::size_t n = m + uniform_index(rng, 5000);
    std::vector<double> t(n), q(m);
    double x = uniform_real(rng, 0, 1e5);
    for (auto& v : t) v = (x += exponential(rng, 20.0));
    x = 0;
    for (auto& v : q) v = (x += exponential(rng, 20.0));
    SlidingOptions o;
    o.path = SlidingPath::Fft;
    o.rebase = true;
    expect_profile_matches(q, t, o);
    o.normalized = true;
    expect_profile_matches(q, t, o);
  }
}

TEST(SlidingEuclidean, ConstantWindowConventions) {
  std::vector<double> t(300, 4.0);
  for (std::size_t i = 150; i < 300; ++i) t[i] = std::sin(0.1 * i);
  const std::vector<double> flat(40, -2.0);
  std::vector<double> wave(40);
  for (std::size_t i = 0; i < 40; ++i) wave[i] = std::cos(0.3 * i);
  for (auto path : {SlidingPath::Fft, SlidingPath::Naive}) {
    SlidingOptions o;
    o.normalized = true;
    o.path = path;
    o.keep_profile = true;
    auto r = sliding_min_euclidean(flat, t, o);
    EXPECT_EQ(r.min_distance, 0.0);
    EXPECT_EQ(r.argmin_offset, 0u);
    EXPECT_DOUBLE_EQ(r.profile.back(), std::sqrt(40.0));
    r = sliding_min_euclidean(wave, t, o);
    EXPECT_DOUBLE_EQ(r.profile.front(), std::sqrt(40.0));
    expect_profile_matches(wave, t, o);
    expect_profile_matches(flat, t, o);
  }
}

TEST(SlidingEuclidean, PlantedCopyFoundExactly) {
  Rng rng(8);
  for (int iter = 0; iter < 20; ++iter) {
    const std::size_t n = 500 + uniform_index(rng, 3000);
    const std::size_t m = 16 + uniform_index(rng, 200);
    auto t = testing::random_walk(rng, n);
    const std::size_t j = uniform_index(rng, n - m + 1);
    const std::vector<double> q(t.begin() + j, t.begin() + j + m);
    for (auto path : {SlidingPath::Fft, SlidingPath::Naive}) {
      SlidingOptions o;
      o.path = path;
      const auto r = sliding_min_euclidean(q, t, o);
      EXPECT_EQ(r.min_distance, 0.0);
      EXPECT_EQ(r.argmin_offset, j);
    }
  }
}

TEST(SlidingEuclidean, EqualLengthReducesToEuclidean) {
  Rng rng(1);
  const auto a = testing::uniform_vector(rng, 100);
  const auto b = testing::uniform_vector(rng, 100);
  const auto r = sliding_min_euclidean(a, b);
  EXPECT_DOUBLE_EQ(r.min_distance, euclidean(a, b));
  EXPECT_EQ(r.argmin_offset, 0u);
}

TEST(SlidingEuclidean, StrideVisitsMultiples) {
  Rng rng(3);
  const auto t = testing::random_walk(rng, 1000);
  const auto q = testing::random_walk(rng, 64);
  SlidingOptions o;
  o.stride = 7;
  o.keep_profile = true;
  const auto r = sliding_min_euclidean(q, t, o);
  EXPECT_EQ(r.profile.size(), sliding_offset_count(64, 1000, 7));
  EXPECT_EQ(r.profile.size(), (1000 - 64) / 7 + 1);
  EXPECT_EQ(r.argmin_offset % 7, 0u);
  const auto full = oracle_profile(q, t, false, false);
  for (std::size_t j = 0; j < r.profile.size(); ++j) EXPECT_NEAR(r.profile[j], full[j * 7], 1e-9);
}

TEST(SlidingEuclidean, WindowCountIsNMinusMPlusOne) {
  SlidingOptions o;
  o.keep_profile = true;
  const std::vector<double> t(50, 1.0), q(13, 1.0);
  EXPECT_EQ(sliding_min_euclidean(q, t, o).profile.size(), 38u);
}

TEST(SlidingEuclidean, Errors) {
  const std::vector<double> a(5, 0.0), b(3, 0.0), w(2, 1.0);
  EXPECT_THROW(sliding_min_euclidean(a, b), Error);
  EXPECT_THROW(sliding_min_euclidean({}, b), Error);
  SlidingOptions o;
  o.weights = w;
  EXPECT_THROW(sliding_min_euclidean(b, a, o), Error);
  const std::vector<double> w3(3, 1.0);
  o.weights = w3;
  o.normalized = true;
  EXPECT_THROW(sliding_min_euclidean(b, a, o), Error);
}

TEST(FftCorrelator, MatchesDirectDotProducts) {
  Rng rng(4);
  const auto t = testing::uniform_vector(rng, 777);
  const auto q = testing::uniform_vector(rng, 33);
  FftCorrelator c(t, q.size());
  std::vector<double> out;
  c.correlate(q, out);
  ASSERT_EQ(out.size(), 777u - 33u + 1u);
  for (std::size_t i = 0; i < out.size(); ++i) {
    double d = 0;
    for (std::size_t k = 0; k < q.size(); ++k) d += q[k] * t[i + k];
    EXPECT_NEAR(out[i], d, 1e-10);
  }
}

TEST(Euclidean, Basics) {
  const std::vector<double> z{0, 0}, p{3, 4};
  EXPECT_EQ(euclidean(z, p), 5.0);
  EXPECT_EQ(euclidean(p, p), 0.0);
  const std::vector<double> a{0, 9}, w{1, 0};
  EXPECT_EQ(euclidean(a, z, w), 0.0);
  EXPECT_THROW(euclidean(a, std::vector<double>{1.0}), Error);
}

}  // namespace
}  // namespace tsawf
