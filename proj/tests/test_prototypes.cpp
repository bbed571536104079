#include <gtest/gtest.h>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <set>

#include "support.hpp"
#include "tsawf/error.hpp"
#include "tsawf/prototypes.hpp"
#include "tsawf/synthetic.hpp"

namespace tsawf {
namespace {

std::vector<std::vector<double>> cloud(Rng& rng, std::size_t n, std::size_t dim, double center, double spread) {
  std::vector<std::vector<double>> out(n, std::vector<double>(dim));
  for (auto& p : out)
    for (auto& x : p) x = center + spread * standard_normal(rng);
  return out;
}

TEST(KMeans, SingleClusterIsTheMean) {
  Rng gen(3);
  for (int iter = 0; iter < 20; ++iter) {
    const std::size_t n = 2 + uniform_index(gen, 30), dim = 1 + uniform_index(gen, 5);
    const auto pts = cloud(gen, n, dim, 0.0, 3.0);
    Rng rng(iter);
    const auto r = kmeans(pts, 1, rng);
    double inertia = 0.0;
    for (std::size_t d = 0; d < dim; ++d) {
      double mean = 0.0;
      for (const auto& p : pts) mean += p[d];
      mean /= static_cast<double>(n);
      EXPECT_NEAR(r.centroids[0][d], mean, 1e-12);
      for (const auto& p : pts) inertia += (p[d] - mean) * (p[d] - mean);
    }
    EXPECT_NEAR(r.inertia, inertia, 1e-9 * std::max(1.0, inertia));
  }
}

TEST(KMeans, RecoversSeparatedClouds) {
  Rng gen(11);
  std::vector<std::vector<double>> pts;
  for (int c = 0; c < 3; ++c) {
    auto part = cloud(gen, 20, 4, 100.0 * c, 1.0);
    pts.insert(pts.end(), part.begin(), part.end());
  }
  Rng rng(1);
  const auto r = kmeans(pts, 3, rng);
  for (int c = 0; c < 3; ++c) {
    std::set<std::size_t> ids;
    for (int i = 0; i < 20; ++i) ids.insert(r.assignments[20 * c + i]);
    EXPECT_EQ(ids.size(), 1u) << "cloud " << c;
  }
  std::set<std::size_t> all(r.assignments.begin(), r.assignments.end());
  EXPECT_EQ(all.size(), 3u);
}

TEST(KMeans, OneClusterPerPointHasZeroInertia) {
  Rng gen(5);
  const auto pts = cloud(gen, 12, 3, 0.0, 1.0);
  Rng rng(2);
  EXPECT_EQ(kmeans(pts, pts.size(), rng).inertia, 0.0);
}

TEST(KMeans, DuplicatePointsStillGiveKCentroids) {
  std::vector<std::vector<double>> pts(6, std::vector<double>{1.0, 2.0});
  pts.push_back({5.0, 5.0});
  Rng rng(9);
  const auto r = kmeans(pts, 3, rng);
  EXPECT_EQ(r.centroids.size(), 3u);
  EXPECT_EQ(r.inertia, 0.0);
}

TEST(KMeansProperty, InertiaNeverIncreases) {
  Rng gen(21);
  for (int iter = 0; iter < 50; ++iter) {
    const std::size_t n = 5 + uniform_index(gen, 60), k = 1 + uniform_index(gen, std::min<std::size_t>(n, 8));
    const auto pts = cloud(gen, n, 1 + uniform_index(gen, 6), 0.0, 10.0);
    Rng rng(iter);
    const auto r = kmeans(pts, k, rng);
    for (std::size_t i = 1; i < r.inertia_history.size(); ++i)
      EXPECT_LE(r.inertia_history[i], r.inertia_history[i - 1] * (1 + 1e-12) + 1e-12);
    EXPECT_EQ(r.inertia, r.inertia_history.back());
  }
}

TEST(KMeans, RejectsBadArguments) {
  std::vector<std::vector<double>> pts{{1.0}, {2.0}};
  Rng rng(1);
  try {
    kmeans(pts, 3, rng);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::InsufficientData);
  }
  pts.push_back({1.0, 2.0});
  try {
    kmeans(pts, 1, rng);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::DimensionMismatch);
  }
}

TEST(PadRaw, TruncatesAndPadsSignedSeries) {
  const std::vector<Trace> ts{testing::make_trace({{0, 1}, {2, -1}, {5, 1}}), testing::make_trace({{1, -1}})};
  const auto p = pad_raw(ts, 2);
  EXPECT_EQ(p[0], (std::vector<double>{0.0, -2.0}));
  EXPECT_EQ(p[1], (std::vector<double>{-1.0, 0.0}));
  EXPECT_EQ(median_length(ts), 1u);
  const std::vector<Trace> three{ts[0], ts[1], ts[0]};
  EXPECT_EQ(median_length(three), 3u);
}

TEST(StandardizedFeatures, ColumnsHaveZeroMeanAndUnitOrZeroSpread) {
  Rng rng(4);
  std::vector<Trace> ts;
  for (int i = 0; i < 15; ++i) ts.push_back(testing::random_trace(rng, 20 + uniform_index(rng, 80)));
  const auto x = standardized_features(ts);
  for (std::size_t j = 0; j < x[0].size(); ++j) {
    double mean = 0.0, ss = 0.0;
    for (const auto& r : x) mean += r[j];
    mean /= static_cast<double>(x.size());
    for (const auto& r : x) ss += (r[j] - mean) * (r[j] - mean);
    const double var = ss / static_cast<double>(x.size());
    EXPECT_NEAR(mean, 0.0, 1e-9);
    EXPECT_TRUE(std::fabs(var - 1.0) < 1e-9 || var == 0.0) << j << " " << var;
  }
}

Dataset small_fixture(std::uint64_t seed) {
  FixtureSpec spec;
  spec.classes = 4;
  spec.samples_per_class = 12;
  spec.shape.events = 120;
  spec.seed = seed;
  return make_fixture(spec);
}

TEST(SelectPrototypes, DistinctRankedAndDeterministic) {
  const Dataset d = small_fixture(7);
  for (auto strategy : {PrototypeStrategy::Random, PrototypeStrategy::RawCluster, PrototypeStrategy::FeatureCluster}) {
    Rng a(99), b(99);
    const auto pa = select_prototypes(d.monitored[0], 0, strategy, 4, a);
    const auto pb = select_prototypes(d.monitored[0], 0, strategy, 4, b);
    ASSERT_EQ(pa.size(), 4u);
    std::set<std::size_t> members;
    for (std::size_t r = 0; r < pa.size(); ++r) {
      EXPECT_EQ(pa[r].cluster_rank, r);
      EXPECT_EQ(pa[r].member_index, pb[r].member_index);
      EXPECT_TRUE(pa[r].trace == d.monitored[0][pa[r].member_index]);
      members.insert(pa[r].member_index);
      if (r > 0) EXPECT_GE(pa[r - 1].cluster_size, pa[r].cluster_size);
    }
    EXPECT_EQ(members.size(), 4u) << strategy_name(strategy);
    if (strategy != PrototypeStrategy::Random) {
      std::size_t total = 0;
      for (const auto& p : pa) total += p.cluster_size;
      EXPECT_EQ(total, d.monitored[0].size());
    }
  }
}

TEST(SelectPrototypes, TooFewTracesIsInsufficientData) {
  const Dataset d = small_fixture(7);
  Rng rng(1);
  const std::span<const Trace> two(d.monitored[0].data(), 2);
  try {
    select_prototypes(two, 0, PrototypeStrategy::FeatureCluster, 3, rng);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::InsufficientData);
  }
}

TEST(BuildPrototypes, IndependentOfThreadCount) {
  const Dataset d = small_fixture(8);
  const auto one = build_prototypes(d, PrototypeStrategy::FeatureCluster, 3, 5, 1);
  const auto many = build_prototypes(d, PrototypeStrategy::FeatureCluster, 3, 5, 4);
  EXPECT_EQ(one.hash(), many.hash());
  EXPECT_EQ(one.prototypes.size(), 12u);
  for (ClassId c = 0; c < 4; ++c) EXPECT_EQ(one.of_class(c).size(), 3u);
  const auto other_seed = build_prototypes(d, PrototypeStrategy::Random, 3, 6, 1);
  EXPECT_NE(one.hash(), other_seed.hash());
}

TEST(Bundle, SaveLoadRoundTripAndTamperDetection) {
  const Dataset d = small_fixture(9);
  const auto b = build_prototypes(d, PrototypeStrategy::RawCluster, 2, 3);
  testing::TempDir dir("bundle");
  save_bundle(dir.str(), b);
  const auto back = load_bundle(dir.str());
  EXPECT_EQ(back.hash(), b.hash());
  ASSERT_EQ(back.prototypes.size(), b.prototypes.size());
  for (std::size_t i = 0; i < b.prototypes.size(); ++i) {
    EXPECT_TRUE(back.prototypes[i].trace == b.prototypes[i].trace);
    EXPECT_EQ(back.prototypes[i].member_index, b.prototypes[i].member_index);
    EXPECT_EQ(back.prototypes[i].split.outgoing.times, b.prototypes[i].split.outgoing.times);
  }
  {
    std::ofstream out(dir.path() / "class0_rank0.trace");
    out << "0 1\n1 -1\n";
  }
  try {
    load_bundle(dir.str());
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::SchemaMismatch);
  }
}

}  // namespace
}  // namespace tsawf
