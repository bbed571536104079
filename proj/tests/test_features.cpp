#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <set>

#include "support.hpp"
#include "tsawf/features.hpp"

namespace tsawf {
namespace {

using testing::make_trace;

std::size_t index_of(std::string_view name) {
  const auto schema = feature_schema();
  for (std::size_t i = 0; i < schema.size(); ++i)
    if (schema[i].name == name) return i;
  ADD_FAILURE() << "no feature " << name;
  return 0;
}

double feature(const FeatureVector& f, std::string_view name) { return f.values[index_of(name)]; }

// Straightforward second implementation: dense 1-second bins, explicit
// quantile positions, nothing shared with the library code.
std::vector<double> oracle_features(const Trace& t) {
  std::vector<double> v;
  std::vector<double> times[3];  // all, out, in
  for (const auto& e : t.events()) {
    times[0].push_back(e.time);
    times[e.direction == Direction::Outgoing ? 1 : 2].push_back(e.time);
  }
  const double n = static_cast<double>(t.size());
  v = {n, double(times[1].size()), double(times[2].size()), times[1].size() / n, times[2].size() / n,
       t.events().back().time - t.events().front().time};
  for (int s = 0; s < 3; ++s) {
    const auto& x = times[s];
    if (x.size() < 2) {
      for (int i = 0; i < 5; ++i) v.push_back(0.0);
      continue;
    }
    std::vector<double> g;
    for (std::size_t i = 0; i + 1 < x.size(); ++i) g.push_back(x[i + 1] - x[i]);
    double mean = 0;
    for (double y : g) mean += y / g.size();
    double var = 0;
    for (double y : g) var += (y - mean) * (y - mean) / g.size();
    std::sort(g.begin(), g.end());
    double med = g.size() % 2 == 1 ? g[g.size() / 2] : (g[g.size() / 2 - 1] + g[g.size() / 2]) / 2;
    v.insert(v.end(), {mean, std::sqrt(var), g.front(), g.back(), med});
  }
  for (int s = 0; s < 3; ++s) {
    const auto& x = times[s];
    for (int q = 1; q <= 9; ++q) {
      if (x.empty()) {
        v.push_back(0);
        continue;
      }
      const double h = (x.size() - 1) * (q / 10.0);
      const std::size_t lo = static_cast<std::size_t>(h);
      const std::size_t hi = std::min(x.size() - 1, lo + 1);
      v.push_back(x[lo] + (h - lo) * (x[hi] - x[lo]));
    }
  }
  std::vector<std::size_t> bursts;
  for (std::size_t i = 0; i < t.size(); ++i) {
    if (i > 0 && t[i].direction == t[i - 1].direction) ++bursts.back();
    else bursts.push_back(1);
  }
  v.push_back(double(bursts.size()));
  v.push_back(n / bursts.size());
  v.push_back(double(*std::max_element(bursts.begin(), bursts.end())));
  double first = 0, last = 0;
  for (std::size_t i = 0; i < t.size(); ++i) {
    if (i < 30 && t[i].direction == Direction::Outgoing) ++first;
    if (i + 30 >= t.size() && t[i].direction == Direction::Outgoing) ++last;
  }
  v.push_back(first);
  v.push_back(last);
  const std::size_t nbins = static_cast<std::size_t>(t.events().back().time / 1000.0) + 1;
  std::vector<double> bins(nbins, 0.0);
  for (double x : times[0]) bins[static_cast<std::size_t>(x / 1000.0)] += 1;
  double bm = 0;
  for (double b : bins) bm += b / nbins;
  double bv = 0;
  for (double b : bins) bv += (b - bm) * (b - bm) / nbins;
  v.push_back(bm);
  v.push_back(std::sqrt(bv));
  v.push_back(times[0].size() < 2);
  v.push_back(times[1].size() < 2);
  v.push_back(times[2].size() < 2);
  return v;
}

TEST(FeatureSchema, FixedLengthUniqueNames) {
  const auto schema = feature_schema();
  EXPECT_GE(schema.size(), 40u);
  std::set<std::string_view> names;
  for (const auto& f : schema) names.insert(f.name);
  EXPECT_EQ(names.size(), schema.size());
  const auto j = feature_schema_json();
  EXPECT_EQ(j["schema_version"], kFeatureSchemaVersion);
  ASSERT_EQ(j["features"].size(), schema.size());
  EXPECT_EQ(j["features"][0]["name"], "packet_count");
  EXPECT_EQ(j["features"][5]["type"], "time");
}

TEST(SummaryFeatures, SinglePacketIsDegenerate) {
  const auto f = summary_features(make_trace({{0, 1}}));
  EXPECT_EQ(f.values.size(), feature_schema().size());
  EXPECT_EQ(feature(f, "packet_count"), 1.0);
  EXPECT_EQ(feature(f, "outgoing_fraction"), 1.0);
  EXPECT_EQ(feature(f, "duration"), 0.0);
  for (auto name : {"iat_mean", "iat_std", "iat_min", "iat_max", "iat_median", "outgoing_iat_mean",
                    "incoming_iat_mean"})
    EXPECT_EQ(feature(f, name), 0.0) << name;
  EXPECT_EQ(feature(f, "degenerate_overall"), 1.0);
  EXPECT_EQ(feature(f, "degenerate_outgoing"), 1.0);
  EXPECT_EQ(feature(f, "degenerate_incoming"), 1.0);
}

TEST(SummaryFeatures, AlternatingPackets) {
  std::vector<PacketEvent> ev;
  for (int i = 0; i < 10; ++i) ev.push_back({double(i), i % 2 ? Direction::Incoming : Direction::Outgoing});
  const auto f = summary_features(Trace(ev));
  EXPECT_EQ(feature(f, "burst_max_length"), 1.0);
  EXPECT_EQ(feature(f, "burst_count"), 10.0);
  EXPECT_DOUBLE_EQ(feature(f, "iat_mean"), 1.0);
  EXPECT_EQ(feature(f, "degenerate_overall"), 0.0);
}

TEST(SummaryFeatures, AgreesWithIndependentImplementation) {
  Rng rng(99);
  for (int iter = 0; iter < 300; ++iter) {
    const std::size_t n = 1 + uniform_index(rng, 400);
    std::vector<PacketEvent> ev(n);
    double t = uniform_real(rng, 0, 100);
    for (auto& e : ev) {
      e = {t, uniform01(rng) < 0.4 ? Direction::Outgoing : Direction::Incoming};
      t += iter % 3 == 0 ? uniform_real(rng, 0, 300) : exponential(rng, 12.0);
    }
    const auto got = summary_features(Trace(ev)).values;
    const auto want = oracle_features(Trace(ev));
    ASSERT_EQ(got.size(), want.size());
    for (std::size_t i = 0; i < got.size(); ++i)
      ASSERT_NEAR(got[i], want[i], 1e-9 * std::max(1.0, std::fabs(want[i]))) << feature_schema()[i].name;
  }
}

TEST(SummaryFeatures, AllFinite) {
  Rng rng(5);
  for (int iter = 0; iter < 100; ++iter) {
    const auto f = summary_features(testing::random_trace(rng, 1 + uniform_index(rng, 50), uniform01(rng)));
    for (double x : f.values) ASSERT_TRUE(std::isfinite(x));
  }
}

TEST(SummaryFeatures, ReversalChangesDeciles) {
  Rng rng(17);
  for (int iter = 0; iter < 50; ++iter) {
    const Trace t = testing::random_trace(rng, 5 + uniform_index(rng, 100));
    // Mirror the timeline: time' = end - time, order reversed.
    std::vector<PacketEvent> rev;
    for (std::size_t i = t.size(); i-- > 0;) rev.push_back({t.end_time() - t[i].time, t[i].direction});
    const Trace r(rev);
    std::vector<PacketEvent> a(t.events().begin(), t.events().end());
    if (a == rev) continue;  // palindromic
    EXPECT_NE(summary_features(t).values, summary_features(r).values);
  }
}

TEST(SummaryFeatures, ScaleCovarianceByKind) {
  Rng rng(23);
  const auto schema = feature_schema();
  for (int iter = 0; iter < 100; ++iter) {
    const Trace t = testing::random_trace(rng, 1 + uniform_index(rng, 200), uniform01(rng));
    const double k = uniform_real(rng, 0.1, 20.0);
    std::vector<PacketEvent> scaled;
    for (const auto& e : t.events()) scaled.push_back({e.time * k, e.direction});
    const auto a = summary_features(t).values;
    const auto b = summary_features(Trace(scaled)).values;
    for (std::size_t i = 0; i < schema.size(); ++i) {
      if (schema[i].kind == FeatureKind::Time)
        ASSERT_NEAR(b[i], k * a[i], 1e-9 * std::max(1.0, std::fabs(k * a[i]))) << schema[i].name;
      else if (schema[i].kind == FeatureKind::Count)
        ASSERT_EQ(b[i], a[i]) << schema[i].name;
    }
  }
}

}  // namespace
}  // namespace tsawf
