#include <gtest/gtest.h>

#include "support.hpp"
#include "tsawf/dataset.hpp"
#include "tsawf/distance.hpp"
#include "tsawf/error.hpp"
#include "tsawf/synthetic.hpp"

namespace tsawf {
namespace {

Trace shaped_trace(std::uint64_t seed, std::size_t events) {
  Rng rng(seed);
  TraceShape shape;
  shape.events = events;
  return random_walk_trace(rng, shape);
}

TEST(ComputeDist, SelfMatchIsMinimalAndEuclideanZero) {
  const Trace s = shaped_trace(1, 200);
  const Trace other = shaped_trace(2, 200);
  const auto measures = all_measures();
  const auto self = compute_dist(s, s, measures);
  const auto cross = compute_dist(s, other, measures);
  ASSERT_EQ(self.distances.size(), 5u);
  ASSERT_EQ(self.argmin_packet_index.size(), 5u);
  EXPECT_EQ(self.distances[0], 0.0);  // matrix profile, z-normalized
  EXPECT_EQ(self.distances[1], 0.0);  // euclidean
  EXPECT_EQ(self.distances[2], 0.0);  // weighted euclidean
  EXPECT_EQ(self.distances[4], 0.0);  // dtw
  for (std::size_t i = 0; i < 5; ++i) EXPECT_LE(self.distances[i], cross.distances[i]) << all_measures()[i].name();
  for (std::size_t i = 0; i < 5; ++i) EXPECT_EQ(self.argmin_packet_index[i], 0u);
}

TEST(ComputeDist, PlantedPrototypeLocatedExactly) {
  Rng rng(5);
  for (int iter = 0; iter < 20; ++iter) {
    const Trace proto = shaped_trace(100 + iter, 150 + uniform_index(rng, 200));
    std::vector<Trace> tabs;
    const std::size_t k = 2 + uniform_index(rng, 4), slot = uniform_index(rng, k);
    for (std::size_t i = 0; i < k; ++i) tabs.push_back(i == slot ? proto : shaped_trace(1000 + 10 * iter + i, 300));
    const auto merged = merge_traces(tabs, 0.0, rng);
    const std::vector<Measure> ms{Measure::euclidean()};
    const auto dv = compute_dist(proto, merged.trace, ms);
    EXPECT_EQ(dv.distances[0], 0.0);
    // Synthetic traces open with an outgoing packet, so the outgoing window
    // start is the prototype's first packet.
    EXPECT_EQ(dv.argmin_packet_index[0], merged.start_indices[slot]);
  }
}

TEST(ComputeDist, SwapRuleIsSymmetricInDistance) {
  const Trace big = shaped_trace(7, 400);
  const Trace small = shaped_trace(8, 120);
  const std::vector<Measure> ms{Measure::matrix_profile(), Measure::euclidean(), Measure::weighted_euclidean(),
                                Measure::cbd(), Measure::dtw(4)};
  const auto a = compute_dist(big, small, ms);
  const auto b = compute_dist(small, big, ms);
  for (std::size_t i = 0; i < ms.size(); ++i) {
    if (ms[i].kind == MeasureKind::CBD) continue;  // concatenation order differs by design
    EXPECT_DOUBLE_EQ(a.distances[i], b.distances[i]) << ms[i].name();
  }
  const auto m = match(split_directions(big), split_directions(small), Measure::euclidean());
  EXPECT_TRUE(m.outgoing.swapped);
  EXPECT_EQ(m.argmin_packet_index, split_directions(small).outgoing.original_index[0]);
}

TEST(ComputeDist, CombinedIsSumOfComponents) {
  const auto p = split_directions(shaped_trace(3, 150));
  const auto t = split_directions(shaped_trace(4, 600));
  for (const auto& m : all_measures()) {
    const auto r = match(p, t, m);
    EXPECT_EQ(r.combined_distance, r.outgoing.min_distance + r.incoming.min_distance);
    EXPECT_GE(r.combined_distance, 0.0);
    EXPECT_LE(r.outgoing.argmin_offset + p.outgoing.size(), t.outgoing.size());
    EXPECT_EQ(r.argmin_packet_index, t.outgoing.original_index[r.outgoing.argmin_offset]);
  }
}

TEST(ComputeDist, EmptyComponentFallsBackToIncoming) {
  const Trace proto = testing::make_trace({{0, -1}, {1, -1}, {3, -1}});
  const Trace target = testing::make_trace({{0, 1}, {2, -1}, {5, 1}, {7, -1}, {8, -1}, {10, -1}});
  const auto r = match(split_directions(proto), split_directions(target), Measure::euclidean());
  EXPECT_TRUE(r.outgoing.empty);
  EXPECT_EQ(r.outgoing.min_distance, 0.0);
  // Incoming target times 2, 7, 8, 10: window [7, 8, 10] re-bases to [0, 1, 3].
  EXPECT_EQ(r.incoming.min_distance, 0.0);
  EXPECT_EQ(r.argmin_packet_index, 3u);
}

TEST(ComputeDist, StrideOptionCoarsens) {
  const Trace p = shaped_trace(9, 100);
  const Trace t = shaped_trace(10, 900);
  const std::vector<Measure> ms{Measure::euclidean()};
  const auto fine = compute_dist(p, t, ms);
  DistanceOptions coarse;
  coarse.stride = 50;
  const auto c = compute_dist(p, t, ms, coarse);
  EXPECT_GE(c.distances[0], fine.distances[0]);
  EXPECT_THROW(compute_dist(p, t, ms, DistanceOptions{0}), Error);
  EXPECT_THROW(compute_dist(p, t, std::vector<Measure>{}), Error);
}

TEST(ComputeDist, FftAndNaivePathsAgree) {
  const Trace p = shaped_trace(11, 300);
  const Trace t = shaped_trace(12, 3000);
  const std::vector<Measure> ms{Measure::matrix_profile(), Measure::euclidean(), Measure::weighted_euclidean()};
  DistanceOptions fft, naive;
  fft.path = SlidingPath::Fft;
  naive.path = SlidingPath::Naive;
  const auto a = compute_dist(p, t, ms, fft);
  const auto b = compute_dist(p, t, ms, naive);
  for (std::size_t i = 0; i < ms.size(); ++i) {
    EXPECT_NEAR(a.distances[i], b.distances[i], 1e-9 * std::max(1.0, b.distances[i]));
    EXPECT_EQ(a.argmin_packet_index[i], b.argmin_packet_index[i]);
  }
}

TEST(Measures, JsonRoundTripAndKeys) {
  for (const auto& m : all_measures()) {
    EXPECT_EQ(Measure::from_json(m.to_json()), m);
    EXPECT_EQ(Measure::from_json(m.name()), Measure::of(m.kind));
  }
  const auto w = Measure::from_json(nlohmann::json{{"kind", "weighted_euclidean"}, {"weights", "exponential"},
                                                   {"exp_base", 0.25}});
  EXPECT_EQ(w.weights, WeightScheme::Exponential);
  EXPECT_EQ(w.key(), "weighted_euclidean(exponential,0.25)");
  EXPECT_NE(Measure::matrix_profile(true).key(), Measure::matrix_profile(false).key());
  EXPECT_EQ(Measure::from_json(nlohmann::json{{"kind", "dtw"}, {"window", 3}}).window, std::optional<std::size_t>(3));
}

TEST(Measures, Validation) {
  EXPECT_THROW(Measure::from_json("chebyshev"), Error);
  EXPECT_THROW(Measure::from_json(nlohmann::json{{"kind", "cbd"}, {"alphabet", 1}}), Error);
  EXPECT_THROW(Measure::from_json(nlohmann::json{{"kind", "weighted_euclidean"}, {"normalized", true}}), Error);
  EXPECT_THROW(Measure::from_json(nlohmann::json{{"kind", "euclidean"}, {"bogus", 1}}), Error);
  const auto list = parse_measure_list("matrix_profile,wed,euclidean");
  ASSERT_EQ(list.size(), 3u);
  EXPECT_EQ(list[1].kind, MeasureKind::WeightedEuclidean);
  EXPECT_THROW(parse_measure_list(""), Error);
}

}  // namespace
}  // namespace tsawf
