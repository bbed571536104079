#include <gtest/gtest.h>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <map>

#include "support.hpp"
#include "tsawf/dataset.hpp"
#include "tsawf/error.hpp"
#include "tsawf/synthetic.hpp"

namespace tsawf {
namespace {

namespace fs = std::filesystem;
using testing::make_trace;
using testing::TempDir;

void write_text(const fs::path& p, const std::string& text) {
  fs::create_directories(p.parent_path());
  std::ofstream(p) << text;
}

Errc load_error(const std::string& root) {
  try {
    load_dataset(root);
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "load succeeded";
  return Errc::Io;
}

TEST(LoadDataset, CountsClassesAndUnmonitored) {
  TempDir dir("load");
  for (int c = 0; c < 2; ++c)
    for (int k = 0; k < 3; ++k) write_text(dir.path() / "monitored" / std::to_string(c) / (std::to_string(k) + ".trace"), "0\n-1\n2\n");
  for (int k = 0; k < 4; ++k) write_text(dir.path() / "unmonitored" / (std::to_string(k) + ".trace"), "0\n-5\n");
  write_text(dir.path() / "unmonitored" / "notes.txt", "ignored");
  const Dataset d = load_dataset(dir.str());
  EXPECT_EQ(d.class_count(), 2u);
  EXPECT_EQ(d.monitored_count(), 6u);
  EXPECT_EQ(d.unmonitored.size(), 4u);
  for (std::size_t c = 0; c < 2; ++c)
    for (const auto& t : d.monitored[c]) EXPECT_EQ(t.label(), static_cast<ClassId>(c));
  for (const auto& t : d.unmonitored) EXPECT_EQ(t.label(), kUnmonitored);
  EXPECT_EQ(d.monitored[1][2].source_id(), "monitored/1/2.trace");
}

TEST(LoadDataset, LayoutErrors) {
  {
    TempDir dir("nomon");
    EXPECT_EQ(load_error(dir.str()), Errc::MissingDirectory);
  }
  {
    TempDir dir("emptymon");
    fs::create_directories(dir.path() / "monitored");
    EXPECT_EQ(load_error(dir.str()), Errc::MissingDirectory);
  }
  {
    TempDir dir("sparse");
    for (const char* c : {"0", "1", "5"}) write_text(dir.path() / "monitored" / c / "a.trace", "1\n");
    EXPECT_EQ(load_error(dir.str()), Errc::MalformedLayout);
  }
  {
    TempDir dir("badname");
    write_text(dir.path() / "monitored" / "00" / "a.trace", "1\n");
    EXPECT_EQ(load_error(dir.str()), Errc::MalformedLayout);
  }
  {
    TempDir dir("emptyclass");
    write_text(dir.path() / "monitored" / "0" / "a.trace", "1\n");
    fs::create_directories(dir.path() / "monitored" / "1");
    EXPECT_EQ(load_error(dir.str()), Errc::MalformedLayout);
  }
}

TEST(LoadDataset, ParseFailureAbortsWithPathContext) {
  TempDir dir("badfile");
  write_text(dir.path() / "monitored" / "0" / "good.trace", "1\n");
  write_text(dir.path() / "monitored" / "0" / "bad.trace", "1\nxyz\n");
  try {
    load_dataset(dir.str());
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::MalformedLine);
    EXPECT_NE(std::string(e.what()).find("bad.trace"), std::string::npos);
    EXPECT_NE(std::string(e.what()).find("line 2"), std::string::npos);
  }
}

TEST(LoadDataset, SaveLoadRoundTrip) {
  FixtureSpec spec;
  spec.classes = 3;
  spec.samples_per_class = 4;
  spec.unmonitored = 5;
  spec.shape.events = 40;
  const Dataset d = make_fixture(spec);
  TempDir dir("roundtrip");
  save_dataset(dir.str(), d);
  const Dataset back = load_dataset(dir.str(), {{}, 2});
  ASSERT_EQ(back.class_count(), 3u);
  for (std::size_t c = 0; c < 3; ++c) EXPECT_EQ(back.monitored[c], d.monitored[c]);
  EXPECT_EQ(back.unmonitored, d.unmonitored);
}

Dataset counted_dataset(std::size_t classes, std::size_t per_class) {
  Dataset d;
  d.monitored.resize(classes);
  for (std::size_t c = 0; c < classes; ++c)
    for (std::size_t k = 0; k < per_class; ++k)
      d.monitored[c].push_back(Trace({{static_cast<double>(k), Direction::Outgoing}}, static_cast<ClassId>(c),
                                     std::to_string(c) + "/" + std::to_string(k)));
  return d;
}

TEST(Split, NinetyTenPerClass) {
  const auto [train, test] = split(counted_dataset(3, 100), {0.9, 5});
  for (std::size_t c = 0; c < 3; ++c) {
    EXPECT_EQ(train.monitored[c].size(), 90u);
    EXPECT_EQ(test.monitored[c].size(), 10u);
  }
}

TEST(Split, DeterministicAndDisjoint) {
  const Dataset d = counted_dataset(2, 37);
  const auto a = split(d, {0.7, 9});
  const auto b = split(d, {0.7, 9});
  for (std::size_t c = 0; c < 2; ++c) {
    std::vector<std::string> tr, te, tr2;
    for (const auto& t : a.first.monitored[c]) tr.push_back(t.source_id());
    for (const auto& t : a.second.monitored[c]) te.push_back(t.source_id());
    for (const auto& t : b.first.monitored[c]) tr2.push_back(t.source_id());
    EXPECT_EQ(tr, tr2);
    EXPECT_EQ(tr.size(), 25u);  // floor(0.7 * 37)
    EXPECT_EQ(tr.size() + te.size(), 37u);
    for (const auto& id : te) EXPECT_EQ(std::count(tr.begin(), tr.end(), id), 0);
  }
  const auto other = split(d, {0.7, 10});
  bool differs = false;
  for (std::size_t i = 0; i < 25; ++i)
    differs |= other.first.monitored[0][i].source_id() != a.first.monitored[0][i].source_id();
  EXPECT_TRUE(differs);
}

TEST(Split, FloorAndMinimumOnTinyClasses) {
  auto [train, test] = split(counted_dataset(1, 2), {0.5, 1});
  EXPECT_EQ(train.monitored[0].size(), 1u);
  EXPECT_EQ(test.monitored[0].size(), 1u);
  std::tie(train, test) = split(counted_dataset(1, 3), {0.99, 1});
  EXPECT_EQ(test.monitored[0].size(), 1u);
  std::tie(train, test) = split(counted_dataset(1, 3), {0.01, 1});
  EXPECT_EQ(train.monitored[0].size(), 1u);
  EXPECT_THROW(split(counted_dataset(1, 1), {0.5, 1}), Error);
}

TEST(MergeTraces, ZeroOverlapConcatenates) {
  Rng rng(1);
  const Trace a = make_trace({{0, 1}, {1, -1}, {4, 1}});
  const Trace b = make_trace({{0, -1}, {2, 1}});
  const auto r = merge_traces(std::vector<Trace>{a, b}, 0.0, rng);
  EXPECT_EQ(r.start_indices, (std::vector<std::size_t>{0, 3}));
  EXPECT_EQ(r.trace, make_trace({{0, 1}, {1, -1}, {4, 1}, {4, -1}, {6, 1}}));
  // Zero overlap draws nothing.
  EXPECT_EQ(rng(), Rng(1)());
}

TEST(MergeTraces, SingleTraceIsIdentity) {
  Rng rng(2);
  const Trace a = make_trace({{3, 1}, {5, -1}});
  const auto r = merge_traces(std::vector<Trace>{a}, 0.4, rng);
  EXPECT_EQ(r.trace, a);
  EXPECT_EQ(r.start_indices, (std::vector<std::size_t>{0}));
}

TEST(MergeTraces, HandSimulatedOverlapForSeed42) {
  // Trace 0 lasts 40 ms, so u ~ U(0, 0.4 * 40). The first draw of
  // mt19937_64(42) scaled to [0, 16) is 12.082488527272623, putting trace 1's
  // origin at 27.917511472727377.
  const Trace t0 = make_trace({{0, 1}, {10, -1}, {20, 1}, {30, -1}, {40, 1}});
  const Trace t1 = make_trace({{0, -1}, {3, -1}, {6, 1}, {9, 1}, {12, -1}});
  Rng rng(42);
  const auto r = merge_traces(std::vector<Trace>{t0, t1}, 0.4, rng);
  const double o = 40.0 - 12.082488527272623;
  const std::vector<PacketEvent> expected{
      {0, Direction::Outgoing},      {10, Direction::Incoming},     {20, Direction::Outgoing},
      {o, Direction::Incoming},      {30, Direction::Incoming},     {o + 3, Direction::Incoming},
      {o + 6, Direction::Outgoing},  {o + 9, Direction::Outgoing},  {o + 12, Direction::Incoming},
      {40, Direction::Outgoing}};
  ASSERT_EQ(r.trace.size(), expected.size());
  for (std::size_t i = 0; i < expected.size(); ++i) {
    EXPECT_NEAR(r.trace[i].time, expected[i].time, 1e-12) << i;
    EXPECT_EQ(r.trace[i].direction, expected[i].direction) << i;
  }
  EXPECT_EQ(r.start_indices, (std::vector<std::size_t>{0, 3}));
  EXPECT_NEAR(r.start_times[1], o, 1e-12);
}

TEST(MergeTraces, TiesBrokenByTabThenIndex) {
  Rng rng(0);
  const Trace a = make_trace({{0, 1}, {5, -1}, {5, 1}});
  const Trace b = make_trace({{0, -1}, {0, 1}});
  const auto r = merge_traces(std::vector<Trace>{a, b}, 0.0, rng);
  EXPECT_EQ(r.trace, make_trace({{0, 1}, {5, -1}, {5, 1}, {5, -1}, {5, 1}}));
  EXPECT_EQ(r.start_indices[1], 3u);
}

TEST(MergeTraces, RejectsBadOverlap) {
  Rng rng(0);
  const std::vector<Trace> ts{make_trace({{0, 1}})};
  for (double p : {-0.1, 1.0, 1.5}) {
    try {
      merge_traces(ts, p, rng);
      FAIL();
    } catch (const Error& e) {
      EXPECT_EQ(e.code(), Errc::InvalidOverlap);
    }
  }
}

TEST(MergeTraces, PreservesEventsProperty) {
  Rng rng(123);
  for (int iter = 0; iter < 100; ++iter) {
    const std::size_t k = 1 + uniform_index(rng, 5);
    std::vector<Trace> ts;
    for (std::size_t i = 0; i < k; ++i) ts.push_back(testing::random_trace(rng, 1 + uniform_index(rng, 60)));
    const double p = uniform01(rng) < 0.3 ? 0.0 : uniform_real(rng, 0.0, 0.9);
    const auto r = merge_traces(ts, p, rng);

    std::size_t total = 0;
    for (const auto& t : ts) total += t.size();
    ASSERT_EQ(r.trace.size(), total);
    // Walk each constituent through the merged order: relative times and
    // directions must come back unchanged.
    std::map<std::pair<double, int>, int> merged_counts;
    for (const auto& e : r.trace.events()) ++merged_counts[{e.time, static_cast<int>(e.direction)}];
    for (std::size_t i = 0; i < k; ++i) {
      const double origin = r.start_times[i] - ts[i].start_time();
      for (const auto& e : ts[i].events()) --merged_counts[{origin + e.time, static_cast<int>(e.direction)}];
      EXPECT_EQ(r.trace[r.start_indices[i]].time, r.start_times[i]);
    }
    for (const auto& [key, count] : merged_counts) ASSERT_EQ(count, 0);
    if (p == 0.0) {
      std::size_t prefix = 0;
      for (std::size_t i = 0; i < k; ++i) {
        EXPECT_EQ(r.start_indices[i], prefix);
        prefix += ts[i].size();
      }
    }
  }
}

Dataset small_world() {
  FixtureSpec spec;
  spec.classes = 4;
  spec.samples_per_class = 5;
  spec.unmonitored = 6;
  spec.shape.events = 30;
  spec.unmonitored_min_events = 10;
  spec.unmonitored_max_events = 20;
  return make_fixture(spec);
}

TEST(Synthesize, SingleTabIsBareMonitoredTrace) {
  const Dataset d = small_world();
  const auto samples = synthesize_multitab(d, {1, 3, 0.2, 8});
  ASSERT_EQ(samples.size(), 12u);
  for (const auto& s : samples) {
    EXPECT_EQ(s.true_start_index, 0u);
    EXPECT_EQ(s.tab_count, 1u);
    const auto& pool = d.monitored[static_cast<std::size_t>(s.monitored_class)];
    EXPECT_TRUE(std::find(pool.begin(), pool.end(), s.trace) != pool.end());
    EXPECT_EQ(s.trace.label(), s.monitored_class);
  }
}

TEST(Synthesize, CountsAndExactlyOneMonitored) {
  const Dataset d = small_world();
  const auto samples = synthesize_multitab(d, {3, 7, 0.1, 8});
  ASSERT_EQ(samples.size(), 28u);
  for (const auto& s : samples) {
    ASSERT_EQ(s.constituent_source_ids.size(), 3u);
    int monitored = 0;
    for (const auto& id : s.constituent_source_ids) monitored += id.find("unmonitored") == std::string::npos;
    EXPECT_EQ(monitored, 1);
    EXPECT_LT(s.true_start_index, s.trace.size());
  }
}

TEST(Synthesize, ZeroOverlapStartIndexIsPrefixLength) {
  const Dataset d = small_world();
  std::map<std::string, const Trace*> by_id;
  for (const auto& c : d.monitored)
    for (const auto& t : c) by_id[t.source_id()] = &t;
  for (const auto& t : d.unmonitored) by_id[t.source_id()] = &t;
  const auto samples = synthesize_multitab(d, {3, 20, 0.0, 4});
  std::map<std::size_t, int> slots;
  for (const auto& s : samples) {
    std::size_t prefix = 0, slot = 0;
    for (std::size_t i = 0; i < 3; ++i) {
      if (s.constituent_source_ids[i].find("unmonitored") == std::string::npos) {
        slot = i;
        break;
      }
      prefix += by_id.at(s.constituent_source_ids[i])->size();
    }
    ++slots[slot];
    EXPECT_EQ(s.true_start_index, prefix);
  }
  // The monitored slot is not pinned to one position.
  EXPECT_EQ(slots.size(), 3u);
}

TEST(Synthesize, DeterministicPerSeed) {
  const Dataset d = small_world();
  const auto a = synthesize_multitab(d, {5, 3, 0.4, 77});
  const auto b = synthesize_multitab(d, {5, 3, 0.4, 77});
  ASSERT_EQ(a.size(), b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    EXPECT_EQ(a[i].trace, b[i].trace);
    EXPECT_EQ(manifest_record(a[i]), manifest_record(b[i]));
  }
}

TEST(Synthesize, RequiresUnmonitoredPoolForMultiTab) {
  Dataset d = small_world();
  d.unmonitored.clear();
  EXPECT_THROW(synthesize_multitab(d, {2, 1, 0.0, 1}), Error);
  EXPECT_NO_THROW(synthesize_multitab(d, {1, 1, 0.0, 1}));
}

TEST(Synthesize, ManifestRecordFields) {
  const Dataset d = small_world();
  const auto s = synthesize_multitab(d, {2, 1, 0.1, 3}).front();
  const auto j = manifest_record(s);
  for (const char* key : {"sample_id", "class", "tab_count", "overlap", "seed", "true_start_index", "true_start_time",
                          "constituent_source_ids"})
    EXPECT_TRUE(j.contains(key)) << key;
  EXPECT_EQ(j["sample_id"], "mt-0-0");
}

TEST(Fixture, PerturbedSamplesStayCloseToTemplate) {
  FixtureSpec spec;
  spec.classes = 2;
  spec.samples_per_class = 10;
  const Dataset d = make_fixture(spec);
  for (const auto& c : d.monitored)
    for (const auto& t : c) {
      EXPECT_GT(t.size(), 350u);
      EXPECT_LE(t.size(), 400u);
    }
}

}  // namespace
}  // namespace tsawf
