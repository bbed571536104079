#include <algorithm>
#include <fstream>
#include <tuple>

#include "tsawf/dataset.hpp"
#include "tsawf/error.hpp"

namespace tsawf {

MergeResult merge_traces(std::span<const Trace> traces, double overlap_fraction, Rng& rng) {
  if (traces.empty()) fail(Errc::InsufficientData, "merge_traces needs at least one trace");
  if (!(overlap_fraction >= 0.0 && overlap_fraction < 1.0))
    fail(Errc::InvalidOverlap, "overlap fraction must be in [0,1)");

  struct Tagged {
    double time;
    std::size_t tab;
    std::size_t index;
    Direction direction;
  };
  std::size_t total = 0;
  for (const auto& t : traces) total += t.size();
  std::vector<Tagged> all;
  all.reserve(total);

  double origin = 0.0;
  for (std::size_t i = 0; i < traces.size(); ++i) {
    const auto& t = traces[i];
    for (std::size_t k = 0; k < t.size(); ++k) all.push_back({origin + t[k].time, i, k, t[k].direction});
    if (i + 1 < traces.size()) {
      double u = 0.0;
      if (overlap_fraction > 0.0) u = uniform_real(rng, 0.0, overlap_fraction * t.duration());
      origin = origin + t.end_time() - u;
    }
  }
  std::sort(all.begin(), all.end(), [](const Tagged& a, const Tagged& b) {
    return std::tie(a.time, a.tab, a.index) < std::tie(b.time, b.tab, b.index);
  });

  MergeResult r{Trace({PacketEvent{}}), std::vector<std::size_t>(traces.size(), 0),
                std::vector<double>(traces.size(), 0.0)};
  std::vector<PacketEvent> events;
  events.reserve(all.size());
  for (std::size_t pos = 0; pos < all.size(); ++pos) {
    const auto& a = all[pos];
    events.push_back({a.time, a.direction});
    if (a.index == 0) {
      r.start_indices[a.tab] = pos;
      r.start_times[a.tab] = a.time;
    }
  }
  std::string source;
  for (std::size_t i = 0; i < traces.size(); ++i) {
    if (i) source += '+';
    source += traces[i].source_id();
  }
  r.trace = Trace(std::move(events), std::nullopt, std::move(source));
  return r;
}

std::vector<MultiTabSample> synthesize_multitab(const Dataset& d, const SynthesisSpec& spec) {
  if (spec.tabs < 1) fail(Errc::InvalidConfig, "tabs must be >= 1");
  if (spec.tabs > 1 && d.unmonitored.empty())
    fail(Errc::InsufficientData, "multi-tab synthesis needs a non-empty unmonitored pool");
  std::vector<MultiTabSample> out;
  out.reserve(d.class_count() * spec.count_per_class);
  for (std::size_t c = 0; c < d.class_count(); ++c) {
    const auto& pool = d.monitored[c];
    if (pool.empty()) fail(Errc::InsufficientData, "class " + std::to_string(c) + " has no traces");
    for (std::size_t k = 0; k < spec.count_per_class; ++k) {
      const std::uint64_t seed = derive_seed(spec.seed, {c, k});
      Rng rng(seed);
      const Trace& monitored = pool[uniform_index(rng, pool.size())];
      const std::size_t slot = uniform_index(rng, spec.tabs);
      std::vector<Trace> tabs;
      tabs.reserve(spec.tabs);
      for (std::size_t s = 0; s < spec.tabs; ++s) {
        if (s == slot) {
          tabs.push_back(monitored);
        } else {
          tabs.push_back(d.unmonitored[uniform_index(rng, d.unmonitored.size())]);
        }
      }
      auto merged = merge_traces(tabs, spec.overlap, rng);
      const std::string id = spec.id_prefix + "-" + std::to_string(c) + "-" + std::to_string(k);
      std::vector<std::string> sources;
      for (const auto& t : tabs) sources.push_back(t.source_id());
      MultiTabSample sample{id,
                            merged.trace.with_label(static_cast<ClassId>(c)).with_source_id(id),
                            static_cast<ClassId>(c),
                            merged.start_indices[slot],
                            merged.start_times[slot],
                            spec.tabs,
                            spec.overlap,
                            seed,
                            std::move(sources)};
      check_invariant(sample.true_start_index < sample.trace.size(), "true start index out of range");
      out.push_back(std::move(sample));
    }
  }
  return out;
}

nlohmann::json manifest_record(const MultiTabSample& s) {
  return {{"sample_id", s.sample_id},
          {"class", s.monitored_class},
          {"tab_count", s.tab_count},
          {"overlap", s.overlap_fraction},
          {"seed", s.seed},
          {"true_start_index", s.true_start_index},
          {"true_start_time", s.true_start_time},
          {"constituent_source_ids", s.constituent_source_ids},
          {"time_origin", "first_constituent"}};
}

void write_manifest_jsonl(const std::string& path, std::span<const MultiTabSample> samples) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(Errc::Io, "cannot write " + path);
  for (const auto& s : samples) out << manifest_record(s).dump() << '\n';
}

}  // namespace tsawf
