#include "tsawf/synthetic.hpp"

#include <algorithm>
#include <cmath>

namespace tsawf {

namespace {

double snap(double t, double quantum) {
  if (quantum <= 0.0) return t;
  return std::round(t / quantum) * quantum;
}

}  // namespace

Trace random_walk_trace(Rng& rng, const TraceShape& shape) {
  std::vector<PacketEvent> events;
  events.reserve(shape.events);
  double t = 0.0;
  // Traces open with an outgoing request at time 0.
  Direction dir = Direction::Outgoing;
  std::size_t burst_left = 1 + static_cast<std::size_t>(exponential(rng, shape.mean_burst_length));
  for (std::size_t i = 0; i < shape.events; ++i) {
    if (i > 0) {
      if (burst_left == 0) {
        dir = uniform01(rng) < shape.outgoing_burst_probability ? Direction::Outgoing : Direction::Incoming;
        burst_left = 1 + static_cast<std::size_t>(exponential(rng, shape.mean_burst_length));
        t += exponential(rng, shape.inter_burst_gap_ms);
      } else {
        t += exponential(rng, shape.intra_burst_gap_ms);
      }
    }
    events.push_back({snap(t, shape.time_quantum_ms), dir});
    --burst_left;
  }
  return Trace(std::move(events));
}

Trace perturb(const Trace& base, const PerturbSpec& spec, Rng& rng) {
  const double mean_iat = base.size() > 1 ? base.duration() / static_cast<double>(base.size() - 1) : 0.0;
  const double sigma = spec.jitter_fraction * mean_iat;
  std::vector<PacketEvent> events;
  events.reserve(base.size());
  for (const auto& e : base.events()) {
    const bool drop = uniform01(rng) < spec.deletion_probability;
    const double jitter = sigma * standard_normal(rng);
    if (drop) continue;
    events.push_back({std::max(0.0, e.time + jitter), e.direction});
  }
  if (events.empty()) events.push_back(base[0]);
  std::stable_sort(events.begin(), events.end(),
                   [](const PacketEvent& a, const PacketEvent& b) { return a.time < b.time; });
  for (auto& e : events) e.time = snap(e.time, spec.time_quantum_ms);
  return Trace(std::move(events), base.label(), base.source_id());
}

Dataset make_fixture(const FixtureSpec& spec) {
  Dataset d;
  d.source_path = "fixture:" + std::to_string(spec.seed);
  d.monitored.resize(spec.classes);
  for (std::size_t c = 0; c < spec.classes; ++c) {
    Rng template_rng = make_rng(spec.seed, {1, c});
    const Trace tmpl = random_walk_trace(template_rng, spec.shape);
    for (std::size_t k = 0; k < spec.samples_per_class; ++k) {
      Rng rng = make_rng(spec.seed, {2, c, k});
      d.monitored[c].push_back(perturb(tmpl, spec.perturb, rng)
                                   .with_label(static_cast<ClassId>(c))
                                   .with_source_id("fixture/" + std::to_string(c) + "/" + std::to_string(k)));
    }
  }
  for (std::size_t u = 0; u < spec.unmonitored; ++u) {
    Rng rng = make_rng(spec.seed, {3, u});
    TraceShape shape = spec.shape;
    const std::size_t span = spec.unmonitored_max_events - spec.unmonitored_min_events + 1;
    shape.events = spec.unmonitored_min_events + uniform_index(rng, span);
    d.unmonitored.push_back(random_walk_trace(rng, shape)
                                .with_label(kUnmonitored)
                                .with_source_id("fixture/unmonitored/" + std::to_string(u)));
  }
  return d;
}

}  // namespace tsawf
