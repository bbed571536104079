#pragma once

#include <cstdint>

#include "tsawf/dataset.hpp"
#include "tsawf/rng.hpp"
#include "tsawf/trace.hpp"

namespace tsawf {

/// Generative parameters for desk-scale fixtures. Traces are built from
/// direction bursts: packets inside a burst are close together, gaps between
/// bursts are longer. Times are snapped to a dyadic grid so that shifting a
/// trace along the timeline (as merging does) is exact in floating point.
struct TraceShape {
  std::size_t events = 400;
  double mean_burst_length = 6.0;
  double intra_burst_gap_ms = 1.0;
  double inter_burst_gap_ms = 25.0;
  double outgoing_burst_probability = 0.35;
  double time_quantum_ms = 1.0 / 1024.0;
};

/// A fresh random trace with the given shape. Used both for class templates
/// and for unmonitored "random-walk" traces.
Trace random_walk_trace(Rng& rng, const TraceShape& shape);

struct PerturbSpec {
  /// Gaussian jitter as a fraction of the template's mean inter-arrival time.
  double jitter_fraction = 0.05;
  /// Independent per-event deletion probability.
  double deletion_probability = 0.02;
  double time_quantum_ms = 1.0 / 1024.0;
};

/// Jitters every timestamp, drops events, re-sorts, snaps to the grid.
/// At least one event always survives.
Trace perturb(const Trace& base, const PerturbSpec& spec, Rng& rng);

struct FixtureSpec {
  std::size_t classes = 10;
  std::size_t samples_per_class = 30;
  std::size_t unmonitored = 0;
  TraceShape shape;
  /// Unmonitored traces draw their length uniformly from this range.
  std::size_t unmonitored_min_events = 200;
  std::size_t unmonitored_max_events = 600;
  PerturbSpec perturb;
  std::uint64_t seed = 1;
};

/// One random template per class, samples perturbed from it; plus an
/// unmonitored pool of independent random-walk traces.
Dataset make_fixture(const FixtureSpec& spec);

}  // namespace tsawf
