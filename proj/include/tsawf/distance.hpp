#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "tsawf/measure.hpp"
#include "tsawf/sliding.hpp"
#include "tsawf/trace.hpp"

namespace tsawf {

/// sqrt(sum_k w_k (a_k - b_k)^2), w_k = 1 when `weights` is empty. Never
/// normalizes. Throws LengthMismatch on unequal lengths.
double euclidean(std::span<const double> a, std::span<const double> b, std::span<const double> weights = {});

struct DistanceOptions {
  std::size_t stride = 1;
  SlidingPath path = SlidingPath::Auto;
};

/// Best window of one direction component.
struct ComponentMatch {
  double min_distance = 0.0;
  /// Window start inside the longer of the two components.
  std::size_t argmin_offset = 0;
  /// The prototype component was longer, so the trace component slid over it.
  bool swapped = false;
  /// Either side had no packets in this direction; contributes 0.
  bool empty = false;
};

struct MatchResult {
  ComponentMatch outgoing;
  ComponentMatch incoming;
  /// Original packet index in the target trace where the best window starts,
  /// taken from the outgoing component (incoming when outgoing is empty).
  std::size_t argmin_packet_index = 0;
  double combined_distance = 0.0;
};

struct DistanceVector {
  /// Combined minimum per measure, in the order the measures were given.
  std::vector<double> distances;
  std::vector<std::size_t> argmin_packet_index;
};

/// Best match of one direction component of the prototype against the same
/// component of the target under one measure. Windows and query are re-based
/// to their first value for the raw euclidean family and DTW.
ComponentMatch match_component(const Component& prototype, const Component& target, const Measure& measure,
                               const DistanceOptions& options = {});

MatchResult match(const DirectionalSplit& prototype, const DirectionalSplit& target, const Measure& measure,
                  const DistanceOptions& options = {});

/// Per-measure best match of a prototype against a trace, each direction
/// component slid independently and the two minima summed.
DistanceVector compute_dist(const DirectionalSplit& prototype, const DirectionalSplit& target,
                            std::span<const Measure> measures, const DistanceOptions& options = {});

DistanceVector compute_dist(const Trace& prototype, const Trace& target, std::span<const Measure> measures,
                            const DistanceOptions& options = {});

}  // namespace tsawf
