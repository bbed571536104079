#include "tsawf/distance.hpp"

#include <cmath>
#include <limits>
#include <string>
#include <unordered_map>

#include "tsawf/cbd.hpp"
#include "tsawf/dtw.hpp"
#include "tsawf/error.hpp"
#include "tsawf/sax.hpp"
#include "tsawf/weights.hpp"

namespace tsawf {

double euclidean(std::span<const double> a, std::span<const double> b, std::span<const double> weights) {
  if (a.size() != b.size()) fail(Errc::LengthMismatch, "euclidean on sequences of different lengths");
  if (!weights.empty() && weights.size() != a.size())
    fail(Errc::LengthMismatch, "weight vector length differs from sequence length");
  double acc = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) {
    const double d = a[k] - b[k];
    acc += (weights.empty() ? 1.0 : weights[k]) * d * d;
  }
  return std::sqrt(acc);
}

namespace {

struct Best {
  double value = std::numeric_limits<double>::infinity();
  std::size_t offset = 0;
  void offer(double v, std::size_t off) {
    if (v < value) {
      value = v;
      offset = off;
    }
  }
};

Best slide_cbd(std::span<const double> query, std::span<const double> series, bool query_is_target,
               const Measure& measure, std::size_t stride) {
  const std::size_t m = query.size();
  const std::size_t w = measure.word_length ? measure.word_length : default_sax_word_length(m);
  const std::string q = sax_encode(query, w, measure.alphabet);
  const double cq = static_cast<double>(compressed_size(q));
  // Neighbouring windows often quantize to the same word.
  std::unordered_map<std::string, double> memo;
  Best best;
  for (std::size_t off = 0; off + m <= series.size(); off += stride) {
    std::string win = sax_encode(series.subspan(off, m), w, measure.alphabet);
    auto it = memo.find(win);
    if (it == memo.end()) {
      const double cw = static_cast<double>(compressed_size(win));
      // The target-side word always goes first in the concatenation.
      const std::string xy = query_is_target ? q + win : win + q;
      const double v = static_cast<double>(compressed_size(xy)) / (cq + cw);
      it = memo.emplace(std::move(win), v).first;
    }
    best.offer(it->second, off);
  }
  return best;
}

Best slide_dtw(std::span<const double> query, std::span<const double> series, const Measure& measure,
               std::size_t stride) {
  const std::size_t m = query.size();
  Best best;
  for (std::size_t off = 0; off + m <= series.size(); off += stride)
    best.offer(dtw_rebased(series.subspan(off, m), query, measure.window), off);
  return best;
}

}  // namespace

ComponentMatch match_component(const Component& prototype, const Component& target, const Measure& measure,
                               const DistanceOptions& options) {
  ComponentMatch out;
  if (prototype.empty() || target.empty()) {
    out.empty = true;
    return out;
  }
  out.swapped = prototype.size() > target.size();
  const std::span<const double> query = out.swapped ? target.times : prototype.times;
  const std::span<const double> series = out.swapped ? prototype.times : target.times;

  Best best;
  switch (measure.kind) {
    case MeasureKind::MatrixProfile:
    case MeasureKind::Euclidean:
    case MeasureKind::WeightedEuclidean: {
      WeightVector w;
      SlidingOptions so;
      so.normalized = measure.normalized;
      so.rebase = !measure.normalized;
      so.path = options.path;
      so.stride = options.stride;
      if (measure.kind == MeasureKind::WeightedEuclidean) {
        w = make_weights(measure.weights, query.size(), measure.exp_base);
        so.weights = w.values;
      }
      const SlidingResult r = sliding_min_euclidean(query, series, so);
      best.value = r.min_distance;
      best.offset = r.argmin_offset;
      break;
    }
    case MeasureKind::CBD:
      best = slide_cbd(query, series, out.swapped, measure, options.stride);
      break;
    case MeasureKind::DTW:
      best = slide_dtw(query, series, measure, options.stride);
      break;
  }
  out.min_distance = best.value;
  out.argmin_offset = best.offset;
  return out;
}

MatchResult match(const DirectionalSplit& prototype, const DirectionalSplit& target, const Measure& measure,
                  const DistanceOptions& options) {
  if (options.stride < 1) fail(Errc::InvalidConfig, "stride must be >= 1");
  MatchResult r;
  r.outgoing = match_component(prototype.outgoing, target.outgoing, measure, options);
  r.incoming = match_component(prototype.incoming, target.incoming, measure, options);
  r.combined_distance = r.outgoing.min_distance + r.incoming.min_distance;

  auto packet_index = [](const ComponentMatch& m, const Component& t) {
    return t.original_index[m.swapped ? 0 : m.argmin_offset];
  };
  if (!r.outgoing.empty) r.argmin_packet_index = packet_index(r.outgoing, target.outgoing);
  else if (!r.incoming.empty) r.argmin_packet_index = packet_index(r.incoming, target.incoming);
  return r;
}

DistanceVector compute_dist(const DirectionalSplit& prototype, const DirectionalSplit& target,
                            std::span<const Measure> measures, const DistanceOptions& options) {
  if (measures.empty()) fail(Errc::InvalidConfig, "no measures enabled");
  DistanceVector dv;
  dv.distances.reserve(measures.size());
  dv.argmin_packet_index.reserve(measures.size());
  for (const auto& m : measures) {
    const MatchResult r = match(prototype, target, m, options);
    dv.distances.push_back(r.combined_distance);
    dv.argmin_packet_index.push_back(r.argmin_packet_index);
  }
  return dv;
}

DistanceVector compute_dist(const Trace& prototype, const Trace& target, std::span<const Measure> measures,
                            const DistanceOptions& options) {
  return compute_dist(split_directions(prototype), split_directions(target), measures, options);
}

}  // namespace tsawf
