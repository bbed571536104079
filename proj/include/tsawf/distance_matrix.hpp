#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "tsawf/distance.hpp"
#include "tsawf/measure.hpp"
#include "tsawf/prototypes.hpp"

namespace tsawf {

/// compute_dist of every (sample, prototype) pair: sample-major, then
/// prototype in bundle order, then measure.
struct DistanceMatrix {
  std::size_t samples = 0;
  std::size_t prototypes = 0;
  std::size_t measures = 0;
  std::vector<double> values;
  std::vector<std::uint64_t> argmins;

  std::size_t index(std::size_t s, std::size_t p, std::size_t m) const {
    return (s * prototypes + p) * measures + m;
  }
  double at(std::size_t s, std::size_t p, std::size_t m) const { return values[index(s, p, m)]; }
  std::size_t argmin(std::size_t s, std::size_t p, std::size_t m) const {
    return static_cast<std::size_t>(argmins[index(s, p, m)]);
  }
};

/// Parallel over samples; the result does not depend on `jobs`.
DistanceMatrix compute_distance_matrix(std::span<const Trace> samples, const PrototypeBundle& bundle,
                                       std::span<const Measure> measures, const DistanceOptions& options = {},
                                       std::size_t jobs = 1);

/// Fingerprints used as cache keys.
std::uint64_t samples_hash(std::span<const Trace> samples);
std::uint64_t measures_hash(std::span<const Measure> measures, const DistanceOptions& options);

struct CacheKey {
  std::uint64_t dataset = 0;
  std::uint64_t bundle = 0;
  std::uint64_t measures = 0;

  /// File stem, e.g. "dm-<dataset>-<bundle>-<measures>".
  std::string stem() const;
};

/// Binary layout (little-endian host order): magic "TSAWFDM1", the three key
/// hashes, samples, prototypes, measures as uint64, then the distances as
/// doubles and the argmin packet indices as uint64. A JSON sidecar
/// `<stem>.json` records the key and dimensions in readable form.
void write_distance_cache(const std::string& dir, const CacheKey& key, const DistanceMatrix& m);

/// nullopt when the file is missing, truncated or recorded under another key.
std::optional<DistanceMatrix> read_distance_cache(const std::string& dir, const CacheKey& key);

/// Looks the matrix up in `cache_dir` (when non-empty), computing and storing it on a miss.
/// `hit` reports which path was taken.
DistanceMatrix cached_distance_matrix(const std::string& cache_dir, std::span<const Trace> samples,
                                      const PrototypeBundle& bundle, std::span<const Measure> measures,
                                      const DistanceOptions& options, std::size_t jobs, bool* hit = nullptr);

}  // namespace tsawf
