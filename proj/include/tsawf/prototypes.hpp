#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "tsawf/dataset.hpp"
#include "tsawf/rng.hpp"
#include "tsawf/trace.hpp"

namespace tsawf {

enum class PrototypeStrategy { Random, RawCluster, FeatureCluster };

std::string_view strategy_name(PrototypeStrategy s);
PrototypeStrategy parse_strategy(std::string_view s);

struct KMeansOptions {
  std::size_t max_iter = 100;
  /// Stop once no centroid moves farther than this (euclidean).
  double tol = 1e-6;
};

struct KMeansResult {
  std::vector<std::vector<double>> centroids;
  std::vector<std::size_t> assignments;
  double inertia = 0.0;
  std::size_t iterations = 0;
  /// Inertia after each assignment step; non-increasing.
  std::vector<double> inertia_history;
};

/// Lloyd's algorithm with k-means++ seeding drawn from `rng`. Ties in the
/// assignment step go to the lowest cluster index. A cluster left empty is
/// re-seeded at the point farthest from its current centroid.
KMeansResult kmeans(const std::vector<std::vector<double>>& points, std::size_t k, Rng& rng,
                    const KMeansOptions& options = {});

/// Signed series of each trace truncated or zero-padded to length L.
std::vector<std::vector<double>> pad_raw(std::span<const Trace> traces, std::size_t L);

/// Lower median of the trace lengths.
std::size_t median_length(std::span<const Trace> traces);

/// Summary features of each trace, each feature standardized to zero mean and
/// unit variance over the given traces (constant features become 0).
std::vector<std::vector<double>> standardized_features(std::span<const Trace> traces);

struct Prototype {
  Trace trace;
  ClassId class_id = 0;
  PrototypeStrategy strategy = PrototypeStrategy::FeatureCluster;
  /// 0 for the largest cluster (or the first random pick).
  std::size_t cluster_rank = 0;
  std::size_t cluster_size = 0;
  /// Position of the trace inside the class's training traces.
  std::size_t member_index = 0;
  DirectionalSplit split;
};

/// Picks `count` distinct member traces of one class. Random samples without
/// replacement; the clustering strategies run kmeans(k = count) on padded raw
/// series or standardized features and keep, per cluster, the member nearest
/// its centroid. Result is ordered by cluster_rank.
std::vector<Prototype> select_prototypes(std::span<const Trace> class_traces, ClassId class_id,
                                         PrototypeStrategy strategy, std::size_t count, Rng& rng);

struct PrototypeBundle {
  PrototypeStrategy strategy = PrototypeStrategy::FeatureCluster;
  std::size_t count = 2;
  std::uint64_t seed = 0;
  std::size_t class_count = 0;
  /// Ordered by (class_id, cluster_rank).
  std::vector<Prototype> prototypes;

  /// Indices into `prototypes` for one class, in rank order.
  std::vector<std::size_t> of_class(ClassId c) const;
  /// Fingerprint over strategy, count, seed and every prototype's events.
  std::uint64_t hash() const;
  nlohmann::json manifest() const;
};

/// Prototypes for every monitored class of `train`. Class c uses the stream
/// derive_seed(seed, {c}); classes are processed on up to `jobs` threads.
PrototypeBundle build_prototypes(const Dataset& train, PrototypeStrategy strategy, std::size_t count,
                                 std::uint64_t seed, std::size_t jobs = 1);

/// Directory with one `.trace` file per prototype and `manifest.json`.
void save_bundle(const std::string& dir, const PrototypeBundle& bundle);
PrototypeBundle load_bundle(const std::string& dir);

}  // namespace tsawf
