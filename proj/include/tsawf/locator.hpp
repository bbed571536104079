#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "tsawf/dataset.hpp"
#include "tsawf/distance.hpp"
#include "tsawf/measure.hpp"
#include "tsawf/prototypes.hpp"

namespace tsawf {

struct LocatorOptions {
  /// Raw sliding euclidean by default; normalized matching finds spurious
  /// look-alike windows at the wrong place.
  Measure measure = Measure::euclidean();
  DistanceOptions distance;
};

struct LocationResult {
  std::string sample_id;
  std::optional<ClassId> true_class;
  ClassId predicted_class = kUnmonitored;
  /// Empty when the prediction was kUnmonitored (nothing to locate).
  std::optional<std::size_t> predicted_index;
  std::optional<std::size_t> true_index;
  std::optional<std::size_t> abs_error;
  /// |time of predicted packet - true start time|, in ms.
  std::optional<double> time_error_ms;
  /// Combined distance of the winning prototype.
  double distance = 0.0;
  std::size_t prototype_rank = 0;
};

/// Matches every prototype of `predicted_class` against the sample (rank
/// order, first one wins ties) and reports where the best one starts. The raw
/// match position is the target packet aligned with the prototype's first
/// packet of the matched direction; it is shifted back by the number of
/// prototype packets preceding that one so the index points at the
/// prototype's first packet, then clamped into the trace.
/// Throws NoPrototype when the class has none.
LocationResult locate(const Trace& sample, ClassId predicted_class, const PrototypeBundle& bundle,
                      const LocatorOptions& options = {});

/// locate() plus the ground truth fields of a synthesized sample.
LocationResult locate_sample(const MultiTabSample& sample, ClassId predicted_class, const PrototypeBundle& bundle,
                             const LocatorOptions& options = {});

/// One locate_sample per sample, parallel over samples.
std::vector<LocationResult> locate_all(std::span<const MultiTabSample> samples, std::span<const ClassId> predicted,
                                       const PrototypeBundle& bundle, const LocatorOptions& options = {},
                                       std::size_t jobs = 1);

enum class LocationScoring {
  /// Success needs the right class and |error| <= n; denominator is every sample.
  CorrectClassRequired,
  /// As above, but the denominator is only the correctly classified samples.
  AmongCorrect,
  /// |error| <= n regardless of the predicted class; denominator is every sample.
  IgnoreClass,
};

/// Fraction of located samples under `scoring`. Throws MissingTruth when a
/// result has no true index (or no true class for the class-aware scorings).
/// AmongCorrect over zero correct samples is 0.
double location_accuracy(std::span<const LocationResult> results, std::size_t n,
                         LocationScoring scoring = LocationScoring::CorrectClassRequired);

std::vector<std::size_t> default_location_grid();

/// {"n": [...], "correct_class_required": [...], "among_correct": [...], "ignore_class": [...]}
nlohmann::json location_curve(std::span<const LocationResult> results, std::span<const std::size_t> grid);

/// Columns: sample_id,true_class,predicted_class,true_index,predicted_index,
/// abs_error,time_error_ms,distance,prototype_rank. Unknown values are empty.
void write_locations_csv(const std::string& path, std::span<const LocationResult> results);

/// Labels produced by another classifier: a CSV with a header row and the
/// columns sample_id,predicted_class (class id or "unmonitored").
std::map<std::string, ClassId> read_label_csv(const std::string& path);

}  // namespace tsawf
