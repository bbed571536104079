#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "tsawf/classifier.hpp"
#include "tsawf/dataset.hpp"
#include "tsawf/distance.hpp"
#include "tsawf/locator.hpp"
#include "tsawf/measure.hpp"
#include "tsawf/prototypes.hpp"
#include "tsawf/synthetic.hpp"

namespace tsawf {

/// 10 classes of 30 samples plus 100 unmonitored traces.
inline FixtureSpec default_fixture() {
  FixtureSpec f;
  f.unmonitored = 100;
  return f;
}

/// Everything a run depends on. Serializes to JSON and back without loss.
struct ExperimentConfig {
  /// Dataset directory; when empty the generative fixture below is used.
  std::string dataset;
  double time_scale = 1.0;
  FixtureSpec fixture = default_fixture();

  SplitSpec split{0.9, 0};
  PrototypeStrategy strategy = PrototypeStrategy::FeatureCluster;
  std::size_t prototype_count = 2;
  std::uint64_t prototype_seed = 0;

  /// Each entry is one measure set evaluated as its own setting.
  std::vector<std::vector<Measure>> measure_sets{{Measure::matrix_profile()}};
  DistanceOptions distance;

  ClassifierKind classifier = ClassifierKind::Gbdt;
  FeatureLayout layout = FeatureLayout::Full;
  ClassifierParams classifier_params;

  /// Single-tab runs include unmonitored traces (train and test) as their own label.
  bool open_world = false;
  std::vector<std::size_t> tabs{1};
  std::vector<double> overlaps{0.0};
  std::size_t multitab_train_per_class = 20;
  std::size_t multitab_test_per_class = 10;
  /// DTW is quadratic in trace length; leave it out of multi-tab settings.
  bool multitab_exclude_dtw = true;
  std::uint64_t synthesis_seed = 0;

  LocatorOptions locator;
  std::vector<std::size_t> location_grid = default_location_grid();

  std::string output_dir = "tsawf_out";
  /// Empty means <output_dir>/cache; TSAWF_CACHE_DIR overrides both.
  std::string cache_dir;
  std::size_t jobs = 1;

  nlohmann::json to_json() const;
  /// Missing keys keep their defaults; unknown keys are rejected (InvalidConfig).
  static ExperimentConfig from_json(const nlohmann::json& j);
  static ExperimentConfig load(const std::string& path);
};

struct SettingResult {
  std::string name;
  std::size_t tabs = 1;
  double overlap = 0.0;
  std::vector<std::string> measure_keys;
  double accuracy = 0.0;
  std::size_t test_samples = 0;
  std::vector<std::string> sample_ids;
  std::vector<ClassId> truth;
  std::vector<ClassId> predicted;
  /// Filled for multi-tab settings only.
  std::vector<LocationResult> locations;
};

struct EvalReport {
  std::vector<SettingResult> settings;
  /// Deterministic content of report.json.
  nlohmann::json report;
  /// Wall-clock seconds per stage (not part of report.json).
  nlohmann::json timings;
};

/// split -> prototypes -> train distances -> fit -> test distances -> predict
/// -> locate -> report, for every (tabs, overlap, measure set) cell. Writes
/// report.json, timings.json, manifest.json, predictions_<setting>.csv,
/// locations_<setting>.csv and the prototype bundle under output_dir; distance
/// matrices are cached so an interrupted run resumes where it stopped.
EvalReport run_experiment(const ExperimentConfig& config);

/// Directory of the distance cache for this config (TSAWF_CACHE_DIR wins).
std::string resolve_cache_dir(const ExperimentConfig& config);

struct BenchConfig {
  std::vector<std::size_t> trace_lengths{30000};
  std::vector<std::size_t> window_lengths{3000};
  std::vector<Measure> measures{Measure::matrix_profile(false)};
  /// Time the naive loop for sliding measures too (slow at large sizes).
  bool compare_naive = true;
  std::size_t repeats = 1;
  std::uint64_t seed = 0;
};

struct BenchRow {
  std::string measure;
  std::size_t trace_length = 0;
  std::size_t window_length = 0;
  double seconds = 0.0;
  std::optional<double> naive_seconds;
  std::optional<double> speedup;
  bool slowest = false;
};

/// Wall-clock of one prototype-vs-sample match per measure and grid cell,
/// on random-walk series; the slowest measure of each cell is flagged.
std::vector<BenchRow> bench_distances(const BenchConfig& config);
nlohmann::json bench_json(const std::vector<BenchRow>& rows);

/// Multi-tab samples on disk: <dir>/samples/<sample_id>.trace plus <dir>/manifest.jsonl.
void save_multitab(const std::string& dir, std::span<const MultiTabSample> samples);
std::vector<MultiTabSample> load_multitab(const std::string& dir);

/// Columns: sample_id,true_class,predicted_class,correct.
void write_predictions_csv(const std::string& path, const SettingResult& r);

}  // namespace tsawf
