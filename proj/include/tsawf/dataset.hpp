#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "tsawf/rng.hpp"
#include "tsawf/trace.hpp"

namespace tsawf {

/// Labeled single-tab traces. monitored[c] holds every trace of class c;
/// class ids are dense.
struct Dataset {
  std::vector<std::vector<Trace>> monitored;
  std::vector<Trace> unmonitored;
  std::string source_path;

  std::size_t class_count() const noexcept { return monitored.size(); }
  std::size_t monitored_count() const noexcept;
  /// All traces, monitored classes in id order then unmonitored.
  std::vector<Trace> all_traces() const;
};

struct LoadOptions {
  ParseOptions parse;
  std::size_t jobs = 1;
};

/// Reads `root/monitored/<class_id>/*.trace` and `root/unmonitored/*.trace`
/// (the unmonitored directory is optional). Files are visited in name order.
/// Every parse failure is collected first; if any occurred the load aborts
/// with one error listing them all.
Dataset load_dataset(const std::string& root, const LoadOptions& options = {});

/// Inverse layout of load_dataset; sample files are named <zero-padded index>.trace.
void save_dataset(const std::string& root, const Dataset& d);

struct SplitSpec {
  double train_fraction = 0.9;
  std::uint64_t seed = 0;
};

/// Stratified split: each class (and the unmonitored pool, as its own stratum)
/// keeps floor(fraction * n) traces for training with at least one trace on
/// each side. Within each side traces keep their original relative order.
std::pair<Dataset, Dataset> split(const Dataset& d, const SplitSpec& spec);

struct MergeResult {
  Trace trace;
  /// Index in the merged ordering of each constituent's first packet.
  std::vector<std::size_t> start_indices;
  /// Merged-timeline time of each constituent's first packet.
  std::vector<double> start_times;
};

/// Overlays traces on one timeline. Trace i+1 starts at end(i) - u_i with
/// u_i ~ U(0, overlap * duration(i)); u_i = 0 and no draw is made when
/// overlap is 0. Ties are ordered by (constituent order, original index).
/// The merged timeline shares the first constituent's time origin, so a single
/// trace merges to itself and captured traces (which start at 0) stay zeroed.
MergeResult merge_traces(std::span<const Trace> traces, double overlap_fraction, Rng& rng);

struct MultiTabSample {
  std::string sample_id;
  Trace trace;
  ClassId monitored_class = 0;
  std::size_t true_start_index = 0;
  double true_start_time = 0.0;
  std::size_t tab_count = 1;
  double overlap_fraction = 0.0;
  std::uint64_t seed = 0;
  std::vector<std::string> constituent_source_ids;
};

struct SynthesisSpec {
  std::size_t tabs = 1;
  std::size_t count_per_class = 1;
  double overlap = 0.0;
  std::uint64_t seed = 0;
  std::string id_prefix = "mt";
};

/// For each class, count_per_class samples: one random trace of the class
/// placed at a uniformly random tab slot, the other tabs filled with random
/// unmonitored traces (with replacement). Sample k of class c draws from its
/// own stream derive_seed(seed, {c, k}).
std::vector<MultiTabSample> synthesize_multitab(const Dataset& d, const SynthesisSpec& spec);

nlohmann::json manifest_record(const MultiTabSample& s);
void write_manifest_jsonl(const std::string& path, std::span<const MultiTabSample> samples);

}  // namespace tsawf
