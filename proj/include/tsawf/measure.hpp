#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "tsawf/weights.hpp"

namespace tsawf {

enum class MeasureKind { MatrixProfile, Euclidean, WeightedEuclidean, CBD, DTW };

std::string_view measure_kind_name(MeasureKind k);
MeasureKind parse_measure_kind(std::string_view s);

/// One distance measure with its parameters. Only the fields relevant to
/// `kind` are read; validate() rejects inconsistent settings.
struct Measure {
  MeasureKind kind = MeasureKind::MatrixProfile;
  /// z-normalize query and windows (MatrixProfile, Euclidean).
  bool normalized = true;
  WeightScheme weights = WeightScheme::ReflectedLogarithmic;
  double exp_base = 0.5;
  /// SAX word length for CBD; 0 picks default_sax_word_length.
  std::size_t word_length = 0;
  std::size_t alphabet = 8;
  /// Sakoe-Chiba half-width for DTW; nullopt is unconstrained.
  std::optional<std::size_t> window;

  static Measure matrix_profile(bool normalized = true);
  static Measure euclidean();
  static Measure weighted_euclidean(WeightScheme scheme = WeightScheme::ReflectedLogarithmic, double exp_base = 0.5);
  static Measure cbd(std::size_t alphabet = 8, std::size_t word_length = 0);
  static Measure dtw(std::optional<std::size_t> window = std::nullopt);
  /// Defaults for a bare kind.
  static Measure of(MeasureKind kind);

  void validate() const;
  /// Short kind name, e.g. "matrix_profile".
  std::string name() const { return std::string(measure_kind_name(kind)); }
  /// Canonical text of kind and relevant parameters; equal keys mean equal measures.
  std::string key() const;

  nlohmann::json to_json() const;
  /// Accepts a bare kind name string or an object {"kind": ..., params...}.
  static Measure from_json(const nlohmann::json& j);

  friend bool operator==(const Measure& a, const Measure& b) { return a.key() == b.key(); }
};

/// The five measures in their canonical order.
std::vector<Measure> all_measures();

/// Comma-separated kind names, e.g. "matrix_profile,euclidean".
std::vector<Measure> parse_measure_list(std::string_view text);

}  // namespace tsawf
