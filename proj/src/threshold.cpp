#include <algorithm>
#include <cmath>
#include <limits>

#include "tsawf/classifier.hpp"
#include "tsawf/error.hpp"

namespace tsawf {

namespace {

// Linear interpolation between order statistics (the common "type 7" rule).
double quantile_of(std::vector<double> v, double q) {
  std::sort(v.begin(), v.end());
  const double pos = q * static_cast<double>(v.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, v.size() - 1);
  return v[lo] + (pos - static_cast<double>(lo)) * (v[hi] - v[lo]);
}

// Distance in units of the threshold; 0 stays 0 even for a zero threshold.
double ratio(double d, double thr) {
  if (d == 0.0) return 0.0;
  if (thr <= 0.0) return std::numeric_limits<double>::max();
  return d / thr;
}

}  // namespace

std::vector<double> ThresholdModel::class_minima(std::span<const double> row, std::size_t c) const {
  std::vector<double> out;
  for (const auto& cols : class_columns_[c]) {
    double v = std::numeric_limits<double>::infinity();
    for (std::size_t col : cols) v = std::min(v, row[col]);
    out.push_back(v);
  }
  return out;
}

ThresholdModel ThresholdModel::train(const std::vector<std::vector<double>>& rows, std::span<const ClassId> labels,
                                     const FeatureSchema& schema, const ThresholdParams& params) {
  if (rows.size() != labels.size()) fail(Errc::DimensionMismatch, "rows and labels differ in count");
  if (!(params.quantile > 0.0 && params.quantile <= 1.0)) fail(Errc::InvalidConfig, "quantile must be in (0,1]");
  ThresholdModel m;
  m.params_ = params;
  m.class_columns_ = schema.class_columns;
  const std::size_t C = schema.class_count;
  const std::size_t M = schema.measure_keys.size();
  std::vector<std::vector<std::vector<double>>> own(C, std::vector<std::vector<double>>(M));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].size() != schema.width()) fail(Errc::LengthMismatch, "training row does not fit the schema");
    if (labels[i] == kUnmonitored) continue;
    const auto c = static_cast<std::size_t>(labels[i]);
    if (c >= C) fail(Errc::InvalidConfig, "label outside the schema's classes");
    const auto mins = m.class_minima(rows[i], c);
    for (std::size_t k = 0; k < M; ++k) own[c][k].push_back(mins[k]);
  }
  m.thresholds_.assign(C, std::vector<double>(M, 0.0));
  for (std::size_t c = 0; c < C; ++c) {
    if (own[c].front().size() < 3)
      fail(Errc::InsufficientData, "class " + std::to_string(c) + " has fewer than 3 training rows");
    for (std::size_t k = 0; k < M; ++k) m.thresholds_[c][k] = quantile_of(own[c][k], params.quantile);
  }
  for (std::size_t c = 0; c < C; ++c) m.classes_.push_back(static_cast<ClassId>(c));
  if (params.open_world) m.classes_.push_back(kUnmonitored);
  return m;
}

Prediction ThresholdModel::predict(std::span<const double> row) const {
  const std::size_t C = thresholds_.size();
  const std::size_t M = C ? thresholds_.front().size() : 0;
  Prediction p;
  p.scores.assign(classes_.size(), 0.0);
  std::size_t best_candidate = C, best_any = 0;
  double best_candidate_score = std::numeric_limits<double>::infinity();
  double best_any_score = std::numeric_limits<double>::infinity();
  for (std::size_t c = 0; c < C; ++c) {
    const auto mins = class_minima(row, c);
    std::size_t passed = 0;
    double score = 0.0;
    for (std::size_t k = 0; k < M; ++k) {
      passed += mins[k] <= thresholds_[c][k];
      score += std::min(ratio(mins[k], thresholds_[c][k]), 1e300) / static_cast<double>(M);
    }
    p.scores[c] = -score;
    if (score < best_any_score) {
      best_any_score = score;
      best_any = c;
    }
    if (2 * passed > M && score < best_candidate_score) {
      best_candidate_score = score;
      best_candidate = c;
    }
  }
  if (best_candidate < C) {
    p.label = static_cast<ClassId>(best_candidate);
  } else if (params_.open_world) {
    p.label = kUnmonitored;
  } else {
    p.label = static_cast<ClassId>(best_any);
  }
  // Rejection sits at the boundary of one threshold unit.
  if (params_.open_world) p.scores.back() = -1.0;
  return p;
}

nlohmann::json ThresholdModel::to_json() const {
  return {{"quantile", params_.quantile}, {"open_world", params_.open_world}, {"thresholds", thresholds_}};
}

ThresholdModel ThresholdModel::from_json(const nlohmann::json& j, const FeatureSchema& schema) {
  ThresholdModel m;
  m.params_.quantile = j.at("quantile").get<double>();
  m.params_.open_world = j.at("open_world").get<bool>();
  m.thresholds_ = j.at("thresholds").get<std::vector<std::vector<double>>>();
  m.class_columns_ = schema.class_columns;
  if (m.thresholds_.size() != schema.class_count) fail(Errc::SchemaMismatch, "threshold table size differs from schema");
  for (std::size_t c = 0; c < schema.class_count; ++c) m.classes_.push_back(static_cast<ClassId>(c));
  if (m.params_.open_world) m.classes_.push_back(kUnmonitored);
  return m;
}

}  // namespace tsawf
