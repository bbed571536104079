#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "tsawf/distance_matrix.hpp"
#include "tsawf/measure.hpp"
#include "tsawf/prototypes.hpp"
#include "tsawf/trace.hpp"

namespace tsawf {

// --- feature rows -------------------------------------------------------------

/// Full: one column per (prototype, measure), ordered by class, cluster rank,
/// then measure. ClassMin: one column per (class, measure) holding the minimum
/// over that class's prototypes.
enum class FeatureLayout { Full, ClassMin };

std::string_view layout_name(FeatureLayout l);
FeatureLayout parse_layout(std::string_view s);

struct FeatureSchema {
  FeatureLayout layout = FeatureLayout::Full;
  std::size_t class_count = 0;
  std::vector<std::string> measure_keys;
  std::vector<std::string> column_names;
  /// class_columns[c][m]: the columns describing class c under measure m.
  std::vector<std::vector<std::vector<std::size_t>>> class_columns;
  std::uint64_t hash = 0;

  std::size_t width() const { return column_names.size(); }
};

FeatureSchema make_schema(const PrototypeBundle& bundle, std::span<const Measure> measures, FeatureLayout layout);

/// Rows in the schema's layout from a distance matrix over the same bundle and measures.
std::vector<std::vector<double>> feature_rows(const DistanceMatrix& m, const PrototypeBundle& bundle,
                                              const FeatureSchema& schema);

// --- models ---------------------------------------------------------------------

/// Classes a model can emit: monitored ids ascending, then kUnmonitored if present.
std::vector<ClassId> ordered_classes(std::span<const ClassId> labels);

struct Prediction {
  ClassId label = 0;
  /// Aligned with the model's classes(); larger is more likely.
  std::vector<double> scores;
};

/// Index of the largest score, first one on ties.
std::size_t argmax_first(std::span<const double> scores);

struct ThresholdParams {
  double quantile = 0.95;
  /// Reject to kUnmonitored when no class qualifies; otherwise pick the nearest class.
  bool open_world = true;
};

/// Per-class, per-measure thresholds on the class's best prototype distance.
class ThresholdModel {
 public:
  static ThresholdModel train(const std::vector<std::vector<double>>& rows, std::span<const ClassId> labels,
                              const FeatureSchema& schema, const ThresholdParams& params = {});

  Prediction predict(std::span<const double> row) const;
  const std::vector<ClassId>& classes() const { return classes_; }
  const std::vector<std::vector<double>>& thresholds() const { return thresholds_; }

  nlohmann::json to_json() const;
  static ThresholdModel from_json(const nlohmann::json& j, const FeatureSchema& schema);

 private:
  std::vector<double> class_minima(std::span<const double> row, std::size_t c) const;

  ThresholdParams params_;
  std::vector<std::vector<std::vector<std::size_t>>> class_columns_;
  std::vector<std::vector<double>> thresholds_;  // [class][measure]
  std::vector<ClassId> classes_;
};

struct TreeNode {
  /// -1 marks a leaf.
  int feature = -1;
  double split = 0.0;
  int left = -1;
  int right = -1;
  /// Leaf output (regression value, or class probabilities for forests).
  std::vector<double> value;
};

/// Binary tree stored as a node array; rows with x[feature] < split go left.
struct Tree {
  std::vector<TreeNode> nodes;

  const std::vector<double>& leaf(std::span<const double> row) const;
  nlohmann::json to_json() const;
  static Tree from_json(const nlohmann::json& j);
};

struct GbdtParams {
  std::size_t rounds = 200;
  std::size_t max_depth = 6;
  double learning_rate = 0.1;
  double lambda = 1.0;
  double gamma = 0.0;
  double min_child_weight = 1e-3;
  /// Row fraction drawn per round (1 = all rows, no draws).
  double subsample = 1.0;
  std::uint64_t seed = 0;
  std::size_t jobs = 1;
};

/// Softmax gradient boosting: each round fits one regression tree per class to
/// the gradient p - y and hessian p(1 - p) with exact greedy splits.
class GbdtModel {
 public:
  static GbdtModel train(const std::vector<std::vector<double>>& rows, std::span<const ClassId> labels,
                         const GbdtParams& params = {}, std::vector<double>* loss_history = nullptr);

  Prediction predict(std::span<const double> row) const;
  std::vector<double> margins(std::span<const double> row) const;
  const std::vector<ClassId>& classes() const { return classes_; }
  std::size_t width() const { return width_; }
  std::size_t tree_count() const;

  nlohmann::json to_json() const;
  static GbdtModel from_json(const nlohmann::json& j);

 private:
  GbdtParams params_;
  std::vector<ClassId> classes_;
  std::size_t width_ = 0;
  std::vector<std::vector<Tree>> trees_;  // [round][class]
};

struct ForestParams {
  std::size_t trees = 100;
  std::size_t max_depth = 32;
  std::size_t min_samples_split = 2;
  /// Bootstrap rows and sample sqrt(width) features per split.
  bool bagging = true;
  std::uint64_t seed = 0;
};

/// Gini-impurity classification trees averaged over a bootstrap ensemble. With
/// one tree and bagging off it is a plain decision tree.
class ForestModel {
 public:
  static ForestModel train(const std::vector<std::vector<double>>& rows, std::span<const ClassId> labels,
                           const ForestParams& params = {});

  Prediction predict(std::span<const double> row) const;
  const std::vector<ClassId>& classes() const { return classes_; }

  nlohmann::json to_json() const;
  static ForestModel from_json(const nlohmann::json& j);

 private:
  ForestParams params_;
  std::vector<ClassId> classes_;
  std::size_t width_ = 0;
  std::vector<Tree> trees_;
};

// --- uniform front end ------------------------------------------------------------

enum class ClassifierKind { Threshold, Gbdt, RandomForest, DecisionTree };

std::string_view classifier_name(ClassifierKind k);
ClassifierKind parse_classifier(std::string_view s);

struct ClassifierParams {
  ThresholdParams threshold;
  GbdtParams gbdt;
  ForestParams forest;
};

/// A trained model bound to the feature schema it was trained on.
class Classifier {
 public:
  static Classifier train(ClassifierKind kind, const std::vector<std::vector<double>>& rows,
                          std::span<const ClassId> labels, const FeatureSchema& schema,
                          const ClassifierParams& params = {});

  /// Throws LengthMismatch when the row does not fit the schema.
  Prediction predict(std::span<const double> row) const;
  ClassifierKind kind() const { return kind_; }
  const std::vector<ClassId>& classes() const;
  std::uint64_t schema_hash() const { return schema_hash_; }

  nlohmann::json to_json() const;
  /// Throws SchemaMismatch if the stored schema hash differs from `schema`.
  static Classifier from_json(const nlohmann::json& j, const FeatureSchema& schema);
  void save(const std::string& path) const;
  static Classifier load(const std::string& path, const FeatureSchema& schema);

 private:
  ClassifierKind kind_ = ClassifierKind::Gbdt;
  std::uint64_t schema_hash_ = 0;
  std::size_t width_ = 0;
  std::shared_ptr<const ThresholdModel> threshold_;
  std::shared_ptr<const GbdtModel> gbdt_;
  std::shared_ptr<const ForestModel> forest_;
};

}  // namespace tsawf
