#include <fstream>
#include <sstream>
#include <string>

#include "tsawf/classifier.hpp"
#include "tsawf/error.hpp"
#include "tsawf/hash.hpp"

namespace tsawf {

std::string_view classifier_name(ClassifierKind k) {
  switch (k) {
    case ClassifierKind::Threshold: return "threshold";
    case ClassifierKind::Gbdt: return "gbdt";
    case ClassifierKind::RandomForest: return "random_forest";
    case ClassifierKind::DecisionTree: return "decision_tree";
  }
  return "?";
}

ClassifierKind parse_classifier(std::string_view s) {
  if (s == "threshold") return ClassifierKind::Threshold;
  if (s == "gbdt" || s == "xgboost") return ClassifierKind::Gbdt;
  if (s == "random_forest" || s == "forest") return ClassifierKind::RandomForest;
  if (s == "decision_tree" || s == "tree") return ClassifierKind::DecisionTree;
  fail(Errc::InvalidConfig, "unknown classifier '" + std::string(s) + "'");
}

Classifier Classifier::train(ClassifierKind kind, const std::vector<std::vector<double>>& rows,
                             std::span<const ClassId> labels, const FeatureSchema& schema,
                             const ClassifierParams& params) {
  for (const auto& r : rows)
    if (r.size() != schema.width()) fail(Errc::LengthMismatch, "training row does not match the feature schema");
  Classifier c;
  c.kind_ = kind;
  c.schema_hash_ = schema.hash;
  c.width_ = schema.width();
  switch (kind) {
    case ClassifierKind::Threshold:
      c.threshold_ = std::make_shared<ThresholdModel>(ThresholdModel::train(rows, labels, schema, params.threshold));
      break;
    case ClassifierKind::Gbdt:
      c.gbdt_ = std::make_shared<GbdtModel>(GbdtModel::train(rows, labels, params.gbdt));
      break;
    case ClassifierKind::RandomForest:
      c.forest_ = std::make_shared<ForestModel>(ForestModel::train(rows, labels, params.forest));
      break;
    case ClassifierKind::DecisionTree: {
      ForestParams p = params.forest;
      p.trees = 1;
      p.bagging = false;
      c.forest_ = std::make_shared<ForestModel>(ForestModel::train(rows, labels, p));
      break;
    }
  }
  return c;
}

Prediction Classifier::predict(std::span<const double> row) const {
  if (row.size() != width_) fail(Errc::LengthMismatch, "row length differs from the feature schema");
  if (threshold_) return threshold_->predict(row);
  if (gbdt_) return gbdt_->predict(row);
  return forest_->predict(row);
}

const std::vector<ClassId>& Classifier::classes() const {
  if (threshold_) return threshold_->classes();
  if (gbdt_) return gbdt_->classes();
  return forest_->classes();
}

nlohmann::json Classifier::to_json() const {
  nlohmann::json model;
  if (threshold_) model = threshold_->to_json();
  else if (gbdt_) model = gbdt_->to_json();
  else model = forest_->to_json();
  return {{"format", "tsawf-model"},
          {"version", 1},
          {"kind", std::string(classifier_name(kind_))},
          {"schema_hash", hex64(schema_hash_)},
          {"width", width_},
          {"model", model}};
}

Classifier Classifier::from_json(const nlohmann::json& j, const FeatureSchema& schema) {
  try {
    if (j.at("format").get<std::string>() != "tsawf-model" || j.at("version").get<int>() != 1)
      fail(Errc::SchemaMismatch, "not a version-1 model file");
    const auto stored = j.at("schema_hash").get<std::string>();
    if (stored != hex64(schema.hash))
      fail(Errc::SchemaMismatch,
           "model was trained on feature schema " + stored + ", current schema is " + hex64(schema.hash));
    Classifier c;
    c.kind_ = parse_classifier(j.at("kind").get<std::string>());
    c.schema_hash_ = schema.hash;
    c.width_ = j.at("width").get<std::size_t>();
    if (c.width_ != schema.width()) fail(Errc::SchemaMismatch, "model width differs from the feature schema");
    const auto& m = j.at("model");
    switch (c.kind_) {
      case ClassifierKind::Threshold:
        c.threshold_ = std::make_shared<ThresholdModel>(ThresholdModel::from_json(m, schema));
        break;
      case ClassifierKind::Gbdt:
        c.gbdt_ = std::make_shared<GbdtModel>(GbdtModel::from_json(m));
        break;
      case ClassifierKind::RandomForest:
      case ClassifierKind::DecisionTree:
        c.forest_ = std::make_shared<ForestModel>(ForestModel::from_json(m));
        break;
    }
    return c;
  } catch (const nlohmann::json::exception& e) {
    fail(Errc::SchemaMismatch, std::string("malformed model json: ") + e.what());
  }
}

void Classifier::save(const std::string& path) const {
  std::ofstream out(path);
  if (!out) fail(Errc::Io, "cannot write " + path);
  out << to_json().dump(1) << '\n';
  if (!out) fail(Errc::Io, "failed writing " + path);
}

Classifier Classifier::load(const std::string& path, const FeatureSchema& schema) {
  std::ifstream in(path);
  if (!in) fail(Errc::Io, "cannot read " + path);
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    fail(Errc::SchemaMismatch, path + ": " + e.what());
  }
  return from_json(j, schema);
}

}  // namespace tsawf
