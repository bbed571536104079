#pragma once

#include <span>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "tsawf/trace.hpp"

namespace tsawf {

/// How a feature responds to scaling every timestamp by k > 0:
/// Time features scale by k, Count features are unchanged, Rate features
/// (per-second binning) have no closed-form response.
enum class FeatureKind { Time, Count, Rate };

struct FeatureInfo {
  std::string_view name;
  FeatureKind kind;
};

inline constexpr int kFeatureSchemaVersion = 1;

/// The fixed feature layout for kFeatureSchemaVersion, in vector order.
std::span<const FeatureInfo> feature_schema();
nlohmann::json feature_schema_json();

struct FeatureVector {
  std::vector<double> values;
  int schema_version = kFeatureSchemaVersion;
};

/// Summary statistics used for prototype clustering. Statistics that are
/// undefined on a degenerate trace (fewer than two packets overall or in one
/// direction) are reported as 0 and the matching `degenerate_*` indicator is 1.
FeatureVector summary_features(const Trace& t);

}  // namespace tsawf
