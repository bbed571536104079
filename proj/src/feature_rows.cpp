#include <algorithm>
#include <limits>
#include <numeric>
#include <set>

#include "tsawf/classifier.hpp"
#include "tsawf/error.hpp"
#include "tsawf/hash.hpp"

namespace tsawf {

std::string_view layout_name(FeatureLayout l) { return l == FeatureLayout::Full ? "full" : "class-min"; }

FeatureLayout parse_layout(std::string_view s) {
  if (s == "full") return FeatureLayout::Full;
  if (s == "class-min" || s == "class_min") return FeatureLayout::ClassMin;
  fail(Errc::InvalidConfig, "unknown feature layout '" + std::string(s) + "'");
}

namespace {

// Bundle positions ordered by (class, cluster rank).
std::vector<std::size_t> column_order(const PrototypeBundle& bundle) {
  std::vector<std::size_t> order(bundle.prototypes.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    const auto& pa = bundle.prototypes[a];
    const auto& pb = bundle.prototypes[b];
    return pa.class_id != pb.class_id ? pa.class_id < pb.class_id : pa.cluster_rank < pb.cluster_rank;
  });
  return order;
}

}  // namespace

FeatureSchema make_schema(const PrototypeBundle& bundle, std::span<const Measure> measures, FeatureLayout layout) {
  if (measures.empty()) fail(Errc::InvalidConfig, "no measures enabled");
  FeatureSchema s;
  s.layout = layout;
  s.class_count = bundle.class_count;
  for (const auto& m : measures) s.measure_keys.push_back(m.key());
  const std::size_t M = measures.size();
  s.class_columns.assign(s.class_count, std::vector<std::vector<std::size_t>>(M));
  if (layout == FeatureLayout::Full) {
    for (std::size_t p : column_order(bundle)) {
      const auto& proto = bundle.prototypes[p];
      if (proto.class_id < 0 || static_cast<std::size_t>(proto.class_id) >= s.class_count)
        fail(Errc::InvalidConfig, "prototype class outside the bundle's class range");
      for (std::size_t k = 0; k < M; ++k) {
        s.class_columns[proto.class_id][k].push_back(s.column_names.size());
        s.column_names.push_back("c" + std::to_string(proto.class_id) + "_r" + std::to_string(proto.cluster_rank) +
                                 "_" + measures[k].name());
      }
    }
  } else {
    for (std::size_t c = 0; c < s.class_count; ++c)
      for (std::size_t k = 0; k < M; ++k) {
        s.class_columns[c][k].push_back(s.column_names.size());
        s.column_names.push_back("c" + std::to_string(c) + "_min_" + measures[k].name());
      }
  }
  for (std::size_t c = 0; c < s.class_count; ++c)
    if (bundle.of_class(static_cast<ClassId>(c)).empty())
      fail(Errc::NoPrototype, "class " + std::to_string(c) + " has no prototype");

  Fnv1a h;
  h.str(layout_name(layout)).u64(s.class_count).u64(bundle.hash());
  for (const auto& k : s.measure_keys) h.str(k);
  for (const auto& n : s.column_names) h.str(n);
  s.hash = h.value();
  return s;
}

std::vector<std::vector<double>> feature_rows(const DistanceMatrix& m, const PrototypeBundle& bundle,
                                              const FeatureSchema& schema) {
  if (m.prototypes != bundle.prototypes.size() || m.measures != schema.measure_keys.size())
    fail(Errc::DimensionMismatch, "distance matrix does not match the bundle and measure list");
  const auto order = column_order(bundle);
  std::vector<std::vector<double>> rows(m.samples, std::vector<double>(schema.width()));
  for (std::size_t s = 0; s < m.samples; ++s) {
    auto& row = rows[s];
    if (schema.layout == FeatureLayout::Full) {
      std::size_t col = 0;
      for (std::size_t p : order)
        for (std::size_t k = 0; k < m.measures; ++k) row[col++] = m.at(s, p, k);
    } else {
      std::fill(row.begin(), row.end(), std::numeric_limits<double>::infinity());
      for (std::size_t p = 0; p < m.prototypes; ++p) {
        const auto c = static_cast<std::size_t>(bundle.prototypes[p].class_id);
        for (std::size_t k = 0; k < m.measures; ++k) {
          double& cell = row[schema.class_columns[c][k][0]];
          cell = std::min(cell, m.at(s, p, k));
        }
      }
    }
  }
  return rows;
}

std::vector<ClassId> ordered_classes(std::span<const ClassId> labels) {
  std::set<ClassId> seen(labels.begin(), labels.end());
  std::vector<ClassId> out;
  for (ClassId c : seen)
    if (c != kUnmonitored) out.push_back(c);
  if (seen.count(kUnmonitored)) out.push_back(kUnmonitored);
  return out;
}

std::size_t argmax_first(std::span<const double> scores) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < scores.size(); ++i)
    if (scores[i] > scores[best]) best = i;
  return best;
}

}  // namespace tsawf
