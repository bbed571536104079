#include <algorithm>
#include <cmath>
#include <numeric>

#include "tsawf/classifier.hpp"
#include "tsawf/error.hpp"
#include "tsawf/rng.hpp"

namespace tsawf {

namespace {

double gini(const std::vector<double>& counts, double total) {
  if (total <= 0.0) return 0.0;
  double s = 1.0;
  for (double c : counts) s -= (c / total) * (c / total);
  return s;
}

class CartBuilder {
 public:
  CartBuilder(const std::vector<std::vector<double>>& rows, const std::vector<std::size_t>& y, std::size_t K,
              const ForestParams& params, Rng& rng)
      : rows_(rows), y_(y), K_(K), p_(params), rng_(rng) {}

  Tree build(std::vector<std::size_t> idx) {
    Tree t;
    grow(t, idx, 0);
    return t;
  }

 private:
  std::vector<double> distribution(const std::vector<std::size_t>& idx) const {
    std::vector<double> d(K_, 0.0);
    for (auto i : idx) d[y_[i]] += 1.0;
    for (auto& v : d) v /= static_cast<double>(idx.size());
    return d;
  }

  int grow(Tree& t, std::vector<std::size_t>& idx, std::size_t depth) {
    const int id = static_cast<int>(t.nodes.size());
    t.nodes.emplace_back();
    std::vector<double> counts(K_, 0.0);
    for (auto i : idx) counts[y_[i]] += 1.0;
    const bool pure = std::count_if(counts.begin(), counts.end(), [](double c) { return c > 0; }) <= 1;
    if (pure || depth >= p_.max_depth || idx.size() < p_.min_samples_split) {
      t.nodes[id].value = distribution(idx);
      return id;
    }

    const std::size_t F = rows_.front().size();
    std::vector<std::size_t> features(F);
    std::iota(features.begin(), features.end(), std::size_t{0});
    std::size_t try_count = F;
    if (p_.bagging) {
      try_count = std::max<std::size_t>(1, static_cast<std::size_t>(std::sqrt(static_cast<double>(F))));
      for (std::size_t i = 0; i < try_count; ++i) std::swap(features[i], features[i + uniform_index(rng_, F - i)]);
      std::sort(features.begin(), features.begin() + static_cast<std::ptrdiff_t>(try_count));
    }

    const double n = static_cast<double>(idx.size());
    double best_impurity = gini(counts, n);
    int best_feature = -1;
    double best_split = 0.0;
    std::vector<std::size_t> order = idx;
    for (std::size_t fi = 0; fi < try_count; ++fi) {
      const std::size_t f = features[fi];
      std::stable_sort(order.begin(), order.end(),
                       [&](std::size_t a, std::size_t b) { return rows_[a][f] < rows_[b][f]; });
      std::vector<double> left(K_, 0.0);
      for (std::size_t k = 0; k + 1 < order.size(); ++k) {
        left[y_[order[k]]] += 1.0;
        const double a = rows_[order[k]][f], b = rows_[order[k + 1]][f];
        if (!(b > a)) continue;
        const double nl = static_cast<double>(k + 1), nr = n - nl;
        std::vector<double> right(K_);
        for (std::size_t c = 0; c < K_; ++c) right[c] = counts[c] - left[c];
        const double imp = (nl * gini(left, nl) + nr * gini(right, nr)) / n;
        if (imp < best_impurity - 1e-12) {
          best_impurity = imp;
          best_feature = static_cast<int>(f);
          best_split = a + (b - a) / 2.0;
          if (!(best_split > a)) best_split = b;
        }
      }
    }
    if (best_feature < 0) {
      t.nodes[id].value = distribution(idx);
      return id;
    }
    std::vector<std::size_t> li, ri;
    for (auto i : idx) (rows_[i][static_cast<std::size_t>(best_feature)] < best_split ? li : ri).push_back(i);
    t.nodes[id].feature = best_feature;
    t.nodes[id].split = best_split;
    const int l = grow(t, li, depth + 1);
    const int r = grow(t, ri, depth + 1);
    t.nodes[id].left = l;
    t.nodes[id].right = r;
    return id;
  }

  const std::vector<std::vector<double>>& rows_;
  const std::vector<std::size_t>& y_;
  std::size_t K_;
  const ForestParams& p_;
  Rng& rng_;
};

}  // namespace

ForestModel ForestModel::train(const std::vector<std::vector<double>>& rows, std::span<const ClassId> labels,
                               const ForestParams& params) {
  if (rows.size() != labels.size()) fail(Errc::DimensionMismatch, "rows and labels differ in count");
  if (rows.empty()) fail(Errc::InsufficientData, "no training rows");
  if (params.trees < 1) fail(Errc::InvalidConfig, "forest needs at least one tree");
  ForestModel m;
  m.params_ = params;
  m.classes_ = ordered_classes(labels);
  if (m.classes_.size() < 2) fail(Errc::DegenerateLabels, "classification needs at least two classes");
  m.width_ = rows.front().size();
  for (const auto& r : rows)
    if (r.size() != m.width_) fail(Errc::DimensionMismatch, "training rows differ in length");
  std::vector<std::size_t> y(rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i)
    y[i] = static_cast<std::size_t>(std::find(m.classes_.begin(), m.classes_.end(), labels[i]) - m.classes_.begin());

  for (std::size_t t = 0; t < params.trees; ++t) {
    Rng rng = make_rng(params.seed, {t});
    std::vector<std::size_t> idx(rows.size());
    if (params.bagging) {
      for (auto& i : idx) i = uniform_index(rng, rows.size());
    } else {
      std::iota(idx.begin(), idx.end(), std::size_t{0});
    }
    CartBuilder builder(rows, y, m.classes_.size(), m.params_, rng);
    m.trees_.push_back(builder.build(std::move(idx)));
  }
  return m;
}

Prediction ForestModel::predict(std::span<const double> row) const {
  if (row.size() != width_) fail(Errc::LengthMismatch, "row length differs from model width");
  Prediction p;
  p.scores.assign(classes_.size(), 0.0);
  for (const auto& t : trees_) {
    const auto& leaf = t.leaf(row);
    for (std::size_t k = 0; k < leaf.size(); ++k) p.scores[k] += leaf[k] / static_cast<double>(trees_.size());
  }
  p.label = classes_[argmax_first(p.scores)];
  return p;
}

nlohmann::json ForestModel::to_json() const {
  nlohmann::json trees = nlohmann::json::array();
  for (const auto& t : trees_) trees.push_back(t.to_json());
  return {{"params",
           {{"trees", params_.trees},
            {"max_depth", params_.max_depth},
            {"min_samples_split", params_.min_samples_split},
            {"bagging", params_.bagging},
            {"seed", params_.seed}}},
          {"classes", classes_},
          {"width", width_},
          {"trees", trees}};
}

ForestModel ForestModel::from_json(const nlohmann::json& j) {
  ForestModel m;
  const auto& p = j.at("params");
  m.params_.trees = p.at("trees").get<std::size_t>();
  m.params_.max_depth = p.at("max_depth").get<std::size_t>();
  m.params_.min_samples_split = p.at("min_samples_split").get<std::size_t>();
  m.params_.bagging = p.at("bagging").get<bool>();
  m.params_.seed = p.at("seed").get<std::uint64_t>();
  m.classes_ = j.at("classes").get<std::vector<ClassId>>();
  m.width_ = j.at("width").get<std::size_t>();
  for (const auto& t : j.at("trees")) m.trees_.push_back(Tree::from_json(t));
  return m;
}

}  // namespace tsawf
