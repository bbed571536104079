#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "tsawf/classifier.hpp"
#include "tsawf/error.hpp"
#include "tsawf/parallel.hpp"
#include "tsawf/rng.hpp"

namespace tsawf {

namespace {

struct SplitChoice {
  double gain = 0.0;
  int feature = -1;
  double split = 0.0;
};

struct NodeStats {
  double g = 0.0;
  double h = 0.0;
};

double score(double g, double h, double lambda) { return g * g / (h + lambda); }

// Level-wise exact greedy tree on pre-sorted feature orders.
class TreeBuilder {
 public:
  TreeBuilder(const std::vector<std::vector<double>>& rows, const std::vector<std::vector<std::size_t>>& sorted,
              const GbdtParams& params)
      : rows_(rows), sorted_(sorted), p_(params) {}

  Tree build(const std::vector<double>& grad, const std::vector<double>& hess, const std::vector<char>& in_sample) {
    const std::size_t n = rows_.size();
    Tree tree;
    tree.nodes.emplace_back();
    node_of_.assign(n, -1);
    NodeStats root;
    for (std::size_t i = 0; i < n; ++i) {
      if (!in_sample[i]) continue;
      node_of_[i] = 0;
      root.g += grad[i];
      root.h += hess[i];
    }
    std::vector<int> level{0};
    std::vector<NodeStats> stats{root};  // indexed by node id
    for (std::size_t depth = 0; depth < p_.max_depth && !level.empty(); ++depth) {
      const auto best = best_splits(level, stats, grad, hess);
      std::vector<int> next;
      for (std::size_t li = 0; li < level.size(); ++li) {
        const int id = level[li];
        const auto& choice = best[li];
        if (choice.feature < 0) continue;
        const int l = static_cast<int>(tree.nodes.size());
        tree.nodes.emplace_back();
        tree.nodes.emplace_back();
        tree.nodes[id].feature = choice.feature;
        tree.nodes[id].split = choice.split;
        tree.nodes[id].left = l;
        tree.nodes[id].right = l + 1;
        stats.resize(tree.nodes.size());
        next.push_back(l);
        next.push_back(l + 1);
      }
      if (next.empty()) break;
      for (std::size_t i = 0; i < n; ++i) {
        const int id = node_of_[i];
        // Samples sitting in leaves (split or not, earlier levels included) stay put.
        if (id < 0 || tree.nodes[id].feature < 0) continue;
        const auto& node = tree.nodes[id];
        const int child = rows_[i][static_cast<std::size_t>(node.feature)] < node.split ? node.left : node.right;
        node_of_[i] = child;
        stats[child].g += grad[i];
        stats[child].h += hess[i];
      }
      level = std::move(next);
    }
    for (std::size_t id = 0; id < tree.nodes.size(); ++id) {
      if (tree.nodes[id].feature >= 0) continue;
      const double w = -stats[id].g / (stats[id].h + p_.lambda);
      tree.nodes[id].value = {p_.learning_rate * w};
    }
    return tree;
  }

 private:
  std::vector<SplitChoice> best_splits(const std::vector<int>& level, const std::vector<NodeStats>& stats,
                                       const std::vector<double>& grad, const std::vector<double>& hess) const {
    const std::size_t F = sorted_.size();
    int max_id = 0;
    for (int id : level) max_id = std::max(max_id, id);
    std::vector<int> slot(static_cast<std::size_t>(max_id) + 1, -1);
    for (std::size_t li = 0; li < level.size(); ++li) slot[static_cast<std::size_t>(level[li])] = static_cast<int>(li);

    // per_feature[f][li]: best split of node li using feature f.
    std::vector<std::vector<SplitChoice>> per_feature(F, std::vector<SplitChoice>(level.size()));
    auto scan = [&](std::size_t f) {
      struct Running {
        double g = 0.0, h = 0.0, last = 0.0;
        bool any = false;
      };
      std::vector<Running> run(level.size());
      for (std::size_t i : sorted_[f]) {
        const int id = node_of_[i];
        if (id < 0 || id > max_id || slot[static_cast<std::size_t>(id)] < 0) continue;
        const auto li = static_cast<std::size_t>(slot[static_cast<std::size_t>(id)]);
        auto& r = run[li];
        const double v = rows_[i][f];
        if (r.any && v > r.last) {
          const NodeStats& tot = stats[static_cast<std::size_t>(id)];
          const double gl = r.g, hl = r.h, gr = tot.g - gl, hr = tot.h - hl;
          if (hl >= p_.min_child_weight && hr >= p_.min_child_weight) {
            const double gain = 0.5 * (score(gl, hl, p_.lambda) + score(gr, hr, p_.lambda) -
                                       score(tot.g, tot.h, p_.lambda)) -
                                p_.gamma;
            auto& best = per_feature[f][li];
            if (gain > best.gain) {
              double split = r.last + (v - r.last) / 2.0;
              if (!(split > r.last)) split = v;
              best = {gain, static_cast<int>(f), split};
            }
          }
        }
        r.g += grad[i];
        r.h += hess[i];
        r.last = v;
        r.any = true;
      }
    };
    parallel_for(F, p_.jobs, scan);

    std::vector<SplitChoice> best(level.size());
    for (std::size_t f = 0; f < F; ++f)
      for (std::size_t li = 0; li < level.size(); ++li)
        if (per_feature[f][li].gain > best[li].gain) best[li] = per_feature[f][li];
    return best;
  }

  const std::vector<std::vector<double>>& rows_;
  const std::vector<std::vector<std::size_t>>& sorted_;
  const GbdtParams& p_;
  std::vector<int> node_of_;
};

std::vector<double> softmax(const std::vector<double>& z) {
  const double mx = *std::max_element(z.begin(), z.end());
  std::vector<double> p(z.size());
  double sum = 0.0;
  for (std::size_t k = 0; k < z.size(); ++k) sum += (p[k] = std::exp(z[k] - mx));
  for (auto& v : p) v /= sum;
  return p;
}

}  // namespace

GbdtModel GbdtModel::train(const std::vector<std::vector<double>>& rows, std::span<const ClassId> labels,
                           const GbdtParams& params, std::vector<double>* loss_history) {
  if (rows.size() != labels.size()) fail(Errc::DimensionMismatch, "rows and labels differ in count");
  if (rows.empty()) fail(Errc::InsufficientData, "no training rows");
  if (!(params.subsample > 0.0 && params.subsample <= 1.0)) fail(Errc::InvalidConfig, "subsample must be in (0,1]");
  if (params.learning_rate <= 0.0 || params.lambda < 0.0) fail(Errc::InvalidConfig, "bad boosting hyperparameters");
  GbdtModel m;
  m.params_ = params;
  m.classes_ = ordered_classes(labels);
  if (m.classes_.size() < 2) fail(Errc::DegenerateLabels, "boosting needs at least two classes");
  m.width_ = rows.front().size();
  for (const auto& r : rows) {
    if (r.size() != m.width_) fail(Errc::DimensionMismatch, "training rows differ in length");
    for (double v : r)
      if (!std::isfinite(v)) fail(Errc::InvalidConfig, "non-finite training feature");
  }
  const std::size_t n = rows.size(), K = m.classes_.size();
  std::vector<std::size_t> y(n);
  for (std::size_t i = 0; i < n; ++i)
    y[i] = static_cast<std::size_t>(std::find(m.classes_.begin(), m.classes_.end(), labels[i]) - m.classes_.begin());

  std::vector<std::vector<std::size_t>> sorted(m.width_, std::vector<std::size_t>(n));
  for (std::size_t f = 0; f < m.width_; ++f) {
    auto& o = sorted[f];
    std::iota(o.begin(), o.end(), std::size_t{0});
    std::stable_sort(o.begin(), o.end(), [&](std::size_t a, std::size_t b) { return rows[a][f] < rows[b][f]; });
  }

  std::vector<std::vector<double>> margin(n, std::vector<double>(K, 0.0));
  std::vector<double> grad(n), hess(n);
  std::vector<char> in_sample(n, 1);
  TreeBuilder builder(rows, sorted, m.params_);
  for (std::size_t round = 0; round < params.rounds; ++round) {
    if (params.subsample < 1.0) {
      Rng rng = make_rng(params.seed, {round});
      for (auto& s : in_sample) s = uniform01(rng) < params.subsample;
    }
    std::vector<std::vector<double>> prob(n);
    for (std::size_t i = 0; i < n; ++i) prob[i] = softmax(margin[i]);
    std::vector<Tree> round_trees;
    for (std::size_t k = 0; k < K; ++k) {
      for (std::size_t i = 0; i < n; ++i) {
        const double p = prob[i][k];
        grad[i] = p - (y[i] == k ? 1.0 : 0.0);
        hess[i] = std::max(p * (1.0 - p), 1e-16);
      }
      round_trees.push_back(builder.build(grad, hess, in_sample));
    }
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t k = 0; k < K; ++k) margin[i][k] += round_trees[k].leaf(rows[i])[0];
    m.trees_.push_back(std::move(round_trees));
    if (loss_history) {
      double loss = 0.0;
      for (std::size_t i = 0; i < n; ++i) loss -= std::log(std::max(softmax(margin[i])[y[i]], 1e-300));
      loss_history->push_back(loss / static_cast<double>(n));
    }
  }
  return m;
}

std::vector<double> GbdtModel::margins(std::span<const double> row) const {
  if (row.size() != width_) fail(Errc::LengthMismatch, "row length " + std::to_string(row.size()) +
                                                           " differs from model width " + std::to_string(width_));
  std::vector<double> z(classes_.size(), 0.0);
  for (const auto& round : trees_)
    for (std::size_t k = 0; k < round.size(); ++k) z[k] += round[k].leaf(row)[0];
  return z;
}

Prediction GbdtModel::predict(std::span<const double> row) const {
  Prediction p;
  p.scores = softmax(margins(row));
  p.label = classes_[argmax_first(p.scores)];
  return p;
}

std::size_t GbdtModel::tree_count() const {
  std::size_t n = 0;
  for (const auto& r : trees_) n += r.size();
  return n;
}

nlohmann::json GbdtModel::to_json() const {
  nlohmann::json rounds = nlohmann::json::array();
  for (const auto& r : trees_) {
    nlohmann::json trees = nlohmann::json::array();
    for (const auto& t : r) trees.push_back(t.to_json());
    rounds.push_back(trees);
  }
  return {{"params",
           {{"rounds", params_.rounds},
            {"max_depth", params_.max_depth},
            {"learning_rate", params_.learning_rate},
            {"lambda", params_.lambda},
            {"gamma", params_.gamma},
            {"min_child_weight", params_.min_child_weight},
            {"subsample", params_.subsample},
            {"seed", params_.seed}}},
          {"classes", classes_},
          {"width", width_},
          {"rounds", rounds}};
}

GbdtModel GbdtModel::from_json(const nlohmann::json& j) {
  GbdtModel m;
  const auto& p = j.at("params");
  m.params_.rounds = p.at("rounds").get<std::size_t>();
  m.params_.max_depth = p.at("max_depth").get<std::size_t>();
  m.params_.learning_rate = p.at("learning_rate").get<double>();
  m.params_.lambda = p.at("lambda").get<double>();
  m.params_.gamma = p.at("gamma").get<double>();
  m.params_.min_child_weight = p.at("min_child_weight").get<double>();
  m.params_.subsample = p.at("subsample").get<double>();
  m.params_.seed = p.at("seed").get<std::uint64_t>();
  m.classes_ = j.at("classes").get<std::vector<ClassId>>();
  m.width_ = j.at("width").get<std::size_t>();
  for (const auto& r : j.at("rounds")) {
    std::vector<Tree> trees;
    for (const auto& t : r) trees.push_back(Tree::from_json(t));
    if (trees.size() != m.classes_.size()) fail(Errc::SchemaMismatch, "boosting round has wrong tree count");
    m.trees_.push_back(std::move(trees));
  }
  return m;
}

}  // namespace tsawf
