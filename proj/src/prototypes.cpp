#include "tsawf/prototypes.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <numeric>

#include "tsawf/error.hpp"
#include "tsawf/features.hpp"
#include "tsawf/hash.hpp"
#include "tsawf/parallel.hpp"

namespace fs = std::filesystem;

namespace tsawf {

std::string_view strategy_name(PrototypeStrategy s) {
  switch (s) {
    case PrototypeStrategy::Random: return "random";
    case PrototypeStrategy::RawCluster: return "raw_cluster";
    case PrototypeStrategy::FeatureCluster: return "feature_cluster";
  }
  return "?";
}

PrototypeStrategy parse_strategy(std::string_view s) {
  if (s == "random") return PrototypeStrategy::Random;
  if (s == "raw_cluster" || s == "raw") return PrototypeStrategy::RawCluster;
  if (s == "feature_cluster" || s == "feature") return PrototypeStrategy::FeatureCluster;
  fail(Errc::InvalidConfig, "unknown prototype strategy '" + std::string(s) + "'");
}

namespace {

double sq_dist(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    s += d * d;
  }
  return s;
}

std::vector<std::vector<double>> plus_plus_seeds(const std::vector<std::vector<double>>& points, std::size_t k,
                                                 Rng& rng) {
  const std::size_t n = points.size();
  std::vector<std::vector<double>> centroids;
  std::vector<char> chosen(n, 0);
  std::vector<double> d2(n, std::numeric_limits<double>::infinity());
  std::size_t pick = uniform_index(rng, n);
  for (;;) {
    chosen[pick] = 1;
    centroids.push_back(points[pick]);
    if (centroids.size() == k) break;
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      d2[i] = std::min(d2[i], sq_dist(points[i], centroids.back()));
      total += d2[i];
    }
    if (total > 0.0) {
      const double r = uniform01(rng) * total;
      double acc = 0.0;
      pick = n;
      for (std::size_t i = 0; i < n; ++i) {
        acc += d2[i];
        if (d2[i] > 0.0 && acc > r) {
          pick = i;
          break;
        }
      }
      // Round-off can leave r at the very top of the range.
      if (pick == n)
        for (std::size_t i = n; i-- > 0;)
          if (d2[i] > 0.0) {
            pick = i;
            break;
          }
    } else {
      // Every point coincides with a centroid: choose among the unchosen uniformly.
      std::vector<std::size_t> rest;
      for (std::size_t i = 0; i < n; ++i)
        if (!chosen[i]) rest.push_back(i);
      pick = rest[uniform_index(rng, rest.size())];
    }
  }
  return centroids;
}

double assign(const std::vector<std::vector<double>>& points, const std::vector<std::vector<double>>& centroids,
              std::vector<std::size_t>& assignments, std::vector<double>& dist) {
  double inertia = 0.0;
  for (std::size_t i = 0; i < points.size(); ++i) {
    std::size_t best = 0;
    double bd = sq_dist(points[i], centroids[0]);
    for (std::size_t j = 1; j < centroids.size(); ++j) {
      const double d = sq_dist(points[i], centroids[j]);
      if (d < bd) {
        bd = d;
        best = j;
      }
    }
    assignments[i] = best;
    dist[i] = bd;
    inertia += bd;
  }
  return inertia;
}

}  // namespace

KMeansResult kmeans(const std::vector<std::vector<double>>& points, std::size_t k, Rng& rng,
                    const KMeansOptions& options) {
  if (k < 1) fail(Errc::InvalidConfig, "kmeans needs k >= 1");
  if (points.size() < k)
    fail(Errc::InsufficientData, "kmeans with k=" + std::to_string(k) + " on " + std::to_string(points.size()) +
                                     " points");
  const std::size_t dim = points.front().size();
  for (const auto& p : points)
    if (p.size() != dim) fail(Errc::DimensionMismatch, "kmeans points have different lengths");

  KMeansResult r;
  r.centroids = plus_plus_seeds(points, k, rng);
  r.assignments.assign(points.size(), 0);
  std::vector<double> dist(points.size());

  for (std::size_t iter = 0; iter < options.max_iter; ++iter) {
    const double inertia = assign(points, r.centroids, r.assignments, dist);
    if (!r.inertia_history.empty()) {
      const double prev = r.inertia_history.back();
      check_invariant(inertia <= prev + 1e-9 * std::max(1.0, prev), "kmeans inertia increased");
    }
    r.inertia_history.push_back(inertia);
    r.iterations = iter + 1;

    std::vector<std::vector<double>> next(k, std::vector<double>(dim, 0.0));
    std::vector<std::size_t> sizes(k, 0);
    for (std::size_t i = 0; i < points.size(); ++i) {
      ++sizes[r.assignments[i]];
      for (std::size_t d = 0; d < dim; ++d) next[r.assignments[i]][d] += points[i][d];
    }
    for (std::size_t j = 0; j < k; ++j) {
      if (sizes[j] > 0) {
        for (auto& v : next[j]) v /= static_cast<double>(sizes[j]);
        continue;
      }
      // Empty cluster: move it onto the point worst served by its centroid.
      std::size_t far = 0;
      for (std::size_t i = 1; i < points.size(); ++i)
        if (dist[i] > dist[far]) far = i;
      next[j] = points[far];
      dist[far] = 0.0;
    }
    double shift = 0.0;
    for (std::size_t j = 0; j < k; ++j) shift = std::max(shift, std::sqrt(sq_dist(next[j], r.centroids[j])));
    r.centroids = std::move(next);
    if (shift < options.tol) break;
  }
  r.inertia = assign(points, r.centroids, r.assignments, dist);
  if (!r.inertia_history.empty()) {
    const double prev = r.inertia_history.back();
    check_invariant(r.inertia <= prev + 1e-9 * std::max(1.0, prev), "kmeans inertia increased");
  }
  r.inertia_history.push_back(r.inertia);
  return r;
}

std::vector<std::vector<double>> pad_raw(std::span<const Trace> traces, std::size_t L) {
  if (L < 1) fail(Errc::InvalidLength, "padding length must be >= 1");
  std::vector<std::vector<double>> out;
  out.reserve(traces.size());
  for (const auto& t : traces) {
    auto s = to_signed_series(t);
    s.resize(L, 0.0);
    out.push_back(std::move(s));
  }
  return out;
}

std::size_t median_length(std::span<const Trace> traces) {
  if (traces.empty()) fail(Errc::InsufficientData, "median length of no traces");
  std::vector<std::size_t> lens;
  for (const auto& t : traces) lens.push_back(t.size());
  std::sort(lens.begin(), lens.end());
  return lens[(lens.size() - 1) / 2];
}

std::vector<std::vector<double>> standardized_features(std::span<const Trace> traces) {
  std::vector<std::vector<double>> x;
  x.reserve(traces.size());
  for (const auto& t : traces) x.push_back(summary_features(t).values);
  if (x.empty()) return x;
  const std::size_t f = x.front().size();
  const double n = static_cast<double>(x.size());
  for (std::size_t j = 0; j < f; ++j) {
    double mean = 0.0;
    for (const auto& row : x) mean += row[j];
    mean /= n;
    double var = 0.0;
    for (const auto& row : x) var += (row[j] - mean) * (row[j] - mean);
    const double sd = std::sqrt(var / n);
    for (auto& row : x) row[j] = sd > 1e-12 * std::max(1.0, std::fabs(mean)) ? (row[j] - mean) / sd : 0.0;
  }
  return x;
}

std::vector<Prototype> select_prototypes(std::span<const Trace> class_traces, ClassId class_id,
                                         PrototypeStrategy strategy, std::size_t count, Rng& rng) {
  if (count < 1) fail(Errc::InvalidConfig, "prototype count must be >= 1");
  if (class_traces.size() < count)
    fail(Errc::InsufficientData, "class " + std::to_string(class_id) + " has " +
                                     std::to_string(class_traces.size()) + " training traces, fewer than " +
                                     std::to_string(count) + " prototypes");
  struct Pick {
    std::size_t member;
    std::size_t size;
  };
  std::vector<Pick> picks;

  if (strategy == PrototypeStrategy::Random) {
    std::vector<std::size_t> order(class_traces.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    for (std::size_t i = 0; i < count; ++i) {
      std::swap(order[i], order[i + uniform_index(rng, order.size() - i)]);
      picks.push_back({order[i], 1});
    }
  } else {
    const auto points = strategy == PrototypeStrategy::RawCluster
                            ? pad_raw(class_traces, median_length(class_traces))
                            : standardized_features(class_traces);
    const KMeansResult km = kmeans(points, count, rng);
    std::vector<std::size_t> sizes(count, 0);
    for (auto a : km.assignments) ++sizes[a];
    std::vector<char> taken(points.size(), 0);
    std::vector<Pick> clusters;
    for (std::size_t j = 0; j < count; ++j) {
      // Nearest member of the cluster; nearest free point if it has none left.
      std::size_t best = points.size();
      double bd = std::numeric_limits<double>::infinity();
      for (int pass = 0; pass < 2 && best == points.size(); ++pass) {
        for (std::size_t i = 0; i < points.size(); ++i) {
          if (taken[i] || (pass == 0 && km.assignments[i] != j)) continue;
          const double d = sq_dist(points[i], km.centroids[j]);
          if (d < bd) {
            bd = d;
            best = i;
          }
        }
      }
      taken[best] = 1;
      clusters.push_back({best, sizes[j]});
    }
    std::stable_sort(clusters.begin(), clusters.end(), [](const Pick& a, const Pick& b) {
      return a.size != b.size ? a.size > b.size : a.member < b.member;
    });
    picks = std::move(clusters);
  }

  std::vector<Prototype> out;
  for (std::size_t r = 0; r < picks.size(); ++r) {
    const Trace& t = class_traces[picks[r].member];
    out.push_back({t, class_id, strategy, r, picks[r].size, picks[r].member, split_directions(t)});
  }
  return out;
}

std::vector<std::size_t> PrototypeBundle::of_class(ClassId c) const {
  std::vector<std::size_t> idx;
  for (std::size_t i = 0; i < prototypes.size(); ++i)
    if (prototypes[i].class_id == c) idx.push_back(i);
  return idx;
}

std::uint64_t PrototypeBundle::hash() const {
  Fnv1a h;
  h.str(strategy_name(strategy)).u64(count).u64(seed).u64(class_count).u64(prototypes.size());
  for (const auto& p : prototypes) {
    h.u64(static_cast<std::uint64_t>(p.class_id)).u64(p.cluster_rank).u64(p.trace.size());
    for (const auto& e : p.trace.events()) h.f64(e.time).u64(static_cast<std::uint64_t>(e.direction == Direction::Outgoing));
  }
  return h.value();
}

namespace {
std::string prototype_file(const Prototype& p) {
  return "class" + std::to_string(p.class_id) + "_rank" + std::to_string(p.cluster_rank) + ".trace";
}
}  // namespace

nlohmann::json PrototypeBundle::manifest() const {
  nlohmann::json list = nlohmann::json::array();
  for (const auto& p : prototypes)
    list.push_back({{"file", prototype_file(p)},
                    {"class", p.class_id},
                    {"cluster_rank", p.cluster_rank},
                    {"cluster_size", p.cluster_size},
                    {"member_index", p.member_index},
                    {"source_id", p.trace.source_id()}});
  return {{"format", 1},
          {"strategy", strategy_name(strategy)},
          {"count", count},
          {"seed", seed},
          {"class_count", class_count},
          {"raw_padding", "per-class lower-median length, zero padded"},
          {"feature_scaling", "per-class z-score, constant features set to 0"},
          {"hash", hex64(hash())},
          {"prototypes", list}};
}

PrototypeBundle build_prototypes(const Dataset& train, PrototypeStrategy strategy, std::size_t count,
                                 std::uint64_t seed, std::size_t jobs) {
  PrototypeBundle b;
  b.strategy = strategy;
  b.count = count;
  b.seed = seed;
  b.class_count = train.class_count();
  std::vector<std::vector<Prototype>> per_class(train.class_count());
  parallel_for(train.class_count(), jobs, [&](std::size_t c) {
    Rng rng = make_rng(seed, {c});
    per_class[c] = select_prototypes(train.monitored[c], static_cast<ClassId>(c), strategy, count, rng);
  });
  for (auto& ps : per_class)
    for (auto& p : ps) b.prototypes.push_back(std::move(p));
  return b;
}

void save_bundle(const std::string& dir, const PrototypeBundle& bundle) {
  fs::create_directories(dir);
  for (const auto& p : bundle.prototypes)
    write_trace_file((fs::path(dir) / prototype_file(p)).string(), p.trace, TraceFormat::TimeDirection);
  std::ofstream out(fs::path(dir) / "manifest.json");
  if (!out) fail(Errc::Io, "cannot write prototype manifest in " + dir);
  out << bundle.manifest().dump(2) << '\n';
}

PrototypeBundle load_bundle(const std::string& dir) {
  std::ifstream in(fs::path(dir) / "manifest.json");
  if (!in) fail(Errc::Io, "no prototype manifest in " + dir);
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
    PrototypeBundle b;
    b.strategy = parse_strategy(j.at("strategy").get<std::string>());
    b.count = j.at("count").get<std::size_t>();
    b.seed = j.at("seed").get<std::uint64_t>();
    b.class_count = j.at("class_count").get<std::size_t>();
    for (const auto& e : j.at("prototypes")) {
      ParseOptions po;
      po.source_id = e.at("source_id").get<std::string>();
      Trace t = read_trace_file((fs::path(dir) / e.at("file").get<std::string>()).string(), po);
      const auto c = e.at("class").get<ClassId>();
      t = t.with_label(c);
      b.prototypes.push_back({t, c, b.strategy, e.at("cluster_rank").get<std::size_t>(),
                              e.at("cluster_size").get<std::size_t>(), e.at("member_index").get<std::size_t>(),
                              split_directions(t)});
    }
    if (j.contains("hash") && j["hash"].get<std::string>() != hex64(b.hash()))
      fail(Errc::SchemaMismatch, "prototype bundle in " + dir + " does not match its recorded hash");
    return b;
  } catch (const nlohmann::json::exception& e) {
    fail(Errc::MalformedLayout, "bad prototype manifest in " + dir + ": " + e.what());
  }
}

}  // namespace tsawf
