#include "tsawf/experiment.hpp"

#include <algorithm>
#include <bit>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <numeric>
#include <set>

#include "tsawf/distance_matrix.hpp"
#include "tsawf/error.hpp"
#include "tsawf/features.hpp"
#include "tsawf/hash.hpp"
#include "tsawf/parallel.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace tsawf {

namespace {

constexpr const char* kVersion = "1.0.0";

void check_keys(const json& j, std::initializer_list<const char*> allowed, const std::string& where) {
  if (!j.is_object()) fail(Errc::InvalidConfig, where + " must be an object");
  for (const auto& [key, value] : j.items()) {
    if (std::none_of(allowed.begin(), allowed.end(), [&](const char* a) { return key == a; }))
      fail(Errc::InvalidConfig, "unknown key '" + key + "' in " + where);
  }
}

template <class T>
void read(const json& j, const char* key, T& out) {
  if (j.contains(key)) out = j.at(key).get<T>();
}

std::string path_name(SlidingPath p) {
  return p == SlidingPath::Auto ? "auto" : p == SlidingPath::Fft ? "fft" : "naive";
}

SlidingPath parse_path(const std::string& s) {
  if (s == "auto") return SlidingPath::Auto;
  if (s == "fft") return SlidingPath::Fft;
  if (s == "naive") return SlidingPath::Naive;
  fail(Errc::InvalidConfig, "unknown sliding path '" + s + "'");
}

json measures_json(const std::vector<Measure>& ms) {
  json a = json::array();
  for (const auto& m : ms) a.push_back(m.to_json());
  return a;
}

std::vector<Measure> measures_from(const json& j) {
  if (j.is_string()) return parse_measure_list(j.get<std::string>());
  std::vector<Measure> out;
  for (const auto& m : j) out.push_back(Measure::from_json(m));
  return out;
}

using Clock = std::chrono::steady_clock;

// Runs one stage, records its wall-clock and prefixes errors with the stage name.
template <class F>
auto stage(const std::string& name, json& timings, F&& f) {
  const auto t0 = Clock::now();
  auto record = [&] {
    timings[name] = timings.value(name, 0.0) + std::chrono::duration<double>(Clock::now() - t0).count();
  };
  try {
    if constexpr (std::is_void_v<decltype(f())>) {
      f();
      record();
    } else {
      auto r = f();
      record();
      return r;
    }
  } catch (const Error& e) {
    std::string msg = e.what();
    const std::string prefix = std::string(errc_name(e.code())) + ": ";
    if (msg.starts_with(prefix)) msg.erase(0, prefix.size());
    throw Error(e.code(), "stage '" + name + "': " + msg);
  }
}

std::string csv_safe(std::string s) {
  std::replace(s.begin(), s.end(), ',', '_');
  std::replace(s.begin(), s.end(), '\n', '_');
  return s;
}

std::string overlap_tag(double o) {
  const double pct = o * 100.0;
  if (pct == std::round(pct)) return std::to_string(static_cast<long long>(pct));
  return format_double(pct);
}

DistanceMatrix select_columns(const DistanceMatrix& m, const std::vector<std::size_t>& cols) {
  DistanceMatrix out{m.samples, m.prototypes, cols.size(), {}, {}};
  out.values.reserve(m.samples * m.prototypes * cols.size());
  out.argmins.reserve(out.values.capacity());
  for (std::size_t s = 0; s < m.samples; ++s)
    for (std::size_t p = 0; p < m.prototypes; ++p)
      for (std::size_t c : cols) {
        out.values.push_back(m.at(s, p, c));
        out.argmins.push_back(m.argmins[m.index(s, p, c)]);
      }
  return out;
}

struct Cell {
  std::vector<Trace> train;
  std::vector<ClassId> train_labels;
  std::vector<Trace> test;
  std::vector<ClassId> test_labels;
  std::vector<std::string> test_ids;
  std::vector<MultiTabSample> multitab;
};

Cell single_tab_cell(const Dataset& train, const Dataset& test, bool open_world) {
  Cell cell;
  auto add = [](const Dataset& d, bool ow, std::vector<Trace>& out, std::vector<ClassId>& labels,
                std::vector<std::string>* ids) {
    for (std::size_t c = 0; c < d.class_count(); ++c)
      for (std::size_t k = 0; k < d.monitored[c].size(); ++k) {
        out.push_back(d.monitored[c][k]);
        labels.push_back(static_cast<ClassId>(c));
        if (ids) ids->push_back("c" + std::to_string(c) + "_" + std::to_string(k));
      }
    if (!ow) return;
    for (std::size_t k = 0; k < d.unmonitored.size(); ++k) {
      out.push_back(d.unmonitored[k]);
      labels.push_back(kUnmonitored);
      if (ids) ids->push_back("u_" + std::to_string(k));
    }
  };
  add(train, open_world, cell.train, cell.train_labels, nullptr);
  add(test, open_world, cell.test, cell.test_labels, &cell.test_ids);
  return cell;
}

Cell multi_tab_cell(const Dataset& train, const Dataset& test, const ExperimentConfig& cfg, std::size_t tabs,
                    double overlap) {
  Cell cell;
  const std::uint64_t o_bits = std::bit_cast<std::uint64_t>(overlap);
  SynthesisSpec spec;
  spec.tabs = tabs;
  spec.overlap = overlap;
  spec.count_per_class = cfg.multitab_train_per_class;
  spec.seed = derive_seed(cfg.synthesis_seed, {tabs, o_bits, 0});
  spec.id_prefix = "train_t" + std::to_string(tabs) + "_o" + overlap_tag(overlap);
  for (auto& s : synthesize_multitab(train, spec)) {
    cell.train.push_back(s.trace);
    cell.train_labels.push_back(s.monitored_class);
  }
  spec.count_per_class = cfg.multitab_test_per_class;
  spec.seed = derive_seed(cfg.synthesis_seed, {tabs, o_bits, 1});
  spec.id_prefix = "test_t" + std::to_string(tabs) + "_o" + overlap_tag(overlap);
  cell.multitab = synthesize_multitab(test, spec);
  for (const auto& s : cell.multitab) {
    cell.test.push_back(s.trace);
    cell.test_labels.push_back(s.monitored_class);
    cell.test_ids.push_back(s.sample_id);
  }
  return cell;
}

json confusion(const std::vector<ClassId>& truth, const std::vector<ClassId>& pred) {
  std::vector<ClassId> all(truth);
  all.insert(all.end(), pred.begin(), pred.end());
  const auto labels = ordered_classes(all);
  std::map<ClassId, std::size_t> pos;
  for (std::size_t i = 0; i < labels.size(); ++i) pos[labels[i]] = i;
  std::vector<std::vector<std::size_t>> m(labels.size(), std::vector<std::size_t>(labels.size(), 0));
  for (std::size_t i = 0; i < truth.size(); ++i) ++m[pos[truth[i]]][pos[pred[i]]];
  std::vector<std::string> names;
  for (auto l : labels) names.push_back(class_label_string(l));
  return {{"labels", names}, {"matrix", m}};
}

void write_json(const fs::path& p, const json& j) {
  std::ofstream out(p, std::ios::binary);
  if (!out) fail(Errc::Io, "cannot write " + p.string());
  out << j.dump(2) << '\n';
  if (!out) fail(Errc::Io, "failed writing " + p.string());
}

}  // namespace

// --- config ----------------------------------------------------------------------

json ExperimentConfig::to_json() const {
  const auto& g = classifier_params.gbdt;
  const auto& f = classifier_params.forest;
  json sets = json::array();
  for (const auto& s : measure_sets) sets.push_back(measures_json(s));
  return {
      {"dataset", dataset},
      {"time_scale", time_scale},
      {"fixture",
       {{"classes", fixture.classes},
        {"samples_per_class", fixture.samples_per_class},
        {"unmonitored", fixture.unmonitored},
        {"events", fixture.shape.events},
        {"unmonitored_min_events", fixture.unmonitored_min_events},
        {"unmonitored_max_events", fixture.unmonitored_max_events},
        {"jitter_fraction", fixture.perturb.jitter_fraction},
        {"deletion_probability", fixture.perturb.deletion_probability},
        {"seed", fixture.seed}}},
      {"split", {{"train_fraction", split.train_fraction}, {"seed", split.seed}}},
      {"prototypes", {{"strategy", strategy_name(strategy)}, {"count", prototype_count}, {"seed", prototype_seed}}},
      {"measure_sets", sets},
      {"distance", {{"stride", distance.stride}, {"path", path_name(distance.path)}}},
      {"classifier",
       {{"kind", classifier_name(classifier)},
        {"layout", layout_name(layout)},
        {"threshold", {{"quantile", classifier_params.threshold.quantile}}},
        {"gbdt",
         {{"rounds", g.rounds},
          {"max_depth", g.max_depth},
          {"learning_rate", g.learning_rate},
          {"lambda", g.lambda},
          {"gamma", g.gamma},
          {"min_child_weight", g.min_child_weight},
          {"subsample", g.subsample},
          {"seed", g.seed}}},
        {"forest",
         {{"trees", f.trees}, {"max_depth", f.max_depth}, {"min_samples_split", f.min_samples_split}, {"seed", f.seed}}}}},
      {"open_world", open_world},
      {"tabs", tabs},
      {"overlaps", overlaps},
      {"multitab",
       {{"train_per_class", multitab_train_per_class},
        {"test_per_class", multitab_test_per_class},
        {"exclude_dtw", multitab_exclude_dtw},
        {"seed", synthesis_seed}}},
      {"locator", {{"measure", locator.measure.to_json()}, {"stride", locator.distance.stride}, {"grid", location_grid}}},
      {"output_dir", output_dir},
      {"cache_dir", cache_dir},
      {"jobs", jobs},
  };
}

ExperimentConfig ExperimentConfig::from_json(const json& j) {
  ExperimentConfig c;
  try {
    check_keys(j,
               {"dataset", "time_scale", "fixture", "split", "prototypes", "measures", "measure_sets", "distance",
                "classifier", "open_world", "tabs", "overlaps", "multitab", "locator", "output_dir", "cache_dir",
                "jobs"},
               "config");
    read(j, "dataset", c.dataset);
    read(j, "time_scale", c.time_scale);
    if (j.contains("fixture")) {
      const auto& f = j["fixture"];
      check_keys(f,
                 {"classes", "samples_per_class", "unmonitored", "events", "unmonitored_min_events",
                  "unmonitored_max_events", "jitter_fraction", "deletion_probability", "seed"},
                 "fixture");
      read(f, "classes", c.fixture.classes);
      read(f, "samples_per_class", c.fixture.samples_per_class);
      read(f, "unmonitored", c.fixture.unmonitored);
      read(f, "events", c.fixture.shape.events);
      read(f, "unmonitored_min_events", c.fixture.unmonitored_min_events);
      read(f, "unmonitored_max_events", c.fixture.unmonitored_max_events);
      read(f, "jitter_fraction", c.fixture.perturb.jitter_fraction);
      read(f, "deletion_probability", c.fixture.perturb.deletion_probability);
      read(f, "seed", c.fixture.seed);
    }
    if (j.contains("split")) {
      check_keys(j["split"], {"train_fraction", "seed"}, "split");
      read(j["split"], "train_fraction", c.split.train_fraction);
      read(j["split"], "seed", c.split.seed);
    }
    if (j.contains("prototypes")) {
      const auto& p = j["prototypes"];
      check_keys(p, {"strategy", "count", "seed"}, "prototypes");
      if (p.contains("strategy")) c.strategy = parse_strategy(p["strategy"].get<std::string>());
      read(p, "count", c.prototype_count);
      read(p, "seed", c.prototype_seed);
    }
    if (j.contains("measures") && j.contains("measure_sets"))
      fail(Errc::InvalidConfig, "give either 'measures' or 'measure_sets', not both");
    if (j.contains("measures")) c.measure_sets = {measures_from(j["measures"])};
    if (j.contains("measure_sets")) {
      c.measure_sets.clear();
      for (const auto& s : j["measure_sets"]) c.measure_sets.push_back(measures_from(s));
    }
    if (j.contains("distance")) {
      check_keys(j["distance"], {"stride", "path"}, "distance");
      read(j["distance"], "stride", c.distance.stride);
      if (j["distance"].contains("path")) c.distance.path = parse_path(j["distance"]["path"].get<std::string>());
    }
    if (j.contains("classifier")) {
      const auto& k = j["classifier"];
      check_keys(k, {"kind", "layout", "threshold", "gbdt", "forest"}, "classifier");
      if (k.contains("kind")) c.classifier = parse_classifier(k["kind"].get<std::string>());
      if (k.contains("layout")) c.layout = parse_layout(k["layout"].get<std::string>());
      if (k.contains("threshold")) {
        check_keys(k["threshold"], {"quantile"}, "classifier.threshold");
        read(k["threshold"], "quantile", c.classifier_params.threshold.quantile);
      }
      if (k.contains("gbdt")) {
        const auto& g = k["gbdt"];
        auto& p = c.classifier_params.gbdt;
        check_keys(g, {"rounds", "max_depth", "learning_rate", "lambda", "gamma", "min_child_weight", "subsample", "seed"},
                   "classifier.gbdt");
        read(g, "rounds", p.rounds);
        read(g, "max_depth", p.max_depth);
        read(g, "learning_rate", p.learning_rate);
        read(g, "lambda", p.lambda);
        read(g, "gamma", p.gamma);
        read(g, "min_child_weight", p.min_child_weight);
        read(g, "subsample", p.subsample);
        read(g, "seed", p.seed);
      }
      if (k.contains("forest")) {
        const auto& f = k["forest"];
        auto& p = c.classifier_params.forest;
        check_keys(f, {"trees", "max_depth", "min_samples_split", "seed"}, "classifier.forest");
        read(f, "trees", p.trees);
        read(f, "max_depth", p.max_depth);
        read(f, "min_samples_split", p.min_samples_split);
        read(f, "seed", p.seed);
      }
    }
    read(j, "open_world", c.open_world);
    read(j, "tabs", c.tabs);
    read(j, "overlaps", c.overlaps);
    if (j.contains("multitab")) {
      const auto& m = j["multitab"];
      check_keys(m, {"train_per_class", "test_per_class", "exclude_dtw", "seed"}, "multitab");
      read(m, "train_per_class", c.multitab_train_per_class);
      read(m, "test_per_class", c.multitab_test_per_class);
      read(m, "exclude_dtw", c.multitab_exclude_dtw);
      read(m, "seed", c.synthesis_seed);
    }
    if (j.contains("locator")) {
      const auto& l = j["locator"];
      check_keys(l, {"measure", "stride", "grid"}, "locator");
      if (l.contains("measure")) c.locator.measure = Measure::from_json(l["measure"]);
      read(l, "stride", c.locator.distance.stride);
      read(l, "grid", c.location_grid);
    }
    read(j, "output_dir", c.output_dir);
    read(j, "cache_dir", c.cache_dir);
    read(j, "jobs", c.jobs);
  } catch (const json::exception& e) {
    fail(Errc::InvalidConfig, std::string("bad config: ") + e.what());
  }
  if (c.measure_sets.empty()) fail(Errc::InvalidConfig, "no measure sets");
  for (const auto& s : c.measure_sets)
    if (s.empty()) fail(Errc::InvalidConfig, "empty measure set");
  if (c.tabs.empty() || c.overlaps.empty()) fail(Errc::InvalidConfig, "tabs and overlaps must be non-empty");
  for (auto t : c.tabs)
    if (t < 1) fail(Errc::InvalidConfig, "tab counts must be >= 1");
  for (auto o : c.overlaps)
    if (!(o >= 0.0 && o <= 1.0)) fail(Errc::InvalidConfig, "overlaps must be in [0,1]");
  if (c.distance.stride < 1 || c.locator.distance.stride < 1) fail(Errc::InvalidConfig, "stride must be >= 1");
  if (c.jobs < 1) c.jobs = 1;
  return c;
}

ExperimentConfig ExperimentConfig::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(Errc::InvalidConfig, "cannot read config " + path);
  json j;
  try {
    j = json::parse(in, nullptr, true, true);
  } catch (const json::exception& e) {
    fail(Errc::InvalidConfig, path + ": " + e.what());
  }
  return from_json(j);
}

std::string resolve_cache_dir(const ExperimentConfig& config) {
  if (const char* env = std::getenv("TSAWF_CACHE_DIR"); env && *env) return env;
  if (!config.cache_dir.empty()) return config.cache_dir;
  return (fs::path(config.output_dir) / "cache").string();
}

// --- files ------------------------------------------------------------------------

void save_multitab(const std::string& dir, std::span<const MultiTabSample> samples) {
  fs::create_directories(fs::path(dir) / "samples");
  for (const auto& s : samples)
    write_trace_file((fs::path(dir) / "samples" / (s.sample_id + ".trace")).string(), s.trace,
                     TraceFormat::TimeDirection);
  write_manifest_jsonl((fs::path(dir) / "manifest.jsonl").string(), samples);
}

std::vector<MultiTabSample> load_multitab(const std::string& dir) {
  std::ifstream in(fs::path(dir) / "manifest.jsonl");
  if (!in) fail(Errc::MissingDirectory, "no manifest.jsonl in " + dir);
  std::vector<MultiTabSample> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    try {
      const json r = json::parse(line);
      const auto id = r.at("sample_id").get<std::string>();
      ParseOptions po;
      po.source_id = id;
      Trace t = read_trace_file((fs::path(dir) / "samples" / (id + ".trace")).string(), po);
      out.push_back({id, std::move(t), r.at("class").get<ClassId>(), r.at("true_start_index").get<std::size_t>(),
                     r.at("true_start_time").get<double>(), r.at("tab_count").get<std::size_t>(),
                     r.at("overlap").get<double>(), r.at("seed").get<std::uint64_t>(),
                     r.at("constituent_source_ids").get<std::vector<std::string>>()});
    } catch (const json::exception& e) {
      throw ParseError(Errc::MalformedLine, line_no, dir + "/manifest.jsonl: " + e.what());
    }
  }
  return out;
}

void write_predictions_csv(const std::string& path, const SettingResult& r) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(Errc::Io, "cannot write " + path);
  out << "sample_id,true_class,predicted_class,correct\n";
  for (std::size_t i = 0; i < r.predicted.size(); ++i)
    out << csv_safe(r.sample_ids[i]) << ',' << class_label_string(r.truth[i]) << ','
        << class_label_string(r.predicted[i]) << ',' << (r.truth[i] == r.predicted[i] ? 1 : 0) << '\n';
  if (!out) fail(Errc::Io, "failed writing " + path);
}

// --- run --------------------------------------------------------------------------

EvalReport run_experiment(const ExperimentConfig& cfg) {
  EvalReport rep;
  json& timings = rep.timings;
  timings = json::object();
  const fs::path out_dir(cfg.output_dir);
  fs::create_directories(out_dir);
  const std::string cache_dir = resolve_cache_dir(cfg);

  const Dataset data = stage("load", timings, [&] {
    if (cfg.dataset.empty()) return make_fixture(cfg.fixture);
    LoadOptions lo;
    lo.parse.time_scale = cfg.time_scale;
    lo.jobs = cfg.jobs;
    return load_dataset(cfg.dataset, lo);
  });
  const auto [train, test] = stage("split", timings, [&] { return split(data, cfg.split); });
  const PrototypeBundle bundle = stage("prototypes", timings, [&] {
    auto b = build_prototypes(train, cfg.strategy, cfg.prototype_count, cfg.prototype_seed, cfg.jobs);
    save_bundle((out_dir / "prototypes").string(), b);
    return b;
  });

  std::vector<Measure> all;
  for (const auto& set : cfg.measure_sets)
    for (const auto& m : set)
      if (std::find(all.begin(), all.end(), m) == all.end()) all.push_back(m);

  ClassifierParams params = cfg.classifier_params;
  params.threshold.open_world = cfg.open_world;
  params.gbdt.jobs = cfg.jobs;

  json settings = json::array();
  json schema_hashes = json::object();
  std::set<std::string> used_names;
  for (std::size_t tabs : cfg.tabs) {
    std::vector<double> overlaps = cfg.overlaps;
    if (tabs == 1) overlaps = {0.0};
    for (double overlap : overlaps) {
      const std::string cell_tag = "t" + std::to_string(tabs) + "_o" + overlap_tag(overlap);
      const Cell cell = stage("samples", timings, [&] {
        return tabs == 1 ? single_tab_cell(train, test, cfg.open_world)
                         : multi_tab_cell(train, test, cfg, tabs, overlap);
      });
      std::vector<Measure> cell_measures;
      for (const auto& m : all)
        if (!(tabs > 1 && cfg.multitab_exclude_dtw && m.kind == MeasureKind::DTW)) cell_measures.push_back(m);
      if (cell_measures.empty()) continue;
      const DistanceMatrix train_m = stage("distances_train", timings, [&] {
        return cached_distance_matrix(cache_dir, cell.train, bundle, cell_measures, cfg.distance, cfg.jobs);
      });
      const DistanceMatrix test_m = stage("distances_test", timings, [&] {
        return cached_distance_matrix(cache_dir, cell.test, bundle, cell_measures, cfg.distance, cfg.jobs);
      });

      for (std::size_t si = 0; si < cfg.measure_sets.size(); ++si) {
        std::vector<Measure> set;
        std::vector<std::size_t> cols;
        std::string names;
        for (const auto& m : cfg.measure_sets[si]) {
          const auto it = std::find(cell_measures.begin(), cell_measures.end(), m);
          if (it == cell_measures.end()) continue;
          set.push_back(m);
          cols.push_back(static_cast<std::size_t>(it - cell_measures.begin()));
          names += (names.empty() ? "" : "+") + m.name();
        }
        if (set.empty()) continue;
        std::string name = cell_tag + "_" + names;
        if (!used_names.insert(name).second) {
          name += "_s" + std::to_string(si);
          used_names.insert(name);
        }

        SettingResult r;
        r.name = name;
        r.tabs = tabs;
        r.overlap = overlap;
        for (const auto& m : set) r.measure_keys.push_back(m.key());
        const FeatureSchema schema = make_schema(bundle, set, cfg.layout);
        schema_hashes[name] = hex64(schema.hash);
        const Classifier clf = stage("fit", timings, [&] {
          const auto rows = feature_rows(select_columns(train_m, cols), bundle, schema);
          return Classifier::train(cfg.classifier, rows, cell.train_labels, schema, params);
        });
        stage("predict", timings, [&] {
          const auto rows = feature_rows(select_columns(test_m, cols), bundle, schema);
          r.predicted.resize(rows.size());
          parallel_for(rows.size(), cfg.jobs, [&](std::size_t i) { r.predicted[i] = clf.predict(rows[i]).label; });
        });
        r.truth = cell.test_labels;
        r.sample_ids = cell.test_ids;
        r.test_samples = r.truth.size();
        std::size_t correct = 0;
        for (std::size_t i = 0; i < r.truth.size(); ++i) correct += r.truth[i] == r.predicted[i];
        r.accuracy = r.test_samples ? static_cast<double>(correct) / static_cast<double>(r.test_samples) : 0.0;

        json setting{{"name", name},
                     {"tabs", tabs},
                     {"overlap", overlap},
                     {"measures", r.measure_keys},
                     {"classifier", classifier_name(cfg.classifier)},
                     {"layout", layout_name(cfg.layout)},
                     {"test_samples", r.test_samples},
                     {"correct", correct},
                     {"accuracy", r.accuracy},
                     {"confusion", confusion(r.truth, r.predicted)}};
        if (tabs > 1) {
          r.locations = stage("locate", timings, [&] {
            return locate_all(cell.multitab, r.predicted, bundle, cfg.locator, cfg.jobs);
          });
          setting["location"] = {{"measure", cfg.locator.measure.key()},
                                 {"curve", location_curve(r.locations, cfg.location_grid)}};
          write_locations_csv((out_dir / ("locations_" + name + ".csv")).string(), r.locations);
        }
        write_predictions_csv((out_dir / ("predictions_" + name + ".csv")).string(), r);
        settings.push_back(setting);
        rep.settings.push_back(std::move(r));
      }
    }
  }

  json cfg_json = cfg.to_json();
  for (const char* k : {"output_dir", "cache_dir", "jobs"}) cfg_json.erase(k);
  rep.report = {{"format", "tsawf-report"}, {"version", 1}, {"config", cfg_json}, {"settings", settings}};
  write_json(out_dir / "report.json", rep.report);
  write_json(out_dir / "timings.json", timings);

  json seeds{{"split", cfg.split.seed},
             {"prototypes", cfg.prototype_seed},
             {"prototype_class_streams", "derive_seed(prototypes, {class})"},
             {"synthesis", cfg.synthesis_seed},
             {"synthesis_streams", "derive_seed(synthesis, {tabs, overlap_bits, 0=train|1=test}) then {class, sample}"},
             {"gbdt", cfg.classifier_params.gbdt.seed},
             {"forest", cfg.classifier_params.forest.seed}};
  if (cfg.dataset.empty()) seeds["fixture"] = cfg.fixture.seed;
  const json manifest{{"tool", "tsawf"},
                      {"version", kVersion},
                      {"config", cfg.to_json()},
                      {"seeds", seeds},
                      {"dataset_hash", hex64(samples_hash(data.all_traces()))},
                      {"prototype_bundle_hash", hex64(bundle.hash())},
                      {"feature_schema_hashes", schema_hashes},
                      {"feature_schema_version", kFeatureSchemaVersion},
                      {"sliding_stride", cfg.distance.stride},
                      {"stride_note", "offsets are evaluated at every multiple of sliding_stride; 1 scans every packet"},
                      {"cache_dir", cache_dir}};
  write_json(out_dir / "manifest.json", manifest);
  return rep;
}

// --- bench ------------------------------------------------------------------------

std::vector<BenchRow> bench_distances(const BenchConfig& config) {
  std::vector<BenchRow> rows;
  Rng rng = make_rng(config.seed);
  auto component = [&](std::size_t n) {
    Component c;
    double t = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      t += exponential(rng, 10.0);
      c.times.push_back(t);
      c.original_index.push_back(i);
    }
    return c;
  };
  auto time_it = [&](auto&& f) {
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t r = 0; r < std::max<std::size_t>(1, config.repeats); ++r) {
      const auto t0 = Clock::now();
      f();
      best = std::min(best, std::chrono::duration<double>(Clock::now() - t0).count());
    }
    return best;
  };
  for (std::size_t n : config.trace_lengths)
    for (std::size_t m : config.window_lengths) {
      if (m > n || m < 1) continue;
      const Component target = component(n), query = component(m);
      const std::size_t first = rows.size();
      for (const auto& measure : config.measures) {
        BenchRow row;
        row.measure = measure.key();
        row.trace_length = n;
        row.window_length = m;
        DistanceOptions fast;
        row.seconds = time_it([&] { (void)match_component(query, target, measure, fast); });
        const bool sliding = measure.kind == MeasureKind::MatrixProfile || measure.kind == MeasureKind::Euclidean ||
                             measure.kind == MeasureKind::WeightedEuclidean;
        if (sliding && config.compare_naive) {
          DistanceOptions naive;
          naive.path = SlidingPath::Naive;
          row.naive_seconds = time_it([&] { (void)match_component(query, target, measure, naive); });
          row.speedup = *row.naive_seconds / std::max(row.seconds, 1e-12);
        }
        rows.push_back(row);
      }
      std::size_t slowest = first;
      for (std::size_t i = first; i < rows.size(); ++i)
        if (rows[i].seconds > rows[slowest].seconds) slowest = i;
      if (slowest < rows.size()) rows[slowest].slowest = true;
    }
  return rows;
}

json bench_json(const std::vector<BenchRow>& rows) {
  json a = json::array();
  for (const auto& r : rows) {
    json j{{"measure", r.measure},
           {"trace_length", r.trace_length},
           {"window_length", r.window_length},
           {"seconds", r.seconds},
           {"slowest", r.slowest}};
    if (r.naive_seconds) j["naive_seconds"] = *r.naive_seconds;
    if (r.speedup) j["speedup"] = *r.speedup;
    a.push_back(j);
  }
  return a;
}

}  // namespace tsawf
