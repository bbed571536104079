#include <CLI11.hpp>

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <numeric>
#include <optional>

#include <nlohmann/json.hpp>

#include "tsawf/classifier.hpp"
#include "tsawf/dataset.hpp"
#include "tsawf/distance_matrix.hpp"
#include "tsawf/error.hpp"
#include "tsawf/experiment.hpp"
#include "tsawf/features.hpp"
#include "tsawf/hash.hpp"
#include "tsawf/locator.hpp"
#include "tsawf/prototypes.hpp"
#include "tsawf/synthetic.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace tsawf;

namespace {

void emit(const json& j, const std::string& out) {
  if (out.empty() || out == "-") {
    std::cout << j.dump(2) << '\n';
    return;
  }
  std::ofstream f(out);
  if (!f) fail(Errc::Io, "cannot write " + out);
  f << j.dump(2) << '\n';
}

json read_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(Errc::Io, "cannot read " + path);
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    fail(Errc::InvalidConfig, path + ": " + e.what());
  }
}

struct Samples {
  std::vector<Trace> traces;
  std::vector<std::string> ids;
  std::vector<std::optional<ClassId>> labels;
  std::vector<MultiTabSample> multitab;
};

// Single-tab traces from a dataset directory, or multi-tab samples from a synth output.
Samples load_samples(const std::string& dataset, const std::string& multitab, double time_scale, std::size_t jobs) {
  Samples s;
  if (!multitab.empty()) {
    s.multitab = load_multitab(multitab);
    for (const auto& m : s.multitab) {
      s.traces.push_back(m.trace);
      s.ids.push_back(m.sample_id);
      s.labels.push_back(m.monitored_class);
    }
    return s;
  }
  if (dataset.empty()) fail(Errc::InvalidConfig, "give --dataset or --multitab");
  LoadOptions lo;
  lo.parse.time_scale = time_scale;
  lo.jobs = jobs;
  const Dataset d = load_dataset(dataset, lo);
  for (std::size_t c = 0; c < d.class_count(); ++c)
    for (std::size_t k = 0; k < d.monitored[c].size(); ++k) {
      s.traces.push_back(d.monitored[c][k]);
      s.ids.push_back("c" + std::to_string(c) + "_" + std::to_string(k));
      s.labels.push_back(static_cast<ClassId>(c));
    }
  for (std::size_t k = 0; k < d.unmonitored.size(); ++k) {
    s.traces.push_back(d.unmonitored[k]);
    s.ids.push_back("u_" + std::to_string(k));
    s.labels.push_back(kUnmonitored);
  }
  return s;
}

std::vector<Measure> measures_arg(const std::string& text) { return parse_measure_list(text); }

SlidingPath path_arg(const std::string& s) {
  if (s == "auto") return SlidingPath::Auto;
  if (s == "fft") return SlidingPath::Fft;
  if (s == "naive") return SlidingPath::Naive;
  fail(Errc::InvalidConfig, "unknown sliding path '" + s + "'");
}

template <class T>
std::vector<T> list_arg(const std::string& text) {
  std::vector<T> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      if constexpr (std::is_same_v<T, double>) out.push_back(std::stod(item));
      else out.push_back(static_cast<T>(std::stoull(item)));
    } catch (const std::exception&) {
      fail(Errc::InvalidConfig, "bad list item '" + item + "'");
    }
  }
  return out;
}

void print_report(const EvalReport& rep) {
  std::printf("%-48s %5s %8s %8s\n", "setting", "tabs", "overlap", "accuracy");
  for (const auto& s : rep.settings) std::printf("%-48s %5zu %8.2f %8.4f\n", s.name.c_str(), s.tabs, s.overlap, s.accuracy);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Website fingerprinting by sliding time-series matching"};
  app.require_subcommand(1);
  std::size_t jobs = 1;
  app.add_option("--jobs,-j", jobs, "Worker threads for every parallel stage")->check(CLI::PositiveNumber);
  double time_scale = 1.0;
  app.add_option("--time-scale", time_scale, "Multiplier applied to parsed trace times (1000 for seconds)");

  // ingest
  auto* ingest = app.add_subcommand("ingest", "Validate a dataset directory and summarize it");
  std::string ingest_dataset, ingest_out, ingest_split;
  SplitSpec ingest_spec;
  ingest->add_option("--dataset", ingest_dataset)->required();
  ingest->add_option("--out", ingest_out, "Summary JSON path (stdout if omitted)");
  ingest->add_option("--split", ingest_split, "Write stratified train/ and test/ datasets under this directory");
  ingest->add_option("--train-fraction", ingest_spec.train_fraction);
  ingest->add_option("--seed", ingest_spec.seed);

  // synth
  auto* synth = app.add_subcommand("synth", "Generate datasets or multi-tab samples");
  synth->require_subcommand(1);
  auto* synth_fixture = synth->add_subcommand("fixture", "Generative single-tab dataset");
  FixtureSpec fx;
  std::string fixture_out;
  synth_fixture->add_option("--out", fixture_out)->required();
  synth_fixture->add_option("--classes", fx.classes);
  synth_fixture->add_option("--samples-per-class", fx.samples_per_class);
  synth_fixture->add_option("--unmonitored", fx.unmonitored);
  synth_fixture->add_option("--events", fx.shape.events);
  synth_fixture->add_option("--seed", fx.seed);
  auto* synth_mt = synth->add_subcommand("multitab", "Merge monitored traces with unmonitored ones");
  std::string mt_dataset, mt_out;
  SynthesisSpec mt;
  synth_mt->add_option("--dataset", mt_dataset)->required();
  synth_mt->add_option("--out", mt_out)->required();
  synth_mt->add_option("--tabs", mt.tabs)->check(CLI::PositiveNumber);
  synth_mt->add_option("--overlap", mt.overlap)->check(CLI::Range(0.0, 1.0));
  synth_mt->add_option("--count", mt.count_per_class, "Samples per monitored class");
  synth_mt->add_option("--seed", mt.seed);
  synth_mt->add_option("--prefix", mt.id_prefix);

  // prototypes
  auto* protos = app.add_subcommand("prototypes", "Select prototypes for every monitored class");
  std::string proto_dataset, proto_out, proto_strategy = "feature_cluster";
  std::size_t proto_count = 2;
  std::uint64_t proto_seed = 0;
  protos->add_option("--dataset", proto_dataset, "Training dataset")->required();
  protos->add_option("--out", proto_out)->required();
  protos->add_option("--strategy", proto_strategy, "random | raw_cluster | feature_cluster");
  protos->add_option("--count", proto_count)->check(CLI::PositiveNumber);
  protos->add_option("--seed", proto_seed);

  // shared pipeline options
  std::string prototypes_dir, dataset_dir, multitab_dir, measures_text = "matrix_profile", out_path, cache_dir,
      path_text = "auto";
  std::size_t stride = 1;
  auto pipeline_opts = [&](CLI::App* c, bool need_measures) {
    c->add_option("--prototypes", prototypes_dir, "Prototype bundle directory")->required();
    c->add_option("--dataset", dataset_dir, "Dataset directory of samples");
    c->add_option("--multitab", multitab_dir, "Multi-tab sample directory");
    if (need_measures) {
      c->add_option("--measures", measures_text, "Comma-separated measure names");
      c->add_option("--stride", stride)->check(CLI::PositiveNumber);
      c->add_option("--path", path_text, "auto | fft | naive");
      c->add_option("--cache-dir", cache_dir, "Distance cache directory");
    }
    c->add_option("--out", out_path);
  };

  auto* distances = app.add_subcommand("distances", "Distance matrix of samples against prototypes (CSV)");
  pipeline_opts(distances, true);

  auto* train_cmd = app.add_subcommand("train", "Fit a classifier on prototype distances");
  pipeline_opts(train_cmd, true);
  std::string classifier_text = "gbdt", layout_text = "full";
  bool open_world = false;
  ClassifierParams cparams;
  train_cmd->add_option("--classifier", classifier_text, "threshold | gbdt | random_forest | decision_tree");
  train_cmd->add_option("--layout", layout_text, "full | class-min");
  train_cmd->add_flag("--open-world", open_world, "Keep unmonitored traces as their own label");
  train_cmd->add_option("--rounds", cparams.gbdt.rounds);
  train_cmd->add_option("--max-depth", cparams.gbdt.max_depth);
  train_cmd->add_option("--learning-rate", cparams.gbdt.learning_rate);
  train_cmd->add_option("--trees", cparams.forest.trees);
  train_cmd->add_option("--quantile", cparams.threshold.quantile);
  train_cmd->add_option("--seed", cparams.gbdt.seed);

  auto* predict_cmd = app.add_subcommand("predict", "Label samples with a trained model");
  pipeline_opts(predict_cmd, false);
  std::string model_path;
  predict_cmd->add_option("--model", model_path)->required();
  predict_cmd->add_option("--cache-dir", cache_dir);

  auto* locate_cmd = app.add_subcommand("locate", "Find where the predicted site starts in multi-tab samples");
  std::string labels_csv, locate_measure = "euclidean", summary_out, grid_text;
  locate_cmd->add_option("--prototypes", prototypes_dir)->required();
  locate_cmd->add_option("--multitab", multitab_dir)->required();
  auto* label_opt = locate_cmd->add_option("--labels", labels_csv, "CSV sample_id,predicted_class from any classifier");
  locate_cmd->add_option("--model", model_path, "Predict labels with this model instead")->excludes(label_opt);
  locate_cmd->add_option("--measure", locate_measure);
  locate_cmd->add_option("--stride", stride)->check(CLI::PositiveNumber);
  locate_cmd->add_option("--grid", grid_text, "Comma-separated n values for the accuracy curve");
  locate_cmd->add_option("--out", out_path, "Per-sample CSV");
  locate_cmd->add_option("--summary", summary_out, "Curve JSON (stdout if omitted)");

  auto* eval_cmd = app.add_subcommand("eval", "Run a full experiment from a config file");
  std::string config_path, eval_out, eval_dataset, eval_tabs, eval_overlaps, eval_measures, eval_classifier,
      eval_layout;
  eval_cmd->add_option("--config", config_path, "JSON experiment config");
  eval_cmd->add_option("--output", eval_out, "Output directory (overrides config)");
  eval_cmd->add_option("--dataset", eval_dataset);
  eval_cmd->add_option("--tabs", eval_tabs, "e.g. 1,3,5");
  eval_cmd->add_option("--overlaps", eval_overlaps, "e.g. 0,0.1");
  eval_cmd->add_option("--measures", eval_measures, "One measure set, e.g. mp,wed,euclidean");
  eval_cmd->add_option("--classifier", eval_classifier);
  eval_cmd->add_option("--layout", eval_layout);

  auto* bench_cmd = app.add_subcommand("bench", "Time distance measures");
  BenchConfig bench;
  std::string bench_n, bench_m, bench_measures;
  bool no_naive = false;
  bench_cmd->add_option("--n", bench_n, "Trace lengths, e.g. 30000");
  bench_cmd->add_option("--m", bench_m, "Window lengths, e.g. 3000");
  bench_cmd->add_option("--measures", bench_measures);
  bench_cmd->add_option("--repeats", bench.repeats);
  bench_cmd->add_option("--seed", bench.seed);
  bench_cmd->add_flag("--no-naive", no_naive);
  bench_cmd->add_option("--out", out_path);

  auto* features_cmd = app.add_subcommand("features", "Summary feature schema or values");
  bool schema_flag = false;
  std::string feature_trace;
  features_cmd->add_flag("--schema", schema_flag, "Print the feature schema");
  features_cmd->add_option("--trace", feature_trace, "Print the features of one trace file");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  try {
    if (*ingest) {
      LoadOptions lo;
      lo.parse.time_scale = time_scale;
      lo.jobs = jobs;
      const Dataset d = load_dataset(ingest_dataset, lo);
      std::vector<std::size_t> per_class, lengths;
      for (const auto& c : d.monitored) per_class.push_back(c.size());
      for (const auto& t : d.all_traces()) lengths.push_back(t.size());
      std::sort(lengths.begin(), lengths.end());
      json summary{{"classes", d.class_count()},
                   {"monitored_traces", d.monitored_count()},
                   {"unmonitored_traces", d.unmonitored.size()},
                   {"per_class", per_class},
                   {"min_length", lengths.front()},
                   {"median_length", lengths[(lengths.size() - 1) / 2]},
                   {"max_length", lengths.back()}};
      if (!ingest_split.empty()) {
        const auto [tr, te] = split(d, ingest_spec);
        save_dataset((fs::path(ingest_split) / "train").string(), tr);
        save_dataset((fs::path(ingest_split) / "test").string(), te);
        summary["split"] = {{"train", tr.monitored_count() + tr.unmonitored.size()},
                            {"test", te.monitored_count() + te.unmonitored.size()},
                            {"seed", ingest_spec.seed}};
      }
      emit(summary, ingest_out);
    } else if (*synth_fixture) {
      save_dataset(fixture_out, make_fixture(fx));
    } else if (*synth_mt) {
      LoadOptions lo;
      lo.parse.time_scale = time_scale;
      lo.jobs = jobs;
      const auto samples = synthesize_multitab(load_dataset(mt_dataset, lo), mt);
      save_multitab(mt_out, samples);
      std::cerr << samples.size() << " samples written to " << mt_out << '\n';
    } else if (*protos) {
      LoadOptions lo;
      lo.parse.time_scale = time_scale;
      lo.jobs = jobs;
      const auto b = build_prototypes(load_dataset(proto_dataset, lo), parse_strategy(proto_strategy), proto_count,
                                      proto_seed, jobs);
      save_bundle(proto_out, b);
      std::cerr << b.prototypes.size() << " prototypes written to " << proto_out << '\n';
    } else if (*distances || *train_cmd) {
      const auto bundle = load_bundle(prototypes_dir);
      const auto samples = load_samples(dataset_dir, multitab_dir, time_scale, jobs);
      const auto measures = measures_arg(measures_text);
      DistanceOptions dopt;
      dopt.stride = stride;
      dopt.path = path_arg(path_text);
      const auto m = cached_distance_matrix(cache_dir, samples.traces, bundle, measures, dopt, jobs);
      if (*distances) {
        std::ofstream f(out_path.empty() ? "/dev/stdout" : out_path);
        f << "sample_id,prototype,measure,distance,argmin_packet_index\n";
        for (std::size_t s = 0; s < m.samples; ++s)
          for (std::size_t p = 0; p < m.prototypes; ++p)
            for (std::size_t k = 0; k < m.measures; ++k) {
              const auto& pr = bundle.prototypes[p];
              f << samples.ids[s] << ",c" << pr.class_id << "_r" << pr.cluster_rank << ',' << measures[k].key() << ','
                << format_double(m.at(s, p, k)) << ',' << m.argmin(s, p, k) << '\n';
            }
      } else {
        const auto layout = parse_layout(layout_text);
        const auto schema = make_schema(bundle, measures, layout);
        const auto rows = feature_rows(m, bundle, schema);
        std::vector<std::vector<double>> kept;
        std::vector<ClassId> labels;
        for (std::size_t i = 0; i < rows.size(); ++i) {
          if (!samples.labels[i] || (*samples.labels[i] == kUnmonitored && !open_world)) continue;
          kept.push_back(rows[i]);
          labels.push_back(*samples.labels[i]);
        }
        cparams.gbdt.jobs = jobs;
        cparams.threshold.open_world = open_world;
        const auto clf = Classifier::train(parse_classifier(classifier_text), kept, labels, schema, cparams);
        json j = clf.to_json();
        j["pipeline"] = {{"measures", measures_text},
                         {"layout", layout_name(layout)},
                         {"stride", stride},
                         {"path", path_text},
                         {"open_world", open_world},
                         {"bundle_hash", hex64(bundle.hash())}};
        emit(j, out_path.empty() ? "model.json" : out_path);
        std::cerr << "trained " << classifier_text << " on " << kept.size() << " rows, " << schema.width()
                  << " columns\n";
      }
    } else if (*predict_cmd || (*locate_cmd && !model_path.empty())) {
      const auto bundle = load_bundle(prototypes_dir);
      const json mj = read_json(model_path);
      if (!mj.contains("pipeline")) fail(Errc::SchemaMismatch, model_path + " lacks pipeline settings");
      const auto& pl = mj["pipeline"];
      const auto measures = measures_arg(pl.at("measures").get<std::string>());
      const auto schema = make_schema(bundle, measures, parse_layout(pl.at("layout").get<std::string>()));
      const auto clf = Classifier::from_json(mj, schema);
      const auto samples = load_samples(dataset_dir, multitab_dir, time_scale, jobs);
      DistanceOptions dopt;
      dopt.stride = pl.at("stride").get<std::size_t>();
      dopt.path = path_arg(pl.at("path").get<std::string>());
      const auto m = cached_distance_matrix(cache_dir, samples.traces, bundle, measures, dopt, jobs);
      const auto rows = feature_rows(m, bundle, schema);
      std::vector<ClassId> predicted;
      for (const auto& r : rows) predicted.push_back(clf.predict(r).label);
      if (*predict_cmd) {
        std::ofstream f(out_path.empty() ? "/dev/stdout" : out_path);
        f << "sample_id,predicted_class,true_class\n";
        // Closed-world models never saw unmonitored traces, so those are not scored.
        const bool model_open_world = pl.value("open_world", false);
        std::size_t correct = 0, known = 0;
        for (std::size_t i = 0; i < predicted.size(); ++i) {
          f << samples.ids[i] << ',' << class_label_string(predicted[i]) << ','
            << (samples.labels[i] ? class_label_string(*samples.labels[i]) : "") << '\n';
          if (samples.labels[i] && (model_open_world || *samples.labels[i] != kUnmonitored)) {
            ++known;
            correct += *samples.labels[i] == predicted[i];
          }
        }
        if (known) std::cerr << "accuracy " << static_cast<double>(correct) / static_cast<double>(known) << " over "
                             << known << " labeled samples\n";
      } else {
        LocatorOptions lopt;
        lopt.measure = Measure::from_json(locate_measure);
        lopt.distance.stride = stride;
        const auto results = locate_all(samples.multitab, predicted, bundle, lopt, jobs);
        if (!out_path.empty()) write_locations_csv(out_path, results);
        const auto grid = grid_text.empty() ? default_location_grid() : list_arg<std::size_t>(grid_text);
        emit({{"measure", lopt.measure.key()}, {"curve", location_curve(results, grid)}}, summary_out);
      }
    } else if (*locate_cmd) {
      if (labels_csv.empty()) fail(Errc::InvalidConfig, "locate needs --labels or --model");
      const auto bundle = load_bundle(prototypes_dir);
      const auto samples = load_multitab(multitab_dir);
      const auto ext = read_label_csv(labels_csv);
      std::vector<ClassId> predicted;
      for (const auto& s : samples) {
        const auto it = ext.find(s.sample_id);
        if (it == ext.end()) fail(Errc::MissingTruth, "no label for sample '" + s.sample_id + "' in " + labels_csv);
        predicted.push_back(it->second);
      }
      LocatorOptions lopt;
      lopt.measure = Measure::from_json(locate_measure);
      lopt.distance.stride = stride;
      const auto results = locate_all(samples, predicted, bundle, lopt, jobs);
      if (!out_path.empty()) write_locations_csv(out_path, results);
      const auto grid = grid_text.empty() ? default_location_grid() : list_arg<std::size_t>(grid_text);
      emit({{"measure", lopt.measure.key()}, {"curve", location_curve(results, grid)}}, summary_out);
    } else if (*eval_cmd) {
      json j = config_path.empty() ? json::object() : read_json(config_path);
      if (!eval_out.empty()) j["output_dir"] = eval_out;
      if (!eval_dataset.empty()) j["dataset"] = eval_dataset;
      if (!eval_tabs.empty()) j["tabs"] = list_arg<std::size_t>(eval_tabs);
      if (!eval_overlaps.empty()) j["overlaps"] = list_arg<double>(eval_overlaps);
      if (!eval_measures.empty()) {
        j.erase("measure_sets");
        j["measures"] = eval_measures;
      }
      if (!eval_classifier.empty()) j["classifier"]["kind"] = eval_classifier;
      if (!eval_layout.empty()) j["classifier"]["layout"] = eval_layout;
      if (app.get_option("--jobs")->count()) j["jobs"] = jobs;
      if (app.get_option("--time-scale")->count()) j["time_scale"] = time_scale;
      const auto rep = run_experiment(ExperimentConfig::from_json(j));
      print_report(rep);
    } else if (*bench_cmd) {
      if (!bench_n.empty()) bench.trace_lengths = list_arg<std::size_t>(bench_n);
      if (!bench_m.empty()) bench.window_lengths = list_arg<std::size_t>(bench_m);
      if (!bench_measures.empty()) bench.measures = measures_arg(bench_measures);
      bench.compare_naive = !no_naive;
      const auto rows = bench_distances(bench);
      std::printf("%-44s %7s %6s %10s %10s %8s\n", "measure", "n", "m", "seconds", "naive", "speedup");
      for (const auto& r : rows)
        std::printf("%-44s %7zu %6zu %10.4f %10s %8s%s\n", r.measure.c_str(), r.trace_length, r.window_length,
                    r.seconds, r.naive_seconds ? std::to_string(*r.naive_seconds).c_str() : "-",
                    r.speedup ? std::to_string(*r.speedup).c_str() : "-", r.slowest ? "  slowest" : "");
      if (!out_path.empty()) emit(bench_json(rows), out_path);
    } else if (*features_cmd) {
      if (schema_flag) {
        std::cout << feature_schema_json().dump(2) << '\n';
      } else if (!feature_trace.empty()) {
        ParseOptions po;
        po.time_scale = time_scale;
        const auto fv = summary_features(read_trace_file(feature_trace, po));
        json j = json::object();
        const auto schema = feature_schema();
        for (std::size_t i = 0; i < schema.size(); ++i) j[std::string(schema[i].name)] = fv.values[i];
        std::cout << j.dump(2) << '\n';
      } else {
        fail(Errc::InvalidConfig, "features needs --schema or --trace");
      }
    }
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return e.exit_code();
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << '\n';
    return 4;
  }
  return 0;
}
