#include "tsawf/locator.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include "tsawf/error.hpp"
#include "tsawf/parallel.hpp"

namespace tsawf {

namespace {

std::size_t aligned_index(const MatchResult& r, const DirectionalSplit& proto) {
  const ComponentMatch& used = r.outgoing.empty ? r.incoming : r.outgoing;
  const Component& pc = r.outgoing.empty ? proto.incoming : proto.outgoing;
  if (used.empty || used.swapped) return r.argmin_packet_index;
  const std::size_t lead = pc.original_index.front();
  return r.argmin_packet_index >= lead ? r.argmin_packet_index - lead : 0;
}

}  // namespace

LocationResult locate(const Trace& sample, ClassId predicted_class, const PrototypeBundle& bundle,
                      const LocatorOptions& options) {
  LocationResult out;
  out.sample_id = sample.source_id();
  out.predicted_class = predicted_class;
  if (predicted_class == kUnmonitored) return out;
  const auto protos = bundle.of_class(predicted_class);
  if (protos.empty()) fail(Errc::NoPrototype, "class " + std::to_string(predicted_class) + " has no prototype");
  options.measure.validate();

  const DirectionalSplit target = split_directions(sample);
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t p : protos) {
    const Prototype& proto = bundle.prototypes[p];
    const MatchResult r = match(proto.split, target, options.measure, options.distance);
    if (r.combined_distance < best) {
      best = r.combined_distance;
      out.distance = r.combined_distance;
      out.prototype_rank = proto.cluster_rank;
      out.predicted_index = std::min(aligned_index(r, proto.split), sample.size() - 1);
    }
  }
  return out;
}

LocationResult locate_sample(const MultiTabSample& sample, ClassId predicted_class, const PrototypeBundle& bundle,
                             const LocatorOptions& options) {
  LocationResult r = locate(sample.trace, predicted_class, bundle, options);
  r.sample_id = sample.sample_id;
  r.true_class = sample.monitored_class;
  r.true_index = sample.true_start_index;
  if (r.predicted_index) {
    const std::size_t p = *r.predicted_index, t = sample.true_start_index;
    r.abs_error = p > t ? p - t : t - p;
    r.time_error_ms = std::fabs(sample.trace[p].time - sample.true_start_time);
  }
  return r;
}

std::vector<LocationResult> locate_all(std::span<const MultiTabSample> samples, std::span<const ClassId> predicted,
                                       const PrototypeBundle& bundle, const LocatorOptions& options,
                                       std::size_t jobs) {
  if (samples.size() != predicted.size()) fail(Errc::DimensionMismatch, "samples and predictions differ in count");
  std::vector<LocationResult> out(samples.size());
  parallel_for(samples.size(), jobs,
               [&](std::size_t i) { out[i] = locate_sample(samples[i], predicted[i], bundle, options); });
  return out;
}

double location_accuracy(std::span<const LocationResult> results, std::size_t n, LocationScoring scoring) {
  std::size_t hits = 0, total = 0;
  for (const auto& r : results) {
    if (!r.true_index) fail(Errc::MissingTruth, "sample '" + r.sample_id + "' has no true location");
    if (scoring != LocationScoring::IgnoreClass && !r.true_class)
      fail(Errc::MissingTruth, "sample '" + r.sample_id + "' has no true class");
    const bool correct = r.true_class && *r.true_class == r.predicted_class;
    const bool close = r.abs_error && *r.abs_error <= n;
    switch (scoring) {
      case LocationScoring::CorrectClassRequired:
        ++total;
        hits += correct && close;
        break;
      case LocationScoring::AmongCorrect:
        if (!correct) break;
        ++total;
        hits += close;
        break;
      case LocationScoring::IgnoreClass:
        ++total;
        hits += close;
        break;
    }
  }
  return total ? static_cast<double>(hits) / static_cast<double>(total) : 0.0;
}

std::vector<std::size_t> default_location_grid() {
  return {0, 1, 2, 5, 10, 20, 50, 100, 200, 500, 1000, 2000, 5000, 10000};
}

nlohmann::json location_curve(std::span<const LocationResult> results, std::span<const std::size_t> grid) {
  nlohmann::json j;
  j["n"] = std::vector<std::size_t>(grid.begin(), grid.end());
  const std::pair<const char*, LocationScoring> series[] = {
      {"correct_class_required", LocationScoring::CorrectClassRequired},
      {"among_correct", LocationScoring::AmongCorrect},
      {"ignore_class", LocationScoring::IgnoreClass}};
  for (const auto& [name, scoring] : series) {
    std::vector<double> v;
    for (std::size_t n : grid) v.push_back(location_accuracy(results, n, scoring));
    j[name] = v;
  }
  return j;
}

void write_locations_csv(const std::string& path, std::span<const LocationResult> results) {
  std::ofstream out(path);
  if (!out) fail(Errc::Io, "cannot write " + path);
  out << "sample_id,true_class,predicted_class,true_index,predicted_index,abs_error,time_error_ms,distance,"
         "prototype_rank\n";
  auto opt = [](const auto& v) {
    std::ostringstream s;
    if (v) s << *v;
    return s.str();
  };
  for (const auto& r : results) {
    out << r.sample_id << ',' << (r.true_class ? class_label_string(*r.true_class) : "") << ','
        << class_label_string(r.predicted_class) << ',' << opt(r.true_index) << ',' << opt(r.predicted_index) << ','
        << opt(r.abs_error) << ',' << (r.time_error_ms ? format_double(*r.time_error_ms) : "") << ','
        << (r.predicted_index ? format_double(r.distance) : "") << ','
        << (r.predicted_index ? std::to_string(r.prototype_rank) : "") << '\n';
  }
  if (!out) fail(Errc::Io, "failed writing " + path);
}

std::map<std::string, ClassId> read_label_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(Errc::Io, "cannot read " + path);
  std::map<std::string, ClassId> labels;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line_no == 1 || line.empty()) continue;
    const auto comma = line.find(',');
    if (comma == std::string::npos) throw ParseError(Errc::MalformedLine, line_no, path + ": expected two columns");
    const std::string id = line.substr(0, comma);
    std::string label = line.substr(comma + 1);
    if (const auto next = label.find(','); next != std::string::npos) label.resize(next);
    try {
      labels[id] = parse_class_label(label);
    } catch (const Error& e) {
      throw ParseError(Errc::MalformedLine, line_no, path + ": " + e.what());
    }
  }
  return labels;
}

}  // namespace tsawf
