#include "tsawf/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <numeric>
#include <optional>

#include "tsawf/error.hpp"
#include "tsawf/parallel.hpp"

namespace fs = std::filesystem;

namespace tsawf {

std::size_t Dataset::monitored_count() const noexcept {
  std::size_t n = 0;
  for (const auto& c : monitored) n += c.size();
  return n;
}

std::vector<Trace> Dataset::all_traces() const {
  std::vector<Trace> out;
  for (const auto& c : monitored) out.insert(out.end(), c.begin(), c.end());
  out.insert(out.end(), unmonitored.begin(), unmonitored.end());
  return out;
}

namespace {

std::vector<fs::path> trace_files(const fs::path& dir) {
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (entry.is_regular_file() && entry.path().extension() == ".trace") files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());
  return files;
}

std::optional<ClassId> class_dir_id(const std::string& name) {
  ClassId v = 0;
  auto [ptr, ec] = std::from_chars(name.data(), name.data() + name.size(), v);
  if (ec != std::errc{} || ptr != name.data() + name.size() || v < 0) return std::nullopt;
  if (name.size() > 1 && name.front() == '0') return std::nullopt;
  return v;
}

struct PendingFile {
  fs::path path;
  ClassId label;
};

}  // namespace

Dataset load_dataset(const std::string& root, const LoadOptions& options) {
  const fs::path base(root);
  const fs::path mon = base / "monitored";
  if (!fs::is_directory(mon)) fail(Errc::MissingDirectory, mon.string() + " does not exist");

  std::map<ClassId, fs::path> class_dirs;
  for (const auto& entry : fs::directory_iterator(mon)) {
    if (!entry.is_directory()) continue;
    auto id = class_dir_id(entry.path().filename().string());
    if (!id) fail(Errc::MalformedLayout, "class directory '" + entry.path().string() + "' is not a class id");
    class_dirs.emplace(*id, entry.path());
  }
  if (class_dirs.empty()) fail(Errc::MissingDirectory, mon.string() + " contains no class directories");
  {
    ClassId expected = 0;
    for (const auto& [id, _] : class_dirs) {
      if (id != expected)
        fail(Errc::MalformedLayout, "class ids are not dense 0..C-1 (missing " + std::to_string(expected) + ")");
      ++expected;
    }
  }

  std::vector<PendingFile> pending;
  for (const auto& [id, dir] : class_dirs) {
    auto files = trace_files(dir);
    if (files.empty()) fail(Errc::MalformedLayout, "class directory " + dir.string() + " has no .trace files");
    for (auto& f : files) pending.push_back({std::move(f), id});
  }
  const fs::path unmon = base / "unmonitored";
  if (fs::is_directory(unmon)) {
    for (auto& f : trace_files(unmon)) pending.push_back({std::move(f), kUnmonitored});
  }

  std::vector<std::optional<Trace>> loaded(pending.size());
  std::vector<std::string> errors(pending.size());
  std::vector<Errc> codes(pending.size(), Errc::MalformedLine);
  parallel_for(pending.size(), options.jobs, [&](std::size_t i) {
    try {
      ParseOptions po = options.parse;
      po.source_id = fs::relative(pending[i].path, base).generic_string();
      auto t = read_trace_file(pending[i].path.string(), po);
      loaded[i] = t.with_label(pending[i].label);
    } catch (const Error& e) {
      errors[i] = e.what();
      codes[i] = e.code();
    }
  });

  std::string report;
  std::size_t failures = 0;
  std::optional<Errc> first_code;
  for (std::size_t i = 0; i < errors.size(); ++i) {
    if (errors[i].empty()) continue;
    ++failures;
    if (!first_code) first_code = codes[i];
    report += "\n  " + errors[i];
  }
  if (failures > 0) fail(*first_code, std::to_string(failures) + " file(s) failed to parse:" + report);

  Dataset d;
  d.source_path = root;
  d.monitored.resize(class_dirs.size());
  for (std::size_t i = 0; i < pending.size(); ++i) {
    if (pending[i].label == kUnmonitored) {
      d.unmonitored.push_back(std::move(*loaded[i]));
    } else {
      d.monitored[static_cast<std::size_t>(pending[i].label)].push_back(std::move(*loaded[i]));
    }
  }
  return d;
}

namespace {
std::string padded_name(std::size_t i) {
  std::string s = std::to_string(i);
  if (s.size() < 6) s.insert(0, 6 - s.size(), '0');
  return s + ".trace";
}
}  // namespace

void save_dataset(const std::string& root, const Dataset& d) {
  const fs::path base(root);
  for (std::size_t c = 0; c < d.monitored.size(); ++c) {
    const fs::path dir = base / "monitored" / std::to_string(c);
    fs::create_directories(dir);
    for (std::size_t i = 0; i < d.monitored[c].size(); ++i)
      write_trace_file((dir / padded_name(i)).string(), d.monitored[c][i]);
  }
  const fs::path udir = base / "unmonitored";
  fs::create_directories(udir);
  for (std::size_t i = 0; i < d.unmonitored.size(); ++i)
    write_trace_file((udir / padded_name(i)).string(), d.unmonitored[i]);
}

namespace {

std::pair<std::vector<Trace>, std::vector<Trace>> split_stratum(const std::vector<Trace>& traces,
                                                                double fraction, Rng rng) {
  const std::size_t n = traces.size();
  std::size_t n_train = static_cast<std::size_t>(std::floor(fraction * static_cast<double>(n) + 1e-9));
  n_train = std::clamp<std::size_t>(n_train, 1, n - 1);

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  for (std::size_t i = n; i > 1; --i) std::swap(order[i - 1], order[uniform_index(rng, i)]);
  std::vector<char> is_train(n, 0);
  for (std::size_t i = 0; i < n_train; ++i) is_train[order[i]] = 1;

  std::pair<std::vector<Trace>, std::vector<Trace>> out;
  for (std::size_t i = 0; i < n; ++i) (is_train[i] ? out.first : out.second).push_back(traces[i]);
  return out;
}

}  // namespace

std::pair<Dataset, Dataset> split(const Dataset& d, const SplitSpec& spec) {
  if (!(spec.train_fraction > 0.0 && spec.train_fraction < 1.0))
    fail(Errc::InvalidConfig, "train_fraction must be in (0,1)");
  Dataset train, test;
  train.source_path = test.source_path = d.source_path;
  train.monitored.resize(d.class_count());
  test.monitored.resize(d.class_count());
  for (std::size_t c = 0; c < d.class_count(); ++c) {
    if (d.monitored[c].size() < 2)
      fail(Errc::InsufficientData, "class " + std::to_string(c) + " has fewer than 2 traces");
    auto [tr, te] = split_stratum(d.monitored[c], spec.train_fraction, make_rng(spec.seed, {c}));
    train.monitored[c] = std::move(tr);
    test.monitored[c] = std::move(te);
  }
  if (d.unmonitored.size() >= 2) {
    auto [tr, te] = split_stratum(d.unmonitored, spec.train_fraction, make_rng(spec.seed, {UINT64_MAX}));
    train.unmonitored = std::move(tr);
    test.unmonitored = std::move(te);
  } else {
    train.unmonitored = d.unmonitored;
  }
  return {std::move(train), std::move(test)};
}

}  // namespace tsawf
