#include "tsawf/distance_matrix.hpp"

#include <cmath>
#include <cstring>
#include <filesystem>
#include <fstream>

#include <nlohmann/json.hpp>

#include "tsawf/error.hpp"
#include "tsawf/hash.hpp"
#include "tsawf/parallel.hpp"

namespace fs = std::filesystem;

namespace tsawf {

DistanceMatrix compute_distance_matrix(std::span<const Trace> samples, const PrototypeBundle& bundle,
                                       std::span<const Measure> measures, const DistanceOptions& options,
                                       std::size_t jobs) {
  if (measures.empty()) fail(Errc::InvalidConfig, "no measures enabled");
  DistanceMatrix m;
  m.samples = samples.size();
  m.prototypes = bundle.prototypes.size();
  m.measures = measures.size();
  m.values.resize(m.samples * m.prototypes * m.measures);
  m.argmins.resize(m.values.size());
  parallel_for(samples.size(), jobs, [&](std::size_t s) {
    const DirectionalSplit target = split_directions(samples[s]);
    for (std::size_t p = 0; p < m.prototypes; ++p) {
      const DistanceVector dv = compute_dist(bundle.prototypes[p].split, target, measures, options);
      for (std::size_t k = 0; k < m.measures; ++k) {
        check_invariant(std::isfinite(dv.distances[k]) && dv.distances[k] >= 0.0, "distance not finite and >= 0");
        m.values[m.index(s, p, k)] = dv.distances[k];
        m.argmins[m.index(s, p, k)] = dv.argmin_packet_index[k];
      }
    }
  });
  return m;
}

std::uint64_t samples_hash(std::span<const Trace> samples) {
  Fnv1a h;
  h.u64(samples.size());
  for (const auto& t : samples) {
    h.u64(t.size());
    for (const auto& e : t.events()) h.f64(e.time).u64(e.direction == Direction::Outgoing ? 1 : 0);
  }
  return h.value();
}

std::uint64_t measures_hash(std::span<const Measure> measures, const DistanceOptions& options) {
  Fnv1a h;
  h.u64(measures.size());
  for (const auto& m : measures) h.str(m.key());
  // The evaluation path changes results only by round-off below 1e-9, but a
  // cached matrix should still be exactly what this configuration computes.
  h.u64(options.stride).u64(static_cast<std::uint64_t>(options.path));
  return h.value();
}

std::string CacheKey::stem() const { return "dm-" + hex64(dataset) + "-" + hex64(bundle) + "-" + hex64(measures); }

namespace {
constexpr char kMagic[8] = {'T', 'S', 'A', 'W', 'F', 'D', 'M', '1'};

template <class T>
void put(std::ofstream& out, const T& v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof v);
}
template <class T>
bool get(std::ifstream& in, T& v) {
  return static_cast<bool>(in.read(reinterpret_cast<char*>(&v), sizeof v));
}
}  // namespace

void write_distance_cache(const std::string& dir, const CacheKey& key, const DistanceMatrix& m) {
  fs::create_directories(dir);
  const fs::path bin = fs::path(dir) / (key.stem() + ".bin");
  const fs::path tmp = fs::path(dir) / (key.stem() + ".bin.tmp");
  {
    std::ofstream out(tmp, std::ios::binary);
    if (!out) fail(Errc::Io, "cannot write distance cache " + tmp.string());
    out.write(kMagic, sizeof kMagic);
    for (std::uint64_t v : {key.dataset, key.bundle, key.measures, std::uint64_t(m.samples),
                            std::uint64_t(m.prototypes), std::uint64_t(m.measures)})
      put(out, v);
    out.write(reinterpret_cast<const char*>(m.values.data()), static_cast<std::streamsize>(m.values.size() * 8));
    out.write(reinterpret_cast<const char*>(m.argmins.data()), static_cast<std::streamsize>(m.argmins.size() * 8));
    if (!out) fail(Errc::Io, "failed writing distance cache " + tmp.string());
  }
  // Rename last so an interrupted run never leaves a truncated cache under the real name.
  fs::rename(tmp, bin);
  std::ofstream side(fs::path(dir) / (key.stem() + ".json"));
  side << nlohmann::json{{"dataset_hash", hex64(key.dataset)},
                         {"bundle_hash", hex64(key.bundle)},
                         {"measures_hash", hex64(key.measures)},
                         {"samples", m.samples},
                         {"prototypes", m.prototypes},
                         {"measures", m.measures},
                         {"layout", "sample-major, prototype, measure; float64 distances then uint64 argmins"}}
              .dump(2)
       << '\n';
}

std::optional<DistanceMatrix> read_distance_cache(const std::string& dir, const CacheKey& key) {
  std::ifstream in(fs::path(dir) / (key.stem() + ".bin"), std::ios::binary);
  if (!in) return std::nullopt;
  char magic[8];
  if (!in.read(magic, 8) || std::memcmp(magic, kMagic, 8) != 0) return std::nullopt;
  std::uint64_t d, b, ms, s, p, k;
  if (!get(in, d) || !get(in, b) || !get(in, ms) || !get(in, s) || !get(in, p) || !get(in, k)) return std::nullopt;
  if (d != key.dataset || b != key.bundle || ms != key.measures) return std::nullopt;
  const auto expected = 8 + 6 * 8 + 16 * static_cast<unsigned long long>(s) * p * k;
  if (fs::file_size(fs::path(dir) / (key.stem() + ".bin")) != expected) return std::nullopt;
  DistanceMatrix m;
  m.samples = s;
  m.prototypes = p;
  m.measures = k;
  m.values.resize(s * p * k);
  m.argmins.resize(s * p * k);
  if (!in.read(reinterpret_cast<char*>(m.values.data()), static_cast<std::streamsize>(m.values.size() * 8)))
    return std::nullopt;
  if (!in.read(reinterpret_cast<char*>(m.argmins.data()), static_cast<std::streamsize>(m.argmins.size() * 8)))
    return std::nullopt;
  return m;
}

DistanceMatrix cached_distance_matrix(const std::string& cache_dir, std::span<const Trace> samples,
                                      const PrototypeBundle& bundle, std::span<const Measure> measures,
                                      const DistanceOptions& options, std::size_t jobs, bool* hit) {
  const CacheKey key{samples_hash(samples), bundle.hash(), measures_hash(measures, options)};
  if (!cache_dir.empty()) {
    if (auto cached = read_distance_cache(cache_dir, key)) {
      if (hit) *hit = true;
      return std::move(*cached);
    }
  }
  if (hit) *hit = false;
  DistanceMatrix m = compute_distance_matrix(samples, bundle, measures, options, jobs);
  if (!cache_dir.empty()) write_distance_cache(cache_dir, key, m);
  return m;
}

}  // namespace tsawf
