#include "tsawf/features.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <string>

namespace tsawf {

namespace {

using K = FeatureKind;

constexpr std::array<FeatureInfo, 58> kSchema{{
    {"packet_count", K::Count},
    {"outgoing_count", K::Count},
    {"incoming_count", K::Count},
    {"outgoing_fraction", K::Count},
    {"incoming_fraction", K::Count},
    {"duration", K::Time},
    {"iat_mean", K::Time},
    {"iat_std", K::Time},
    {"iat_min", K::Time},
    {"iat_max", K::Time},
    {"iat_median", K::Time},
    {"outgoing_iat_mean", K::Time},
    {"outgoing_iat_std", K::Time},
    {"outgoing_iat_min", K::Time},
    {"outgoing_iat_max", K::Time},
    {"outgoing_iat_median", K::Time},
    {"incoming_iat_mean", K::Time},
    {"incoming_iat_std", K::Time},
    {"incoming_iat_min", K::Time},
    {"incoming_iat_max", K::Time},
    {"incoming_iat_median", K::Time},
    {"time_decile_1", K::Time},
    {"time_decile_2", K::Time},
    {"time_decile_3", K::Time},
    {"time_decile_4", K::Time},
    {"time_decile_5", K::Time},
    {"time_decile_6", K::Time},
    {"time_decile_7", K::Time},
    {"time_decile_8", K::Time},
    {"time_decile_9", K::Time},
    {"outgoing_time_decile_1", K::Time},
    {"outgoing_time_decile_2", K::Time},
    {"outgoing_time_decile_3", K::Time},
    {"outgoing_time_decile_4", K::Time},
    {"outgoing_time_decile_5", K::Time},
    {"outgoing_time_decile_6", K::Time},
    {"outgoing_time_decile_7", K::Time},
    {"outgoing_time_decile_8", K::Time},
    {"outgoing_time_decile_9", K::Time},
    {"incoming_time_decile_1", K::Time},
    {"incoming_time_decile_2", K::Time},
    {"incoming_time_decile_3", K::Time},
    {"incoming_time_decile_4", K::Time},
    {"incoming_time_decile_5", K::Time},
    {"incoming_time_decile_6", K::Time},
    {"incoming_time_decile_7", K::Time},
    {"incoming_time_decile_8", K::Time},
    {"incoming_time_decile_9", K::Time},
    {"burst_count", K::Count},
    {"burst_mean_length", K::Count},
    {"burst_max_length", K::Count},
    {"outgoing_in_first_30", K::Count},
    {"outgoing_in_last_30", K::Count},
    {"packets_per_second_mean", K::Rate},
    {"packets_per_second_std", K::Rate},
    {"degenerate_overall", K::Count},
    {"degenerate_outgoing", K::Count},
    {"degenerate_incoming", K::Count},
}};

// mean, std, min, max, median of the gaps of `times`; zeros if fewer than 2 times.
void gap_stats(const std::vector<double>& times, std::vector<double>& out) {
  if (times.size() < 2) {
    out.insert(out.end(), 5, 0.0);
    return;
  }
  std::vector<double> gaps(times.size() - 1);
  for (std::size_t i = 1; i < times.size(); ++i) gaps[i - 1] = times[i] - times[i - 1];
  double sum = 0.0;
  for (double g : gaps) sum += g;
  const double mean = sum / static_cast<double>(gaps.size());
  double ss = 0.0;
  for (double g : gaps) ss += (g - mean) * (g - mean);
  std::sort(gaps.begin(), gaps.end());
  const std::size_t n = gaps.size();
  const double median = n % 2 ? gaps[n / 2] : 0.5 * (gaps[n / 2 - 1] + gaps[n / 2]);
  out.push_back(mean);
  out.push_back(std::sqrt(ss / static_cast<double>(n)));
  out.push_back(gaps.front());
  out.push_back(gaps.back());
  out.push_back(median);
}

// Nine deciles with linear interpolation between order statistics; zeros if empty.
void deciles(const std::vector<double>& sorted, std::vector<double>& out) {
  for (int q = 1; q <= 9; ++q) {
    if (sorted.empty()) {
      out.push_back(0.0);
      continue;
    }
    const double pos = q / 10.0 * static_cast<double>(sorted.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
    const double frac = pos - static_cast<double>(lo);
    out.push_back(sorted[lo] + frac * (sorted[hi] - sorted[lo]));
  }
}

}  // namespace

std::span<const FeatureInfo> feature_schema() { return kSchema; }

nlohmann::json feature_schema_json() {
  nlohmann::json features = nlohmann::json::array();
  for (std::size_t i = 0; i < kSchema.size(); ++i) {
    const char* kind = kSchema[i].kind == K::Time ? "time" : kSchema[i].kind == K::Count ? "count" : "rate";
    features.push_back({{"index", i}, {"name", std::string(kSchema[i].name)}, {"type", kind}});
  }
  return {{"schema_version", kFeatureSchemaVersion}, {"features", features}};
}

FeatureVector summary_features(const Trace& t) {
  std::vector<double> all, out, in;
  all.reserve(t.size());
  for (const auto& e : t.events()) {
    all.push_back(e.time);
    (e.direction == Direction::Outgoing ? out : in).push_back(e.time);
  }
  const double n = static_cast<double>(t.size());

  FeatureVector fv;
  auto& v = fv.values;
  v.reserve(kSchema.size());
  v.push_back(n);
  v.push_back(static_cast<double>(out.size()));
  v.push_back(static_cast<double>(in.size()));
  v.push_back(static_cast<double>(out.size()) / n);
  v.push_back(static_cast<double>(in.size()) / n);
  v.push_back(t.duration());

  gap_stats(all, v);
  gap_stats(out, v);
  gap_stats(in, v);
  deciles(all, v);
  deciles(out, v);
  deciles(in, v);

  std::size_t bursts = 0, longest = 0, run = 0;
  for (std::size_t i = 0; i < t.size(); ++i) {
    if (i == 0 || t[i].direction != t[i - 1].direction) {
      ++bursts;
      run = 0;
    }
    longest = std::max(longest, ++run);
  }
  v.push_back(static_cast<double>(bursts));
  v.push_back(n / static_cast<double>(bursts));
  v.push_back(static_cast<double>(longest));

  const std::size_t head = std::min<std::size_t>(30, t.size());
  std::size_t first_out = 0, last_out = 0;
  for (std::size_t i = 0; i < head; ++i) {
    if (t[i].direction == Direction::Outgoing) ++first_out;
    if (t[t.size() - 1 - i].direction == Direction::Outgoing) ++last_out;
  }
  v.push_back(static_cast<double>(first_out));
  v.push_back(static_cast<double>(last_out));

  // 1-second bins over [0, end]; times are sorted so occupied bins come in runs.
  const double bins = std::floor(t.end_time() / 1000.0) + 1.0;
  const double pps_mean = n / bins;
  double pps_ss = 0.0, occupied = 0.0;
  for (std::size_t i = 0; i < all.size();) {
    const double bin = std::floor(all[i] / 1000.0);
    std::size_t j = i;
    while (j < all.size() && std::floor(all[j] / 1000.0) == bin) ++j;
    const double c = static_cast<double>(j - i);
    pps_ss += (c - pps_mean) * (c - pps_mean);
    occupied += 1.0;
    i = j;
  }
  pps_ss += (bins - occupied) * pps_mean * pps_mean;
  v.push_back(pps_mean);
  v.push_back(std::sqrt(pps_ss / bins));

  v.push_back(all.size() < 2 ? 1.0 : 0.0);
  v.push_back(out.size() < 2 ? 1.0 : 0.0);
  v.push_back(in.size() < 2 ? 1.0 : 0.0);

  for (double& x : v) {
    if (!std::isfinite(x)) x = 0.0;
  }
  return fv;
}

}  // namespace tsawf
