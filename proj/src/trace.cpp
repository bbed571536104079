#include "tsawf/trace.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <utility>

#include "tsawf/error.hpp"

namespace tsawf {

std::string class_label_string(ClassId id) {
  return id == kUnmonitored ? std::string("unmonitored") : std::to_string(id);
}

ClassId parse_class_label(std::string_view text) {
  if (text == "unmonitored" || text == "-1") return kUnmonitored;
  ClassId v = 0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc{} || ptr != text.data() + text.size() || v < 0)
    fail(Errc::MalformedLine, "not a class label: '" + std::string(text) + "'");
  return v;
}

Trace::Trace(std::vector<PacketEvent> events, std::optional<ClassId> label, std::string source_id)
    : events_(std::move(events)), label_(label), source_id_(std::move(source_id)) {
  if (events_.empty()) fail(Errc::EmptyTrace, "trace '" + source_id_ + "' has no packets");
  for (std::size_t i = 0; i < events_.size(); ++i) {
    const auto& e = events_[i];
    if (!std::isfinite(e.time) || e.time < 0.0)
      fail(Errc::MalformedLine, "packet " + std::to_string(i) + " has invalid time");
    if (e.direction != Direction::Outgoing && e.direction != Direction::Incoming)
      fail(Errc::MalformedLine, "packet " + std::to_string(i) + " has invalid direction");
    if (i > 0 && e.time < events_[i - 1].time)
      fail(Errc::NonMonotonicTime, "packet " + std::to_string(i) + " is earlier than its predecessor");
  }
}

Trace Trace::with_label(std::optional<ClassId> label) const {
  Trace copy = *this;
  copy.label_ = label;
  return copy;
}

Trace Trace::with_source_id(std::string source_id) const {
  Trace copy = *this;
  copy.source_id_ = std::move(source_id);
  return copy;
}

DirectionalSplit split_directions(const Trace& t) {
  DirectionalSplit s;
  for (std::size_t i = 0; i < t.size(); ++i) {
    auto& c = t[i].direction == Direction::Outgoing ? s.outgoing : s.incoming;
    c.times.push_back(t[i].time);
    c.original_index.push_back(i);
  }
  return s;
}

std::vector<PacketEvent> merge_directions(const DirectionalSplit& s) {
  std::vector<PacketEvent> out(s.outgoing.size() + s.incoming.size());
  for (std::size_t i = 0; i < s.outgoing.size(); ++i)
    out.at(s.outgoing.original_index[i]) = {s.outgoing.times[i], Direction::Outgoing};
  for (std::size_t i = 0; i < s.incoming.size(); ++i)
    out.at(s.incoming.original_index[i]) = {s.incoming.times[i], Direction::Incoming};
  return out;
}

std::vector<double> to_signed_series(const Trace& t) {
  std::vector<double> out;
  out.reserve(t.size());
  for (const auto& e : t.events()) out.push_back(e.direction == Direction::Outgoing ? e.time : -e.time);
  return out;
}

std::string format_double(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

}  // namespace tsawf
