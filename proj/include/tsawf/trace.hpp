#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace tsawf {

enum class Direction : std::int8_t { Outgoing = 1, Incoming = -1 };

/// Class identifier: dense 0..C-1 for monitored sites, kUnmonitored otherwise.
using ClassId = std::int32_t;
inline constexpr ClassId kUnmonitored = -1;

std::string class_label_string(ClassId id);
ClassId parse_class_label(std::string_view text);

/// One packet: arrival time in milliseconds since trace start, and direction.
/// Packet sizes are not modeled; Tor cells are fixed size.
struct PacketEvent {
  double time = 0.0;
  Direction direction = Direction::Outgoing;

  friend bool operator==(const PacketEvent&, const PacketEvent&) = default;
};

/// An immutable, time-ordered packet trace. Construction validates the
/// ordering and non-negativity invariants, so every Trace in flight is usable.
class Trace {
 public:
  explicit Trace(std::vector<PacketEvent> events, std::optional<ClassId> label = std::nullopt,
                 std::string source_id = {});

  std::span<const PacketEvent> events() const noexcept { return events_; }
  std::size_t size() const noexcept { return events_.size(); }
  const PacketEvent& operator[](std::size_t i) const noexcept { return events_[i]; }

  double start_time() const noexcept { return events_.front().time; }
  double end_time() const noexcept { return events_.back().time; }
  double duration() const noexcept { return end_time() - start_time(); }

  const std::optional<ClassId>& label() const noexcept { return label_; }
  const std::string& source_id() const noexcept { return source_id_; }

  Trace with_label(std::optional<ClassId> label) const;
  Trace with_source_id(std::string source_id) const;

  friend bool operator==(const Trace& a, const Trace& b) { return a.events_ == b.events_; }

 private:
  std::vector<PacketEvent> events_;
  std::optional<ClassId> label_;
  std::string source_id_;
};

/// One direction of a trace, structure-of-arrays: times[i] happened at
/// original packet index original_index[i] of the source trace.
struct Component {
  std::vector<double> times;
  std::vector<std::size_t> original_index;

  std::size_t size() const noexcept { return times.size(); }
  bool empty() const noexcept { return times.empty(); }
};

/// Stable partition of a trace into its outgoing and incoming packets. The two
/// original_index sequences together partition 0..|trace|-1.
struct DirectionalSplit {
  Component outgoing;
  Component incoming;

  const Component& component(Direction d) const noexcept {
    return d == Direction::Outgoing ? outgoing : incoming;
  }
};

DirectionalSplit split_directions(const Trace& t);

/// Inverse of split_directions: re-interleaves both components by original index.
std::vector<PacketEvent> merge_directions(const DirectionalSplit& s);

/// time for outgoing packets, -time for incoming ones.
std::vector<double> to_signed_series(const Trace& t);

// --- text format ------------------------------------------------------------

enum class TraceFormat {
  SignedMagnitude,  ///< one signed decimal per line
  TimeDirection,    ///< "<time> <dir>" with dir in {1, +1, -1}
};

struct ParseOptions {
  /// Multiplier applied to every parsed time (e.g. 1000 for datasets in seconds).
  double time_scale = 1.0;
  /// A time may go backwards by at most this much (in output units); such
  /// traces are stably re-sorted. 0 rejects any decrease.
  double time_slack = 0.0;
  std::string source_id;
};

Trace parse_trace(std::string_view text, const ParseOptions& options = {});
Trace read_trace_file(const std::string& path, const ParseOptions& options = {});

std::string format_trace(const Trace& t, TraceFormat format = TraceFormat::SignedMagnitude);
void write_trace_file(const std::string& path, const Trace& t,
                      TraceFormat format = TraceFormat::SignedMagnitude);

/// Shortest decimal text that parses back to exactly the same double.
std::string format_double(double v);

}  // namespace tsawf
