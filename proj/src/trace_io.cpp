#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "tsawf/error.hpp"
#include "tsawf/trace.hpp"

namespace tsawf {

namespace {

bool is_space(char c) { return c == ' ' || c == '\t' || c == '\r' || c == '\f' || c == '\v'; }

std::string_view trim(std::string_view s) {
  while (!s.empty() && is_space(s.front())) s.remove_prefix(1);
  while (!s.empty() && is_space(s.back())) s.remove_suffix(1);
  return s;
}

// Signed decimal; accepts a leading '+', rejects nan/inf and trailing junk.
std::optional<double> parse_number(std::string_view s) {
  if (s.empty()) return std::nullopt;
  bool negate = false;
  if (s.front() == '+' || s.front() == '-') {
    negate = s.front() == '-';
    s.remove_prefix(1);
  }
  if (s.empty() || s.front() == '+' || s.front() == '-') return std::nullopt;
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v, std::chars_format::general);
  if (ec != std::errc{} || ptr != s.data() + s.size() || !std::isfinite(v)) return std::nullopt;
  return negate ? -v : v;
}

std::vector<std::string_view> fields_of(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && is_space(line[i])) ++i;
    std::size_t j = i;
    while (j < line.size() && !is_space(line[j])) ++j;
    if (j > i) out.push_back(line.substr(i, j - i));
    i = j;
  }
  return out;
}

struct Parsed {
  PacketEvent event;
  std::size_t line;
};

}  // namespace

Trace parse_trace(std::string_view text, const ParseOptions& options) {
  std::vector<Parsed> parsed;
  std::optional<TraceFormat> format;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t nl = text.find('\n', pos);
    if (nl == std::string_view::npos) nl = text.size();
    std::string_view line = trim(text.substr(pos, nl - pos));
    ++line_no;
    pos = nl + 1;
    if (line.empty() || line.front() == '#') continue;

    auto fields = fields_of(line);
    TraceFormat this_format = fields.size() == 1 ? TraceFormat::SignedMagnitude : TraceFormat::TimeDirection;
    if (fields.size() > 2) throw ParseError(Errc::MalformedLine, line_no, "expected one or two fields");
    if (!format) format = this_format;
    if (*format != this_format) throw ParseError(Errc::MalformedLine, line_no, "mixed trace formats");

    PacketEvent e;
    if (this_format == TraceFormat::SignedMagnitude) {
      auto v = parse_number(fields[0]);
      if (!v) throw ParseError(Errc::MalformedLine, line_no, "not a number: '" + std::string(fields[0]) + "'");
      // Zero has no usable sign in this encoding; treat it as the opening request.
      e.direction = *v >= 0.0 ? Direction::Outgoing : Direction::Incoming;
      e.time = std::fabs(*v) * options.time_scale;
    } else {
      auto t = parse_number(fields[0]);
      if (!t || *t < 0.0 || std::signbit(*t))
        throw ParseError(Errc::MalformedLine, line_no, "bad time: '" + std::string(fields[0]) + "'");
      std::string_view d = fields[1];
      if (d == "1" || d == "+1") {
        e.direction = Direction::Outgoing;
      } else if (d == "-1") {
        e.direction = Direction::Incoming;
      } else {
        throw ParseError(Errc::MalformedLine, line_no, "bad direction: '" + std::string(d) + "'");
      }
      e.time = *t * options.time_scale;
    }
    if (!parsed.empty()) {
      const double prev = parsed.back().event.time;
      if (e.time < prev - options.time_slack)
        throw ParseError(Errc::NonMonotonicTime, line_no, "time decreases beyond the allowed slack");
    }
    parsed.push_back({e, line_no});
  }
  if (parsed.empty()) throw ParseError(Errc::EmptyTrace, std::nullopt, "no data lines");

  std::vector<PacketEvent> events;
  events.reserve(parsed.size());
  for (const auto& p : parsed) events.push_back(p.event);
  std::stable_sort(events.begin(), events.end(),
                   [](const PacketEvent& a, const PacketEvent& b) { return a.time < b.time; });
  return Trace(std::move(events), std::nullopt, options.source_id);
}

Trace read_trace_file(const std::string& path, const ParseOptions& options) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(Errc::Io, "cannot open " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  ParseOptions opts = options;
  if (opts.source_id.empty()) opts.source_id = path;
  try {
    return parse_trace(buf.str(), opts);
  } catch (const ParseError& e) {
    throw ParseError(e.code(), e.line(), path + ": " + e.detail());
  }
}

std::string format_trace(const Trace& t, TraceFormat format) {
  std::string out;
  out.reserve(t.size() * 12);
  for (const auto& e : t.events()) {
    if (format == TraceFormat::SignedMagnitude) {
      const double v = e.direction == Direction::Outgoing ? e.time : -e.time;
      out += format_double(v);
    } else {
      out += format_double(e.time);
      out += e.direction == Direction::Outgoing ? " 1" : " -1";
    }
    out += '\n';
  }
  return out;
}

void write_trace_file(const std::string& path, const Trace& t, TraceFormat format) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(Errc::Io, "cannot write " + path);
  out << format_trace(t, format);
  if (!out) fail(Errc::Io, "write failed for " + path);
}

}  // namespace tsawf
