#include "tsawf/error.hpp"

namespace tsawf {

std::string_view errc_name(Errc code) noexcept {
  switch (code) {
    case Errc::MalformedLine: return "MalformedLine";
    case Errc::EmptyTrace: return "EmptyTrace";
    case Errc::NonMonotonicTime: return "NonMonotonicTime";
    case Errc::MissingDirectory: return "MissingDirectory";
    case Errc::MalformedLayout: return "MalformedLayout";
    case Errc::InvalidOverlap: return "InvalidOverlap";
    case Errc::InsufficientData: return "InsufficientData";
    case Errc::DimensionMismatch: return "DimensionMismatch";
    case Errc::InvalidLength: return "InvalidLength";
    case Errc::LengthMismatch: return "LengthMismatch";
    case Errc::WindowTooLarge: return "WindowTooLarge";
    case Errc::DegenerateLabels: return "DegenerateLabels";
    case Errc::NoPrototype: return "NoPrototype";
    case Errc::MissingTruth: return "MissingTruth";
    case Errc::SchemaMismatch: return "SchemaMismatch";
    case Errc::InvalidConfig: return "InvalidConfig";
    case Errc::Io: return "Io";
    case Errc::InvariantViolation: return "InvariantViolation";
  }
  return "Unknown";
}

Error::Error(Errc code, const std::string& what)
    : std::runtime_error(std::string(errc_name(code)) + ": " + what), code_(code) {}

int Error::exit_code() const noexcept {
  switch (code_) {
    case Errc::InvalidConfig: return 2;
    case Errc::InvariantViolation: return 4;
    default: return 3;
  }
}

namespace {
std::string with_line(std::optional<std::size_t> line, const std::string& detail) {
  if (!line) return detail;
  return "line " + std::to_string(*line) + ": " + detail;
}
}  // namespace

ParseError::ParseError(Errc code, std::optional<std::size_t> line, const std::string& detail)
    : Error(code, with_line(line, detail)), line_(line), detail_(detail) {}

void fail(Errc code, const std::string& what) { throw Error(code, what); }

}  // namespace tsawf
