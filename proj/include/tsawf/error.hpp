#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace tsawf {

enum class Errc {
  MalformedLine,
  EmptyTrace,
  NonMonotonicTime,
  MissingDirectory,
  MalformedLayout,
  InvalidOverlap,
  InsufficientData,
  DimensionMismatch,
  InvalidLength,
  LengthMismatch,
  WindowTooLarge,
  DegenerateLabels,
  NoPrototype,
  MissingTruth,
  SchemaMismatch,
  InvalidConfig,
  Io,
  InvariantViolation,
};

std::string_view errc_name(Errc code) noexcept;

/// Base error for the whole toolkit. The code decides the process exit status:
/// 2 for configuration problems, 4 for broken internal invariants, 3 otherwise.
class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what);

  Errc code() const noexcept { return code_; }
  int exit_code() const noexcept;

 private:
  Errc code_;
};

/// Parse failure with the 1-based physical line it happened on (if any).
class ParseError : public Error {
 public:
  ParseError(Errc code, std::optional<std::size_t> line, const std::string& detail);

  std::optional<std::size_t> line() const noexcept { return line_; }
  /// Message without the code and line prefixes.
  const std::string& detail() const noexcept { return detail_; }

 private:
  std::optional<std::size_t> line_;
  std::string detail_;
};

[[noreturn]] void fail(Errc code, const std::string& what);

inline void check_invariant(bool cond, const char* what) {
  if (!cond) fail(Errc::InvariantViolation, what);
}

}  // namespace tsawf
