#pragma once

#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace coopmitl {

enum class ErrorCode {
  SingularOrientation,
  NonFiniteState,
  InvalidConfig,
  NotAdjacent,
  EnvelopeViolatedAtStart,
  EnvelopeViolated,
  SyntaxError,
  UnsupportedFragment,
  RegionAssertionFailed,
  UnboundedUndecidable,
  Io,
};

std::string_view to_string(ErrorCode code);

/// Base exception for every failure the library reports.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  [[nodiscard]] ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

/// Parse failure with the byte offset into the source and the token kinds
/// that would have been accepted there.
class SyntaxError : public Error {
 public:
  SyntaxError(std::size_t offset, std::vector<std::string> expected,
              const std::string& message);

  [[nodiscard]] std::size_t offset() const noexcept { return offset_; }
  [[nodiscard]] const std::vector<std::string>& expected() const noexcept {
    return expected_;
  }

 private:
  std::size_t offset_;
  std::vector<std::string> expected_;
};

/// Failure raised while executing a plan; carries the simulation time.
class ExecutionError : public Error {
 public:
  ExecutionError(ErrorCode code, double time, const std::string& what);

  [[nodiscard]] double time() const noexcept { return time_; }

 private:
  double time_;
};

}  // namespace coopmitl
