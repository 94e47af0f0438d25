#include "coopmitl/errors.hpp"

#include <sstream>

namespace coopmitl {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::SingularOrientation: return "SingularOrientation";
    case ErrorCode::NonFiniteState: return "NonFiniteState";
    case ErrorCode::InvalidConfig: return "InvalidConfig";
    case ErrorCode::NotAdjacent: return "NotAdjacent";
    case ErrorCode::EnvelopeViolatedAtStart: return "EnvelopeViolatedAtStart";
    case ErrorCode::EnvelopeViolated: return "EnvelopeViolated";
    case ErrorCode::SyntaxError: return "SyntaxError";
    case ErrorCode::UnsupportedFragment: return "UnsupportedFragment";
    case ErrorCode::RegionAssertionFailed: return "RegionAssertionFailed";
    case ErrorCode::UnboundedUndecidable: return "UnboundedUndecidable";
    case ErrorCode::Io: return "Io";
  }
  return "Unknown";
}

namespace {

std::string syntax_message(std::size_t offset,
                           const std::vector<std::string>& expected,
                           const std::string& message) {
  std::ostringstream os;
  os << "syntax error at byte " << offset << ": " << message;
  if (!expected.empty()) {
    os << " (expected ";
    for (std::size_t i = 0; i < expected.size(); ++i) {
      if (i > 0) os << ", ";
      os << expected[i];
    }
    os << ")";
  }
  return os.str();
}

std::string timed_message(double time, const std::string& what) {
  std::ostringstream os;
  os.precision(17);
  os << "t=" << time << "s: " << what;
  return os.str();
}

}  // namespace

SyntaxError::SyntaxError(std::size_t offset, std::vector<std::string> expected,
                         const std::string& message)
    : Error(ErrorCode::SyntaxError, syntax_message(offset, expected, message)),
      offset_(offset),
      expected_(std::move(expected)) {}

ExecutionError::ExecutionError(ErrorCode code, double time,
                               const std::string& what)
    : Error(code, timed_message(time, what)), time_(time) {}

}  // namespace coopmitl
