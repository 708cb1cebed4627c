#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace qmclab {

enum class ErrorCode {
  InvalidArgument,
  ParseError,
  EmptyGraph,
  AllLoops,
  MissingVertex,
  DimensionTooLarge,
  DegenerateNet,
  LabelTooLarge,
  SlowConvergence,
  DomainError,
  QuadratureNonConvergent,
  TooManyQubits,
  NoConvergence,
};

inline std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::EmptyGraph: return "EmptyGraph";
    case ErrorCode::AllLoops: return "AllLoops";
    case ErrorCode::MissingVertex: return "MissingVertex";
    case ErrorCode::DimensionTooLarge: return "DimensionTooLarge";
    case ErrorCode::DegenerateNet: return "DegenerateNet";
    case ErrorCode::LabelTooLarge: return "LabelTooLarge";
    case ErrorCode::SlowConvergence: return "SlowConvergence";
    case ErrorCode::DomainError: return "DomainError";
    case ErrorCode::QuadratureNonConvergent: return "QuadratureNonConvergent";
    case ErrorCode::TooManyQubits: return "TooManyQubits";
    case ErrorCode::NoConvergence: return "NoConvergence";
  }
  return "Unknown";
}

/// Every failure raised by the library carries one of the codes above.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

inline void require(bool condition, ErrorCode code, const std::string& what) {
  if (!condition) throw Error(code, what);
}

}  // namespace qmclab
