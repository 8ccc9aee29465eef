#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace fidkit {

enum class ErrorKind {
  DimensionMismatch,
  NotHermitian,
  NotPSD,
  BadTrace,
  NotNormalized,
  NoConvergence,
  EnvTooSmall,
  BadRank,
  BadDistribution,
  NotTracePreserving,
  TooManyKraus,
  CompletionFailure,
  GramMismatch,
  Numerics,
  ParseError,
  ValidationError,
};

inline std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::DimensionMismatch: return "DimensionMismatch";
    case ErrorKind::NotHermitian: return "NotHermitian";
    case ErrorKind::NotPSD: return "NotPSD";
    case ErrorKind::BadTrace: return "BadTrace";
    case ErrorKind::NotNormalized: return "NotNormalized";
    case ErrorKind::NoConvergence: return "NoConvergence";
    case ErrorKind::EnvTooSmall: return "EnvTooSmall";
    case ErrorKind::BadRank: return "BadRank";
    case ErrorKind::BadDistribution: return "BadDistribution";
    case ErrorKind::NotTracePreserving: return "NotTracePreserving";
    case ErrorKind::TooManyKraus: return "TooManyKraus";
    case ErrorKind::CompletionFailure: return "CompletionFailure";
    case ErrorKind::GramMismatch: return "GramMismatch";
    case ErrorKind::Numerics: return "Numerics";
    case ErrorKind::ParseError: return "ParseError";
    case ErrorKind::ValidationError: return "ValidationError";
  }
  return "Unknown";
}

// Every failure raised by the library carries a kind so callers (tests, the
// CLI exit-code mapping) can branch without parsing messages.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what),
        kind_(kind),
        message_(what) {}

  ErrorKind kind() const noexcept { return kind_; }
  // The message without the kind prefix.
  const std::string& message() const noexcept { return message_; }

 private:
  ErrorKind kind_;
  std::string message_;
};

// File-level validation failure wrapping the underlying state/channel error.
class ValidationError : public Error {
 public:
  ValidationError(ErrorKind cause, const std::string& what)
      : Error(ErrorKind::ValidationError,
              std::string(to_string(cause)) + ": " + what),
        cause_(cause) {}

  ErrorKind cause() const noexcept { return cause_; }

 private:
  ErrorKind cause_;
};

}  // namespace fidkit
