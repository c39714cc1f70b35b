#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>

namespace lambda_mb {

enum class ErrorCode {
  SingularMatrix,
  NotLambdaStructured,
  SpectralPole,
  NotNormalized,
  DegenerateSeed,
  UnverifiedSeed,
  DegeneratePsi,
  DegenerateMapping,
  DegenerateConstants,
  ParameterGuard,
  StepUnstable,
  BoundaryMismatch,
  GridMismatch,
  FeatureLost,
  ParseError,
};

constexpr std::string_view error_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::SingularMatrix: return "SingularMatrix";
    case ErrorCode::NotLambdaStructured: return "NotLambdaStructured";
    case ErrorCode::SpectralPole: return "SpectralPole";
    case ErrorCode::NotNormalized: return "NotNormalized";
    case ErrorCode::DegenerateSeed: return "DegenerateSeed";
    case ErrorCode::UnverifiedSeed: return "UnverifiedSeed";
    case ErrorCode::DegeneratePsi: return "DegeneratePsi";
    case ErrorCode::DegenerateMapping: return "DegenerateMapping";
    case ErrorCode::DegenerateConstants: return "DegenerateConstants";
    case ErrorCode::ParameterGuard: return "ParameterGuard";
    case ErrorCode::StepUnstable: return "StepUnstable";
    case ErrorCode::BoundaryMismatch: return "BoundaryMismatch";
    case ErrorCode::GridMismatch: return "GridMismatch";
    case ErrorCode::FeatureLost: return "FeatureLost";
    case ErrorCode::ParseError: return "ParseError";
  }
  return "Unknown";
}

/// Every failure raised by the library carries one of the codes above so
/// that front ends can report it by name.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(error_name(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

/// Configuration syntax or guard failure at a 1-based line and column.
class ConfigParseError : public Error {
 public:
  ConfigParseError(std::size_t line, std::size_t column, const std::string& what)
      : Error(ErrorCode::ParseError,
              "line " + std::to_string(line) + ", column " + std::to_string(column) + ": " + what),
        line_(line),
        column_(column) {}

  std::size_t line() const noexcept { return line_; }
  std::size_t column() const noexcept { return column_; }

 private:
  std::size_t line_;
  std::size_t column_;
};

}  // namespace lambda_mb
