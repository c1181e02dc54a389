#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace nctheta {

enum class ErrorCode {
  ZeroTheta,
  SingularQ,
  SingularEmbedding,
  NonIntegerLattice,
  DimensionMismatch,
  InvalidArgument,
  GridTooLarge,
  GridMismatch,
  OddDimension,
  InvalidComplexStructure,
  NoPartialStructure,
  BadTau,
  DivergentIntegral,
  DegenerateTranslation,
  ConfigError,
};

std::string_view to_string(ErrorCode code) noexcept;

/// All library failures carry a machine-readable code next to the message.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

inline std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::ZeroTheta: return "ZeroTheta";
    case ErrorCode::SingularQ: return "SingularQ";
    case ErrorCode::SingularEmbedding: return "SingularEmbedding";
    case ErrorCode::NonIntegerLattice: return "NonIntegerLattice";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::GridTooLarge: return "GridTooLarge";
    case ErrorCode::GridMismatch: return "GridMismatch";
    case ErrorCode::OddDimension: return "OddDimension";
    case ErrorCode::InvalidComplexStructure: return "InvalidComplexStructure";
    case ErrorCode::NoPartialStructure: return "NoPartialStructure";
    case ErrorCode::BadTau: return "BadTau";
    case ErrorCode::DivergentIntegral: return "DivergentIntegral";
    case ErrorCode::DegenerateTranslation: return "DegenerateTranslation";
    case ErrorCode::ConfigError: return "ConfigError";
  }
  return "Unknown";
}

}  // namespace nctheta
