#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace cfinsler {

/// Failure categories raised by the engine. Every public operation documents
/// which of these it can throw.
enum class ErrorCode {
  InvalidArgument,
  InvalidNorm,
  ZeroCovector,
  ZeroControl,
  NotStrictlyConvex,
  OutOfDomain,
  InvalidGroupElement,
  NoProgress,
  NonConstantHamiltonian,
  IdenticalPoints,
  VerticalGeodesic,
  Unreachable,
  OutOfWindow,
  ConfigError,
  UnknownScenario,
};

inline std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::InvalidNorm: return "InvalidNorm";
    case ErrorCode::ZeroCovector: return "ZeroCovector";
    case ErrorCode::ZeroControl: return "ZeroControl";
    case ErrorCode::NotStrictlyConvex: return "NotStrictlyConvex";
    case ErrorCode::OutOfDomain: return "OutOfDomain";
    case ErrorCode::InvalidGroupElement: return "InvalidGroupElement";
    case ErrorCode::NoProgress: return "NoProgress";
    case ErrorCode::NonConstantHamiltonian: return "NonConstantHamiltonian";
    case ErrorCode::IdenticalPoints: return "IdenticalPoints";
    case ErrorCode::VerticalGeodesic: return "VerticalGeodesic";
    case ErrorCode::Unreachable: return "Unreachable";
    case ErrorCode::OutOfWindow: return "OutOfWindow";
    case ErrorCode::ConfigError: return "ConfigError";
    case ErrorCode::UnknownScenario: return "UnknownScenario";
  }
  return "Unknown";
}

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& what) { throw Error(code, what); }

}  // namespace cfinsler
