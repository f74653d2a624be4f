#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace cascade {

enum class ErrorKind {
  InvalidInput,
  CapacityExceeded,
  NoConvergentInRange,
  PlacementFailed,
  EmptyClass,
  SmallDivisor,
  RadiusExceeded,
  StepSizeUnderflow,
  CascadeNotFound,
  SupportViolation,
  InfeasibleRegime,
  ConfigError,
};

constexpr std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::InvalidInput: return "InvalidInput";
    case ErrorKind::CapacityExceeded: return "CapacityExceeded";
    case ErrorKind::NoConvergentInRange: return "NoConvergentInRange";
    case ErrorKind::PlacementFailed: return "PlacementFailed";
    case ErrorKind::EmptyClass: return "EmptyClass";
    case ErrorKind::SmallDivisor: return "SmallDivisor";
    case ErrorKind::RadiusExceeded: return "RadiusExceeded";
    case ErrorKind::StepSizeUnderflow: return "StepSizeUnderflow";
    case ErrorKind::CascadeNotFound: return "CascadeNotFound";
    case ErrorKind::SupportViolation: return "SupportViolation";
    case ErrorKind::InfeasibleRegime: return "InfeasibleRegime";
    case ErrorKind::ConfigError: return "ConfigError";
  }
  return "Unknown";
}

// Every failure surfaced by the library carries one of the kinds above so the
// CLI can map it to an exit code and tests can match on it.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& what) { throw Error(kind, what); }

inline void require(bool cond, ErrorKind kind, const std::string& what) {
  if (!cond) fail(kind, what);
}

}  // namespace cascade
