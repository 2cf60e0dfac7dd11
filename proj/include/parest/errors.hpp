#pragma once

#include <stdexcept>
#include <string>

namespace parest {

enum class Errc {
  NonCoercive,
  UnboundedCoefficient,
  NonFiniteSample,
  MeshMismatch,
  DimensionMismatch,
  LinearSolveFailure,
  HistoryTooShort,
  InvariantViolation,
  NotFound,
  ZeroDenominator,
  NoContraction,
  MaxItersExceeded,
  ResolutionTooCoarse,
  Overflow,
  InvalidConfig,
};

inline const char* errc_name(Errc c) {
  switch (c) {
    case Errc::NonCoercive: return "NonCoercive";
    case Errc::UnboundedCoefficient: return "UnboundedCoefficient";
    case Errc::NonFiniteSample: return "NonFiniteSample";
    case Errc::MeshMismatch: return "MeshMismatch";
    case Errc::DimensionMismatch: return "DimensionMismatch";
    case Errc::LinearSolveFailure: return "LinearSolveFailure";
    case Errc::HistoryTooShort: return "HistoryTooShort";
    case Errc::InvariantViolation: return "InvariantViolation";
    case Errc::NotFound: return "NotFound";
    case Errc::ZeroDenominator: return "ZeroDenominator";
    case Errc::NoContraction: return "NoContraction";
    case Errc::MaxItersExceeded: return "MaxItersExceeded";
    case Errc::ResolutionTooCoarse: return "ResolutionTooCoarse";
    case Errc::Overflow: return "Overflow";
    case Errc::InvalidConfig: return "InvalidConfig";
  }
  return "Unknown";
}

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what)
      : std::runtime_error(std::string(errc_name(code)) + ": " + what), code_(code) {}

  Errc code() const { return code_; }

 private:
  Errc code_;
};

}  // namespace parest
