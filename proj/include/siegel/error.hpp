#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace siegel {

enum class ErrorCode {
  NotSymmetric,
  NotHermitian,
  NotAntiHermitian,
  ConvergenceFailure,
  SingularShift,
  DegenerateSpectrum,
  OutOfChamber,
  ChamberExit,
  DomainExit,
  OriginHit,
  EmptySample,
  ShapeMismatch,
  ConfigInvalid,
  IoError,
  InvalidPoint,
};

constexpr std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::NotSymmetric: return "NotSymmetric";
    case ErrorCode::NotHermitian: return "NotHermitian";
    case ErrorCode::NotAntiHermitian: return "NotAntiHermitian";
    case ErrorCode::ConvergenceFailure: return "ConvergenceFailure";
    case ErrorCode::SingularShift: return "SingularShift";
    case ErrorCode::DegenerateSpectrum: return "DegenerateSpectrum";
    case ErrorCode::OutOfChamber: return "OutOfChamber";
    case ErrorCode::ChamberExit: return "ChamberExit";
    case ErrorCode::DomainExit: return "DomainExit";
    case ErrorCode::OriginHit: return "OriginHit";
    case ErrorCode::EmptySample: return "EmptySample";
    case ErrorCode::ShapeMismatch: return "ShapeMismatch";
    case ErrorCode::ConfigInvalid: return "ConfigInvalid";
    case ErrorCode::IoError: return "IoError";
    case ErrorCode::InvalidPoint: return "InvalidPoint";
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

}  // namespace siegel
