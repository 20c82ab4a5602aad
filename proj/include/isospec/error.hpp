#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace isospec {

enum class ErrorCode {
  NonHyperbolic,
  BadSpectrum,
  PreconditionViolated,
  BadTarget,
  QuadratureNonConvergent,
  DegenerateOverlay,
  TraceFailed,
  CertificateExceeded,
  Overflow,
  NonSimpleLoop,
  PolygonOpFailed,
  VerdictFail,
  RegressionIllConditioned,
  EmptyDataset,
  Usage,
};

std::string_view to_string(ErrorCode code);

/// Base exception for every failure raised by the library. The code is
/// stable and is what callers (and the CLI exit-code mapping) switch on.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

/// A failed inequality check. Carries both sides so reports can show by how
/// much the bound was missed.
class VerdictFailure : public Error {
 public:
  VerdictFailure(std::string name, double lhs, double rhs)
      : Error(ErrorCode::VerdictFail,
              name + ": lhs=" + std::to_string(lhs) + " > rhs=" + std::to_string(rhs)),
        name_(std::move(name)),
        lhs_(lhs),
        rhs_(rhs) {}

  const std::string& name() const noexcept { return name_; }
  double lhs() const noexcept { return lhs_; }
  double rhs() const noexcept { return rhs_; }

 private:
  std::string name_;
  double lhs_;
  double rhs_;
};

inline std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::NonHyperbolic: return "NonHyperbolic";
    case ErrorCode::BadSpectrum: return "BadSpectrum";
    case ErrorCode::PreconditionViolated: return "PreconditionViolated";
    case ErrorCode::BadTarget: return "BadTarget";
    case ErrorCode::QuadratureNonConvergent: return "QuadratureNonConvergent";
    case ErrorCode::DegenerateOverlay: return "DegenerateOverlay";
    case ErrorCode::TraceFailed: return "TraceFailed";
    case ErrorCode::CertificateExceeded: return "CertificateExceeded";
    case ErrorCode::Overflow: return "Overflow";
    case ErrorCode::NonSimpleLoop: return "NonSimpleLoop";
    case ErrorCode::PolygonOpFailed: return "PolygonOpFailed";
    case ErrorCode::VerdictFail: return "VerdictFail";
    case ErrorCode::RegressionIllConditioned: return "RegressionIllConditioned";
    case ErrorCode::EmptyDataset: return "EmptyDataset";
    case ErrorCode::Usage: return "Usage";
  }
  return "Unknown";
}

}  // namespace isospec
