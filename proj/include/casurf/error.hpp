#pragma once

#include <stdexcept>
#include <string>

namespace casurf {

enum class ErrorKind {
  kInvalidPoint,      ///< point outside 1 + (kappa/4)(x^2+y^2) > 0
  kInvalidIndex,      ///< frame index outside {1,2,3}
  kStepTooLarge,      ///< finite-difference stencil leaves the domain
  kImmersionFailure,  ///< tangent plane has rank < 2
  kBasisDegenerate,   ///< {T, JT} requested where theta is 0 or pi/2
  kSingularity,       ///< pole of a closed form (tan argument near pi/2 + k pi)
  kInvalidSpec,       ///< constraint violated in a surface specification
  kNonIntegrable,     ///< theta = 0 with tau != 0
  kUnsolvedBranch,    ///< r^2 <= 0
  kPrecondition,
  kDomainExit,        ///< integration left the BCV chart
};

inline const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kInvalidPoint: return "invalid-point";
    case ErrorKind::kInvalidIndex: return "invalid-index";
    case ErrorKind::kStepTooLarge: return "step-too-large";
    case ErrorKind::kImmersionFailure: return "immersion-failure";
    case ErrorKind::kBasisDegenerate: return "basis-degenerate";
    case ErrorKind::kSingularity: return "singularity";
    case ErrorKind::kInvalidSpec: return "invalid-spec";
    case ErrorKind::kNonIntegrable: return "non-integrable";
    case ErrorKind::kUnsolvedBranch: return "unsolved-branch";
    case ErrorKind::kPrecondition: return "precondition";
    case ErrorKind::kDomainExit: return "domain-exit";
  }
  return "unknown";
}

/// Every failure raised by the library carries a machine-checkable kind.
class GeometryError : public std::runtime_error {
 public:
  GeometryError(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what),
        kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace casurf
