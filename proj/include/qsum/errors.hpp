#pragma once

#include <stdexcept>
#include <string>

namespace qsum {

// Three families, mapped to CLI exit codes 2, 3 and 4.
class ValidationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class CertificateError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

#define QSUM_DEFINE_ERROR(Name, Base)                                   \
  class Name : public Base {                                            \
   public:                                                              \
    explicit Name(const std::string& what) : Base(#Name ": " + what) {} \
  };

QSUM_DEFINE_ERROR(ParseError, ValidationError)
QSUM_DEFINE_ERROR(SpecError, ValidationError)
QSUM_DEFINE_ERROR(TruncationMismatch, ValidationError)
QSUM_DEFINE_ERROR(ShapeMismatch, ValidationError)
QSUM_DEFINE_ERROR(AssumptionViolated, ValidationError)
QSUM_DEFINE_ERROR(NonzeroConstantTerm, ValidationError)

QSUM_DEFINE_ERROR(QOverflow, NumericError)
QSUM_DEFINE_ERROR(PoleProximity, NumericError)
QSUM_DEFINE_ERROR(RootFindingFailure, NumericError)
QSUM_DEFINE_ERROR(DegenerateSector, NumericError)
QSUM_DEFINE_ERROR(OrderViolation, NumericError)
QSUM_DEFINE_ERROR(GridUnderflow, NumericError)
QSUM_DEFINE_ERROR(TaylorTrustExceeded, NumericError)
QSUM_DEFINE_ERROR(PivotTooSmall, NumericError)
QSUM_DEFINE_ERROR(NonconvergentTail, NumericError)
QSUM_DEFINE_ERROR(TailNotConverged, NumericError)
QSUM_DEFINE_ERROR(QuadratureNonconvergence, NumericError)

QSUM_DEFINE_ERROR(GrowthExceeded, CertificateError)
QSUM_DEFINE_ERROR(BoundUnfittable, CertificateError)
QSUM_DEFINE_ERROR(HypothesisFailed, CertificateError)

#undef QSUM_DEFINE_ERROR

// Raised by the formal solver when P1([n]_q; 0) vanishes.
class ResonantIndex : public NumericError {
 public:
  explicit ResonantIndex(int n)
      : NumericError("ResonantIndex: P1([n]_q;0) vanishes at n = " + std::to_string(n)), index(n) {}
  int index;
};

}  // namespace qsum
