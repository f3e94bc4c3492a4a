#pragma once

#include <stdexcept>
#include <string>

namespace fieldrec {

enum class ErrorCode {
  InvalidBracket,
  MaxIterExceeded,
  OutOfRange,
  NotMonotone,
  DomainMargin,
  ParseError,
  NonMonotoneTime,
  EmptySeries,
  NonUniformGrid,
  InsufficientSpan,
  MixedDeltaT,
  SingularJacobian,
  NoConvergence,
  SpuriousPole,
  NonMonotoneData,
  NotAFixedPoint,
  NoFixedPointInClosure,
  NonMonotoneSequence,
  InconsistentFit,
  SlowConvergence,
  NonPositiveFactor,
  DivisionByZero,
  InterpolationOutOfHull,
  UndefinedSplinter,
  MismatchedEndpoints,
  NonFiniteRatio,
  InvalidMultiplier,
  ZeroReference,
  ZeroDenominator,
  ConstraintViolation,
  InvalidParameter,
  IoError,
};

const char* to_string(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void raise(ErrorCode code, const std::string& what) {
  throw Error(code, what);
}

}  // namespace fieldrec
