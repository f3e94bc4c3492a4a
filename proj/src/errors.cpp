#include "fieldrec/errors.hpp"

namespace fieldrec {

const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidBracket: return "InvalidBracket";
    case ErrorCode::MaxIterExceeded: return "MaxIterExceeded";
    case ErrorCode::OutOfRange: return "OutOfRange";
    case ErrorCode::NotMonotone: return "NotMonotone";
    case ErrorCode::DomainMargin: return "DomainMargin";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::NonMonotoneTime: return "NonMonotoneTime";
    case ErrorCode::EmptySeries: return "EmptySeries";
    case ErrorCode::NonUniformGrid: return "NonUniformGrid";
    case ErrorCode::InsufficientSpan: return "InsufficientSpan";
    case ErrorCode::MixedDeltaT: return "MixedDeltaT";
    case ErrorCode::SingularJacobian: return "SingularJacobian";
    case ErrorCode::NoConvergence: return "NoConvergence";
    case ErrorCode::SpuriousPole: return "SpuriousPole";
    case ErrorCode::NonMonotoneData: return "NonMonotoneData";
    case ErrorCode::NotAFixedPoint: return "NotAFixedPoint";
    case ErrorCode::NoFixedPointInClosure: return "NoFixedPointInClosure";
    case ErrorCode::NonMonotoneSequence: return "NonMonotoneSequence";
    case ErrorCode::InconsistentFit: return "InconsistentFit";
    case ErrorCode::SlowConvergence: return "SlowConvergence";
    case ErrorCode::NonPositiveFactor: return "NonPositiveFactor";
    case ErrorCode::DivisionByZero: return "DivisionByZero";
    case ErrorCode::InterpolationOutOfHull: return "InterpolationOutOfHull";
    case ErrorCode::UndefinedSplinter: return "UndefinedSplinter";
    case ErrorCode::MismatchedEndpoints: return "MismatchedEndpoints";
    case ErrorCode::NonFiniteRatio: return "NonFiniteRatio";
    case ErrorCode::InvalidMultiplier: return "InvalidMultiplier";
    case ErrorCode::ZeroReference: return "ZeroReference";
    case ErrorCode::ZeroDenominator: return "ZeroDenominator";
    case ErrorCode::ConstraintViolation: return "ConstraintViolation";
    case ErrorCode::InvalidParameter: return "InvalidParameter";
    case ErrorCode::IoError: return "IoError";
  }
  return "UnknownError";
}

}  // namespace fieldrec
