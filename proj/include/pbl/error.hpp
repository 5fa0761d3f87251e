#pragma once

#include <stdexcept>
#include <string>

namespace pbl {

enum class ErrorCode {
  // validation failures (bad input, violated precondition)
  InvalidArgument,
  DimensionMismatch,
  ZeroVector,
  WrongDimension,
  DegenerateParameter,
  NoIntersection,
  AmbiguousSign,
  MultipleRoot,
  NotDecoratable,
  BoundaryCase,
  PointNotOnConic,
  PointNotOnBoundary,
  NotPlanarLightLike,
  NonpositiveConstantTerm,
  DegenerateConfiguration,
  InsufficientOrder,
  VacuousCondition,
  OddPeriod,
  InadmissibleCaustics,
  ConditionNotSatisfied,
  // numerical failures
  LightLikeNormal,
  CuspPoint,
  NumericalStall,
  NoSolution,
  ConstructionFailure,
};

inline const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::ZeroVector: return "ZeroVector";
    case ErrorCode::WrongDimension: return "WrongDimension";
    case ErrorCode::DegenerateParameter: return "DegenerateParameter";
    case ErrorCode::NoIntersection: return "NoIntersection";
    case ErrorCode::AmbiguousSign: return "AmbiguousSign";
    case ErrorCode::MultipleRoot: return "MultipleRoot";
    case ErrorCode::NotDecoratable: return "NotDecoratable";
    case ErrorCode::BoundaryCase: return "BoundaryCase";
    case ErrorCode::PointNotOnConic: return "PointNotOnConic";
    case ErrorCode::PointNotOnBoundary: return "PointNotOnBoundary";
    case ErrorCode::NotPlanarLightLike: return "NotPlanarLightLike";
    case ErrorCode::NonpositiveConstantTerm: return "NonpositiveConstantTerm";
    case ErrorCode::DegenerateConfiguration: return "DegenerateConfiguration";
    case ErrorCode::InsufficientOrder: return "InsufficientOrder";
    case ErrorCode::VacuousCondition: return "VacuousCondition";
    case ErrorCode::OddPeriod: return "OddPeriod";
    case ErrorCode::InadmissibleCaustics: return "InadmissibleCaustics";
    case ErrorCode::ConditionNotSatisfied: return "ConditionNotSatisfied";
    case ErrorCode::LightLikeNormal: return "LightLikeNormal";
    case ErrorCode::CuspPoint: return "CuspPoint";
    case ErrorCode::NumericalStall: return "NumericalStall";
    case ErrorCode::NoSolution: return "NoSolution";
    case ErrorCode::ConstructionFailure: return "ConstructionFailure";
  }
  return "Unknown";
}

/// True for failures of the numerics rather than of the caller's input.
inline bool is_numerical(ErrorCode code) {
  switch (code) {
    case ErrorCode::LightLikeNormal:
    case ErrorCode::CuspPoint:
    case ErrorCode::NumericalStall:
    case ErrorCode::NoSolution:
    case ErrorCode::ConstructionFailure:
      return true;
    default:
      return false;
  }
}

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace pbl
