#pragma once

#include <stdexcept>
#include <string>

namespace pgn {

// Root of all library exceptions. Solver-level terminal conditions are not
// thrown; they are reported through SolveReport::status.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

#define PGN_DEFINE_ERROR(Name, Base)  \
  class Name : public Base {          \
   public:                            \
    using Base::Base;                 \
  }

PGN_DEFINE_ERROR(InvalidArgument, Error);
PGN_DEFINE_ERROR(ShapeMismatch, Error);
PGN_DEFINE_ERROR(DimensionMismatch, ShapeMismatch);
PGN_DEFINE_ERROR(RankDeficient, Error);
PGN_DEFINE_ERROR(JacobianRankDeficient, RankDeficient);
PGN_DEFINE_ERROR(InvalidPoint, Error);
PGN_DEFINE_ERROR(StepTooLarge, Error);
PGN_DEFINE_ERROR(EmptyBox, Error);
PGN_DEFINE_ERROR(OutOfDomain, Error);
PGN_DEFINE_ERROR(ConditionViolated, Error);
PGN_DEFINE_ERROR(InsufficientData, Error);
PGN_DEFINE_ERROR(UnknownProblem, Error);
PGN_DEFINE_ERROR(ExternalDefinitionUnavailable, Error);

#undef PGN_DEFINE_ERROR

}  // namespace pgn
