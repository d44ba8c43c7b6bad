#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace edgeworth {

enum class ErrorCode {
  DivByZeroConstantTerm,
  LogOfZeroConstantTerm,
  InconsistentDimensions,
  NonStochasticModel,
  NegativeProbability,
  InsufficientMoments,
  SlopeBelowOne,
  SingularStationarySolve,
  GapBelowTolerance,
  BorderedSolveSingular,
  DegenerateVariance,
  NonRealDrift,
  ImaginaryResidue,
  NonZeroMean,
  DegreeOverflow,
  TableTooLarge,
  TooManyValues,
  OracleUnavailable,
  QuadratureNotConverged,
  InvalidConfig,
};

std::string_view error_name(ErrorCode code);

// Exit-code class of an error for the command line front end:
// 2 validation/numerical precondition, 3 oracle infeasible.
int exit_code_for(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(error_name(code)) + ": " + message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace edgeworth
