#include "edgeworth/error.hpp"

namespace edgeworth {

std::string_view error_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::DivByZeroConstantTerm: return "DivByZeroConstantTerm";
    case ErrorCode::LogOfZeroConstantTerm: return "LogOfZeroConstantTerm";
    case ErrorCode::InconsistentDimensions: return "InconsistentDimensions";
    case ErrorCode::NonStochasticModel: return "NonStochasticModel";
    case ErrorCode::NegativeProbability: return "NegativeProbability";
    case ErrorCode::InsufficientMoments: return "InsufficientMoments";
    case ErrorCode::SlopeBelowOne: return "SlopeBelowOne";
    case ErrorCode::SingularStationarySolve: return "SingularStationarySolve";
    case ErrorCode::GapBelowTolerance: return "GapBelowTolerance";
    case ErrorCode::BorderedSolveSingular: return "BorderedSolveSingular";
    case ErrorCode::DegenerateVariance: return "DegenerateVariance";
    case ErrorCode::NonRealDrift: return "NonRealDrift";
    case ErrorCode::ImaginaryResidue: return "ImaginaryResidue";
    case ErrorCode::NonZeroMean: return "NonZeroMean";
    case ErrorCode::DegreeOverflow: return "DegreeOverflow";
    case ErrorCode::TableTooLarge: return "TableTooLarge";
    case ErrorCode::TooManyValues: return "TooManyValues";
    case ErrorCode::OracleUnavailable: return "OracleUnavailable";
    case ErrorCode::QuadratureNotConverged: return "QuadratureNotConverged";
    case ErrorCode::InvalidConfig: return "InvalidConfig";
  }
  return "Unknown";
}

int exit_code_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::TableTooLarge:
    case ErrorCode::TooManyValues:
    case ErrorCode::OracleUnavailable:
      return 3;
    default:
      return 2;
  }
}

}  // namespace edgeworth
