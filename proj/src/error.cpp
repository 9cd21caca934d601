#include "mslab/error.hpp"

namespace mslab {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::Domain: return "DomainError";
    case ErrorCode::RationalFrequency: return "RationalFrequency";
    case ErrorCode::PoleOnLattice: return "PoleOnLattice";
    case ErrorCode::NumericalFailure: return "NumericalFailure";
    case ErrorCode::SingularEnergy: return "SingularEnergy";
    case ErrorCode::SingularMinor: return "SingularMinor";
    case ErrorCode::RootCountMismatch: return "RootCountMismatch";
    case ErrorCode::DegenerateSchedule: return "DegenerateSchedule";
    case ErrorCode::PremiseViolated: return "PremiseViolated";
    case ErrorCode::InsufficientDecaySamples: return "InsufficientDecaySamples";
    case ErrorCode::DegenerateSubset: return "DegenerateSubset";
    case ErrorCode::UnsupportedRegime: return "UnsupportedRegime";
    case ErrorCode::SentinelArithmetic: return "SentinelArithmetic";
    case ErrorCode::Config: return "ConfigError";
  }
  return "UnknownError";
}

Error::Error(ErrorCode code, const std::string& what)
    : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

void fail(ErrorCode code, const std::string& what) { throw Error(code, what); }

}  // namespace mslab
