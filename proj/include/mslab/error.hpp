#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace mslab {

enum class ErrorCode {
  Domain,
  RationalFrequency,
  PoleOnLattice,
  NumericalFailure,
  SingularEnergy,
  SingularMinor,
  RootCountMismatch,
  DegenerateSchedule,
  PremiseViolated,
  InsufficientDecaySamples,
  DegenerateSubset,
  UnsupportedRegime,
  SentinelArithmetic,
  Config,
};

std::string_view to_string(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what);
  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] void fail(ErrorCode code, const std::string& what);

}  // namespace mslab
