#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace momt {

enum class ErrorCode {
  kEmptySubset,
  kIndexOutOfRange,
  kMarginalMismatch,
  kMapDomainGap,
  kInstanceTooLarge,
  kNonFiniteCost,
  kSubsetTooSmall,
  kSubsetNotProper,
  kInfeasiblePotentials,
  kNotAGraph,
  kOutOfRange,
  kInvariantViolation,
  kSingularMatrix,
  kZeroXi,
  kEmptyTable,
  kNotSurplusCost,
  kDimensionMismatch,
  kSchemaError,
  kUnknownScenario,
  kInfeasible,
  kUnbounded,
  kIterationLimit,
  kInvalidArgument,
};

std::string_view error_code_name(ErrorCode code);

// Validation errors map to CLI exit code 2, numerical/solver ones to 3.
bool is_validation_error(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(error_code_name(code)) + ": " + message),
        code_(code) {}

  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace momt
