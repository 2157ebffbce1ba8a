#include "momt/error.hpp"

namespace momt {

std::string_view error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::kEmptySubset: return "EmptySubset";
    case ErrorCode::kIndexOutOfRange: return "IndexOutOfRange";
    case ErrorCode::kMarginalMismatch: return "MarginalMismatch";
    case ErrorCode::kMapDomainGap: return "MapDomainGap";
    case ErrorCode::kInstanceTooLarge: return "InstanceTooLarge";
    case ErrorCode::kNonFiniteCost: return "NonFiniteCost";
    case ErrorCode::kSubsetTooSmall: return "SubsetTooSmall";
    case ErrorCode::kSubsetNotProper: return "SubsetNotProper";
    case ErrorCode::kInfeasiblePotentials: return "InfeasiblePotentials";
    case ErrorCode::kNotAGraph: return "NotAGraph";
    case ErrorCode::kOutOfRange: return "OutOfRange";
    case ErrorCode::kInvariantViolation: return "InvariantViolation";
    case ErrorCode::kSingularMatrix: return "SingularMatrix";
    case ErrorCode::kZeroXi: return "ZeroXi";
    case ErrorCode::kEmptyTable: return "EmptyTable";
    case ErrorCode::kNotSurplusCost: return "NotSurplusCost";
    case ErrorCode::kDimensionMismatch: return "DimensionMismatch";
    case ErrorCode::kSchemaError: return "SchemaError";
    case ErrorCode::kUnknownScenario: return "UnknownScenario";
    case ErrorCode::kInfeasible: return "Infeasible";
    case ErrorCode::kUnbounded: return "Unbounded";
    case ErrorCode::kIterationLimit: return "IterationLimit";
    case ErrorCode::kInvalidArgument: return "InvalidArgument";
  }
  return "Unknown";
}

bool is_validation_error(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInstanceTooLarge:
    case ErrorCode::kInfeasible:
    case ErrorCode::kUnbounded:
    case ErrorCode::kIterationLimit:
    case ErrorCode::kSingularMatrix:
    case ErrorCode::kInvariantViolation:
    case ErrorCode::kNotAGraph:
    case ErrorCode::kInfeasiblePotentials:
      return false;
    default:
      return true;
  }
}

}  // namespace momt
