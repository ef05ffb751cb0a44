#include "gparse/errors.h"

namespace gparse {

std::string_view error_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::kIo: return "Io";
    case ErrorCode::kUnbalancedBrackets: return "UnbalancedBrackets";
    case ErrorCode::kEmptyLabel: return "EmptyLabel";
    case ErrorCode::kNonContiguousChildren: return "NonContiguousChildren";
    case ErrorCode::kEmptyCorpus: return "EmptyCorpus";
    case ErrorCode::kDimensionMismatch: return "DimensionMismatch";
    case ErrorCode::kMalformedLine: return "MalformedLine";
    case ErrorCode::kIndexOutOfRange: return "IndexOutOfRange";
    case ErrorCode::kShapeMismatch: return "ShapeMismatch";
    case ErrorCode::kNonFiniteValue: return "NonFiniteValue";
    case ErrorCode::kEmptyChildList: return "EmptyChildList";
    case ErrorCode::kUnknownLabel: return "UnknownLabel";
    case ErrorCode::kMissingForwardCache: return "MissingForwardCache";
    case ErrorCode::kInvalidGoldPath: return "InvalidGoldPath";
    case ErrorCode::kEmptyTrainingSet: return "EmptyTrainingSet";
    case ErrorCode::kUnknownPosTag: return "UnknownPosTag";
    case ErrorCode::kIncompleteCoverage: return "IncompleteCoverage";
    case ErrorCode::kTagsetMismatch: return "TagsetMismatch";
    case ErrorCode::kLengthMismatch: return "LengthMismatch";
    case ErrorCode::kEmptyCorpusDump: return "EmptyCorpusDump";
    case ErrorCode::kBadFormat: return "BadFormat";
    case ErrorCode::kReplayStuck: return "ReplayStuck";
  }
  return "Unknown";
}

Error::Error(ErrorCode code, const std::string& message)
    : std::runtime_error(std::string(error_name(code)) + ": " + message),
      code_(code) {}

}  // namespace gparse
