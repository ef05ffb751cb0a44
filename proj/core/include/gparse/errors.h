#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace gparse {

enum class ErrorCode {
  kIo,
  kUnbalancedBrackets,
  kEmptyLabel,
  kNonContiguousChildren,
  kEmptyCorpus,
  kDimensionMismatch,
  kMalformedLine,
  kIndexOutOfRange,
  kShapeMismatch,
  kNonFiniteValue,
  kEmptyChildList,
  kUnknownLabel,
  kMissingForwardCache,
  kInvalidGoldPath,
  kEmptyTrainingSet,
  kUnknownPosTag,
  kIncompleteCoverage,
  kTagsetMismatch,
  kLengthMismatch,
  kEmptyCorpusDump,
  kBadFormat,
  kReplayStuck,
};

std::string_view error_name(ErrorCode code);

// All library failures surface as gparse::Error; code() identifies the kind.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message);

  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace gparse
