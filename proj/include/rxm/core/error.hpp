#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace rxm {

enum class ErrorCode {
  kInvalidArgument,
  kUnknownTool,
  kFileNotFound,
  kMalformedCsv,
  kEmptyFrame,
  kAmbiguousTarget,
  kNoFeatures,
  kEmptyTrainSet,
  kMissingColumn,
  kTooFewSamples,
  kClassTooSmall,
  kAllModelsFailed,
  kDegenerateStd,
  kMissingImportances,
  kInputAborted,
  kSinkUnwritable,
  kDataLoadFailure,
  kMaxStepsExceeded,
  kBackendFailure,
};

std::string_view to_string(ErrorCode code);

// Every engine failure surfaces as an Error carrying a machine-readable code
// and a message meant for the operator.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace rxm
