#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace xrouter {

enum class ErrorCode {
  kIo,
  kParse,
  kInvalidArgument,
  // clusterkit
  kEmptyCorpus,
  kTooFewPoints,
  kVersionMismatch,
  kCorruptFile,
  // routecore
  kUnknownCluster,
  kNoUpstreams,
  kMalformedFrame,
  // simbackend
  kDuplicateId,
  kEmptyEngine,
  // loadgen
  kEmptyCategory,
  kRunAborted,
  // metricspipe
  kNoTokens,
  kTooFewTokens,
  kZeroDuration,
  kEmptyInput,
  kEmptyLog,
  // benchctl
  kMissingCategory,
  kLaunchFailure,
};

std::string_view to_string(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace xrouter
