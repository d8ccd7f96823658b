#include "xrouter/common/error.h"

namespace xrouter {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::kIo: return "IoError";
    case ErrorCode::kParse: return "ParseError";
    case ErrorCode::kInvalidArgument: return "InvalidArgument";
    case ErrorCode::kEmptyCorpus: return "EmptyCorpus";
    case ErrorCode::kTooFewPoints: return "TooFewPoints";
    case ErrorCode::kVersionMismatch: return "VersionMismatch";
    case ErrorCode::kCorruptFile: return "CorruptFile";
    case ErrorCode::kUnknownCluster: return "UnknownCluster";
    case ErrorCode::kNoUpstreams: return "NoUpstreams";
    case ErrorCode::kMalformedFrame: return "MalformedFrame";
    case ErrorCode::kDuplicateId: return "DuplicateId";
    case ErrorCode::kEmptyEngine: return "EmptyEngine";
    case ErrorCode::kEmptyCategory: return "EmptyCategory";
    case ErrorCode::kRunAborted: return "RunAborted";
    case ErrorCode::kNoTokens: return "NoTokens";
    case ErrorCode::kTooFewTokens: return "TooFewTokens";
    case ErrorCode::kZeroDuration: return "ZeroDuration";
    case ErrorCode::kEmptyInput: return "EmptyInput";
    case ErrorCode::kEmptyLog: return "EmptyLog";
    case ErrorCode::kMissingCategory: return "MissingCategory";
    case ErrorCode::kLaunchFailure: return "LaunchFailure";
  }
  return "Unknown";
}

}  // namespace xrouter
