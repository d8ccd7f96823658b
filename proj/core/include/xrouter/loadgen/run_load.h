#pragma once

#include <chrono>
#include <functional>
#include <cstdint>
#include <string>

#include "xrouter/common/net.h"
#include "xrouter/loadgen/event_log.h"
#include "xrouter/loadgen/workload.h"

namespace xrouter::loadgen {

struct LoadOptions {
  std::string run_id = "run";
  std::string scenario;
  std::chrono::milliseconds connect_timeout{5000};
  std::chrono::milliseconds read_timeout{120000};
};

/// Closed-loop load: `users` threads, each issuing its planned requests one
/// after another against `target`, stamping sends, tokens and ends on one
/// steady clock. Transport failures are recorded as end reason "error".
/// Throws Error(kRunAborted) once more than half of all requests fail.
TokenEventLog run_load(const net::Endpoint& target, int users, const WorkloadSpec& spec,
                       const PromptSource& source, uint64_t seed,
                       const LoadOptions& options = {});

/// Streams one request and fills a SessionRecord; `now` gives stamps in ns.
SessionRecord stream_request(const net::Endpoint& target, const RequestPlan& plan,
                             int max_tokens, const std::function<int64_t()>& now, const LoadOptions& options);

}  // namespace xrouter::loadgen
