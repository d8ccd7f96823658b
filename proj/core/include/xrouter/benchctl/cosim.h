#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "xrouter/benchctl/topology.h"
#include "xrouter/loadgen/event_log.h"
#include "xrouter/loadgen/workload.h"

namespace xrouter::benchctl {

struct CosimOptions {
  int users = 1;
  loadgen::WorkloadSpec workload;
  uint64_t seed = 1;
  int64_t gateway_ns = 0;  // added between send and backend arrival
  std::string run_id = "run";
  std::string scenario;
};

struct CosimResult {
  loadgen::TokenEventLog log;                 // clock = "virtual"
  std::vector<std::vector<std::string>> served;  // request ids per backend
  std::vector<int> clusters;                  // per record, in log order
};

/// Closed-loop users against the topology's batching engines on one shared
/// virtual clock. The schedule is the one run_load would issue for the same
/// seed; routing uses `classify` and per-cluster round robin. Deterministic.
CosimResult cosimulate(const Topology& topology,
                       const std::function<int(const std::string&)>& classify,
                       const loadgen::PromptSource& source, const CosimOptions& options);

}  // namespace xrouter::benchctl
