#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "xrouter/benchctl/topology.h"
#include "xrouter/clusterkit/pipeline.h"
#include "xrouter/common/net.h"
#include "xrouter/loadgen/event_log.h"
#include "xrouter/loadgen/workload.h"

namespace xrouter::benchctl {

struct LiveParams {
  int users = 1;
  loadgen::WorkloadSpec workload;
  uint64_t seed = 1;
  double time_scale = 0.001;
  int gateways = 16;
  bool control_round = true;
  std::string run_id = "live";
  std::string scenario;
  /// When non-empty: via/, direct/ and backends/ are written below it.
  std::string dir;
};

struct LiveRound {
  loadgen::TokenEventLog via;     // balancer -> gateways -> backends
  loadgen::TokenEventLog direct;  // control round straight to the same backends
  std::vector<std::string> served_by;  // per via record: backend name, "" if unseen
  std::vector<uint64_t> balancer_counts;
  int64_t sessions = 0;
  int64_t errors = 0;
  int64_t routing_mismatches = 0;   // backend not in routes[classify(prompt)]
  int64_t checksum_mismatches = 0;  // loadgen crc32 != backend crc32
  int64_t routed = 0;               // requests timed inside the gateways
  double gateway_latency_ms = 0.0;  // median gateway routing latency
  int64_t paired = 0;               // sessions with a TTFT in both rounds
  double ttft_delta_ms = 0.0;       // median of paired (ttft_via - ttft_direct)
  std::vector<std::string> orphaned;  // endpoints still accepting after teardown
};

/// Launches backends, `gateways` gateway instances and a balancer on
/// loopback, drives closed-loop load through the balancer and cross-checks
/// routing and relay checksums against the backends' session digests. The
/// optional control round replays the same requests against fresh backends
/// directly, pairing each request with its routed backend.
/// Throws Error(kLaunchFailure) if a component cannot start.
LiveRound run_live(const Topology& topology,
                   std::shared_ptr<const clusterkit::ClusterPipeline> pipeline,
                   const loadgen::PromptSource& source, const LiveParams& params);

/// True when something accepts connections at `endpoint`.
bool port_open(const net::Endpoint& endpoint);

}  // namespace xrouter::benchctl
