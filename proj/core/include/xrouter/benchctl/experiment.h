#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "xrouter/benchctl/config.h"
#include "xrouter/metricspipe/metrics.h"

namespace xrouter::benchctl {

/// Outcome of one live round, as stored in live.json.
struct LiveSummary {
  int level = 0;
  int users = 0;
  int64_t sessions = 0;
  int64_t errors = 0;
  int64_t routing_mismatches = 0;
  int64_t checksum_mismatches = 0;
  int64_t routed = 0;
  double gateway_latency_ms = 0.0;
  int64_t paired = 0;
  double ttft_delta_ms = 0.0;
  std::vector<uint64_t> balancer_counts;
  std::vector<std::string> orphaned;
};

struct ExperimentReport {
  std::string output_dir;
  std::vector<std::string> run_dirs;  // virtual runs, runs/N<level>_r<repeat>
  std::vector<LiveSummary> live;
  std::vector<std::string> failures;  // "N=<level> ...: reason"
  metricspipe::SummaryReport summary;
};

/// Runs every concurrency level x repeat in virtual time and, when enabled,
/// one live round per level; then summarizes. Layout of the output dir:
/// config.json, artifacts.json, runs/, live/, live.json, failures.json and
/// the metricspipe summary files. A failing level is listed and skipped.
/// Throws Error(kLaunchFailure) when the artifact, corpus or profiles are missing.
ExperimentReport run_experiment(const ExperimentConfig& cfg);

std::string live_json(const std::vector<LiveSummary>& live);

}  // namespace xrouter::benchctl
