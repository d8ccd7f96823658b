#pragma once

#include <string>
#include <vector>

#include "xrouter/benchctl/config.h"
#include "xrouter/loadgen/event_log.h"
#include "xrouter/simbackend/profile.h"

namespace xrouter::benchctl {

struct SweepCell {
  std::string config;  // <variant>_tp<tp>_bs<batch>
  int level = 0;
  std::vector<double> total_s;  // per repeat, in repeat order
  double mean = 0.0;
  double std = 0.0;             // population
};

struct SweepReport {
  std::string output_dir;
  std::vector<std::string> configs;  // heatmap row order
  std::vector<SweepCell> cells;      // config-major, then level
};

/// The variant's base profile with batch size, tensor-parallel degree and
/// KV budget substituted for one grid point.
simbackend::ModelProfile sweep_profile(const SweepVariant& variant, int tp, int batch_size);

/// Total time of a run: last end minus first send, seconds.
double total_time_s(const loadgen::TokenEventLog& log);

/// Runs the grid in virtual time directly against one backend per grid point.
/// Writes raw/<config>_r<repeat>.csv (level,sessions,first_send_ns,last_end_ns,total_s),
/// heatmap.csv (one row per config, <level>_mean/<level>_std columns),
/// heatmap_tp<tp>.svg and config.json.
SweepReport run_sweep(const SweepConfig& cfg);

}  // namespace xrouter::benchctl
