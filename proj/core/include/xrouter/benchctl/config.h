#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "xrouter/loadgen/workload.h"

namespace xrouter::benchctl {

enum class TopologyKind { kBaselineA, kBaselineB, kBaselineC, kExpertD, kExpertE, kCustom };

std::string to_string(TopologyKind kind);
/// Throws Error(kParse) for unknown names.
TopologyKind parse_topology(const std::string& name);

/// Settings of the real-socket rounds that accompany each concurrency level.
struct LiveOptions {
  bool enabled = true;
  int max_users = 64;          // live users = min(level, max_users)
  int requests_per_user = 1;
  int max_tokens = 16;
  bool control_round = true;   // direct-to-backend round for gateway overhead
  double time_scale = -1.0;    // < 0: use the experiment's time_scale
};

struct ExperimentConfig {
  std::string scenario = "experiment";
  TopologyKind topology = TopologyKind::kExpertE;
  std::string profiles_dir = "data/profiles";
  /// Custom topology only: backend name -> profile path, and cluster -> backend names.
  std::map<std::string, std::string> profiles;
  std::map<int, std::vector<std::string>> routes;
  std::string pipeline = "build/pipeline.bin";
  std::string corpus = "data/corpus.jsonl";
  int gateway_instances = 16;
  std::vector<int> concurrency_levels = {1, 100, 200, 300, 400, 500, 600, 700, 800, 900, 1000};
  loadgen::WorkloadSpec workload;
  int repeats = 1;
  double time_scale = 0.001;
  uint64_t seed = 1;
  std::string output_dir = "out/experiment";
  double window_s = 2.0;
  int64_t virtual_gateway_ns = 0;  // constant per-request routing delay in the simulation
  LiveOptions live;

  /// Throws Error(kInvalidArgument).
  void validate() const;
};

struct SweepVariant {
  std::string name;
  std::string profile;                  // base profile path (latency coefficients)
  std::map<int, double> kv_cache_gb;    // per tensor-parallel degree
};

struct SweepConfig {
  std::vector<int> batch_sizes = {20, 100, 200, 400, 600};
  std::vector<SweepVariant> variants;
  std::vector<int> tp_degrees = {4, 8};
  std::vector<int> concurrency_levels = {100, 200, 300, 400, 500};
  int repeats = 5;
  int max_tokens = 200;
  int requests_per_user = 1;
  loadgen::LengthDistribution input_length{loadgen::LengthDistribution::Kind::kNormal, 335, 30, 1,
                                           INT64_MAX};
  std::string corpus = "data/corpus.jsonl";
  uint64_t seed = 1;
  std::string output_dir = "out/sweep";

  void validate() const;
};

/// Relative paths inside the file are resolved against `base_dir` when given.
ExperimentConfig parse_experiment(const std::string& json_text, const std::string& base_dir = "");
ExperimentConfig load_experiment(const std::string& path);
std::string experiment_to_json(const ExperimentConfig& cfg);

SweepConfig parse_sweep(const std::string& json_text, const std::string& base_dir = "");
SweepConfig load_sweep(const std::string& path);
std::string sweep_to_json(const SweepConfig& cfg);

/// XR_SEED and XR_TIME_SCALE override the configured values when set.
void apply_env_overrides(ExperimentConfig& cfg);
void apply_env_overrides(SweepConfig& cfg);

}  // namespace xrouter::benchctl
