#pragma once

#include <map>
#include <string>
#include <vector>

#include "xrouter/benchctl/config.h"
#include "xrouter/simbackend/profile.h"

namespace xrouter::benchctl {

struct BackendSpec {
  std::string name;
  std::string profile_path;
  simbackend::ModelProfile profile;
};

/// Backends plus the cluster -> backend mapping. Baselines map every cluster
/// onto their one or two backends so requests still traverse the gateway;
/// expert topologies map cluster i to backend i.
struct Topology {
  std::vector<BackendSpec> backends;
  std::map<int, std::vector<size_t>> routes;
};

/// Throws Error(kLaunchFailure) when a profile is missing or invalid and
/// Error(kInvalidArgument) when the topology cannot cover k clusters.
Topology build_topology(const ExperimentConfig& cfg, int k);

}  // namespace xrouter::benchctl
