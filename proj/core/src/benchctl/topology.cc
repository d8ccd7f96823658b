#include "xrouter/benchctl/topology.h"

#include <filesystem>

#include "xrouter/common/corpus.h"
#include "xrouter/common/error.h"

namespace xrouter::benchctl {

namespace {

simbackend::ModelProfile load_or_fail(const std::string& path) {
  try {
    return simbackend::load_profile(path);
  } catch (const Error& e) {
    throw Error(ErrorCode::kLaunchFailure, std::string("profile: ") + e.what());
  }
}

}  // namespace

Topology build_topology(const ExperimentConfig& cfg, int k) {
  Topology t;
  auto add = [&](const std::string& name, const std::string& path) {
    t.backends.push_back({name, path, load_or_fail(path)});
  };
  auto profile_file = [&](const char* letter) {
    return (std::filesystem::path(cfg.profiles_dir) / (std::string(letter) + ".json")).string();
  };
  auto all_clusters_to = [&](std::vector<size_t> backends) {
    for (int c = 0; c < k; ++c) t.routes[c] = backends;
  };

  switch (cfg.topology) {
    case TopologyKind::kBaselineA:
      add("A0", profile_file("A"));
      all_clusters_to({0});
      break;
    case TopologyKind::kBaselineB:
      add("B0", profile_file("B"));
      all_clusters_to({0});
      break;
    case TopologyKind::kBaselineC:
      add("C0", profile_file("C"));
      add("C1", profile_file("C"));
      all_clusters_to({0, 1});
      break;
    case TopologyKind::kExpertD:
    case TopologyKind::kExpertE: {
      if (k != kNumCategories) {
        throw Error(ErrorCode::kInvalidArgument,
                    "expert topologies need a pipeline with k = " + std::to_string(kNumCategories));
      }
      const char* letter = cfg.topology == TopologyKind::kExpertD ? "D" : "E";
      for (int c = 0; c < k; ++c) {
        add(std::string(letter) + std::to_string(c), profile_file(letter));
        t.routes[c] = {static_cast<size_t>(c)};
      }
      break;
    }
    case TopologyKind::kCustom: {
      std::map<std::string, size_t> index;
      for (const auto& [name, path] : cfg.profiles) {
        index[name] = t.backends.size();
        add(name, path);
      }
      for (const auto& [cluster, names] : cfg.routes) {
        for (const auto& n : names) {
          const auto it = index.find(n);
          if (it == index.end()) {
            throw Error(ErrorCode::kInvalidArgument, "route names unknown backend '" + n + "'");
          }
          t.routes[cluster].push_back(it->second);
        }
      }
      for (int c = 0; c < k; ++c) {
        if (t.routes[c].empty()) {
          throw Error(ErrorCode::kInvalidArgument,
                      "custom routes do not cover cluster " + std::to_string(c));
        }
      }
      break;
    }
  }
  return t;
}

}  // namespace xrouter::benchctl
