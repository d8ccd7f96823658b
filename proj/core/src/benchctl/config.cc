#include "xrouter/benchctl/config.h"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "json.hpp"
#include "xrouter/common/error.h"

namespace xrouter::benchctl {

namespace fs = std::filesystem;
using nlohmann::json;
using nlohmann::ordered_json;

namespace {

const std::map<std::string, TopologyKind>& topology_names() {
  static const std::map<std::string, TopologyKind> names = {
      {"baseline_A", TopologyKind::kBaselineA}, {"baseline_B", TopologyKind::kBaselineB},
      {"baseline_C", TopologyKind::kBaselineC}, {"expert_D", TopologyKind::kExpertD},
      {"expert_E", TopologyKind::kExpertE},     {"custom", TopologyKind::kCustom}};
  return names;
}

std::string resolve(const std::string& base, const std::string& path) {
  if (base.empty() || path.empty() || fs::path(path).is_absolute()) return path;
  return (fs::path(base) / path).lexically_normal().string();
}

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIo, "cannot open " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void check_levels(const std::vector<int>& levels, const char* what) {
  if (levels.empty()) throw Error(ErrorCode::kInvalidArgument, std::string(what) + " is empty");
  for (size_t i = 0; i < levels.size(); ++i) {
    if (levels[i] < 1 || (i && levels[i] <= levels[i - 1])) {
      throw Error(ErrorCode::kInvalidArgument,
                  std::string(what) + " must be positive and strictly ascending");
    }
  }
}

}  // namespace

std::string to_string(TopologyKind kind) {
  for (const auto& [name, k] : topology_names()) {
    if (k == kind) return name;
  }
  return "custom";
}

TopologyKind parse_topology(const std::string& name) {
  const auto it = topology_names().find(name);
  if (it == topology_names().end()) throw Error(ErrorCode::kParse, "unknown topology '" + name + "'");
  return it->second;
}

void ExperimentConfig::validate() const {
  check_levels(concurrency_levels, "concurrency_levels");
  if (gateway_instances < 1) throw Error(ErrorCode::kInvalidArgument, "gateway_instances must be >= 1");
  if (repeats < 1) throw Error(ErrorCode::kInvalidArgument, "repeats must be >= 1");
  if (!(time_scale > 0)) throw Error(ErrorCode::kInvalidArgument, "time_scale must be > 0");
  if (!(window_s > 0)) throw Error(ErrorCode::kInvalidArgument, "window_s must be > 0");
  if (virtual_gateway_ns < 0) throw Error(ErrorCode::kInvalidArgument, "virtual_gateway_ns must be >= 0");
  if (live.max_users < 1 || live.requests_per_user < 1 || live.max_tokens < 1) {
    throw Error(ErrorCode::kInvalidArgument, "live settings must be >= 1");
  }
  if (topology == TopologyKind::kCustom && (profiles.empty() || routes.empty())) {
    throw Error(ErrorCode::kInvalidArgument, "custom topology needs profiles and routes");
  }
  workload.validate();
}

void SweepConfig::validate() const {
  if (batch_sizes.empty() || variants.empty() || tp_degrees.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "sweep lists must be non-empty");
  }
  check_levels(concurrency_levels, "concurrency_levels");
  if (repeats < 1 || max_tokens < 1 || requests_per_user < 1) {
    throw Error(ErrorCode::kInvalidArgument, "repeats, max_tokens, requests_per_user must be >= 1");
  }
  for (const auto& v : variants) {
    for (int tp : tp_degrees) {
      if (!v.kv_cache_gb.contains(tp)) {
        throw Error(ErrorCode::kInvalidArgument,
                    "variant " + v.name + " has no kv_cache_gb for tp " + std::to_string(tp));
      }
    }
  }
}

ExperimentConfig parse_experiment(const std::string& json_text, const std::string& base_dir) {
  ExperimentConfig cfg;
  try {
    const auto j = json::parse(json_text);
    cfg.scenario = j.value("scenario", cfg.scenario);
    cfg.topology = parse_topology(j.value("topology", to_string(cfg.topology)));
    cfg.profiles_dir = resolve(base_dir, j.value("profiles_dir", cfg.profiles_dir));
    if (j.contains("profiles")) {
      for (const auto& [name, path] : j.at("profiles").items()) {
        cfg.profiles[name] = resolve(base_dir, path.get<std::string>());
      }
    }
    if (j.contains("routes")) {
      for (const auto& [key, names] : j.at("routes").items()) {
        cfg.routes[std::stoi(key)] = names.get<std::vector<std::string>>();
      }
    }
    cfg.pipeline = resolve(base_dir, j.value("pipeline", cfg.pipeline));
    cfg.corpus = resolve(base_dir, j.value("corpus", cfg.corpus));
    cfg.gateway_instances = j.value("gateway_instances", cfg.gateway_instances);
    cfg.concurrency_levels = j.value("concurrency_levels", cfg.concurrency_levels);
    if (j.contains("workload")) {
      const auto& w = j.at("workload");
      cfg.workload = w.is_string() ? loadgen::load_workload(resolve(base_dir, w.get<std::string>()))
                                   : loadgen::parse_workload(w.dump());
    }
    cfg.repeats = j.value("repeats", cfg.repeats);
    cfg.time_scale = j.value("time_scale", cfg.time_scale);
    cfg.seed = j.value("seed", cfg.seed);
    cfg.output_dir = resolve(base_dir, j.value("output_dir", cfg.output_dir));
    cfg.window_s = j.value("window_s", cfg.window_s);
    cfg.virtual_gateway_ns = j.value("virtual_gateway_ns", cfg.virtual_gateway_ns);
    if (j.contains("live")) {
      const auto& l = j.at("live");
      cfg.live.enabled = l.value("enabled", cfg.live.enabled);
      cfg.live.max_users = l.value("max_users", cfg.live.max_users);
      cfg.live.requests_per_user = l.value("requests_per_user", cfg.live.requests_per_user);
      cfg.live.max_tokens = l.value("max_tokens", cfg.live.max_tokens);
      cfg.live.control_round = l.value("control_round", cfg.live.control_round);
      cfg.live.time_scale = l.value("time_scale", cfg.live.time_scale);
    }
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kParse, std::string("experiment config: ") + e.what());
  } catch (const std::invalid_argument&) {
    throw Error(ErrorCode::kParse, "experiment config: route keys must be integers");
  }
  cfg.validate();
  return cfg;
}

ExperimentConfig load_experiment(const std::string& path) {
  return parse_experiment(read_file(path), fs::path(path).parent_path().string());
}

std::string experiment_to_json(const ExperimentConfig& cfg) {
  ordered_json j;
  j["scenario"] = cfg.scenario;
  j["topology"] = to_string(cfg.topology);
  j["profiles_dir"] = cfg.profiles_dir;
  if (!cfg.profiles.empty()) j["profiles"] = cfg.profiles;
  if (!cfg.routes.empty()) {
    ordered_json r;
    for (const auto& [c, names] : cfg.routes) r[std::to_string(c)] = names;
    j["routes"] = r;
  }
  j["pipeline"] = cfg.pipeline;
  j["corpus"] = cfg.corpus;
  j["gateway_instances"] = cfg.gateway_instances;
  j["concurrency_levels"] = cfg.concurrency_levels;
  j["workload"] = ordered_json::parse(loadgen::workload_to_json(cfg.workload));
  j["repeats"] = cfg.repeats;
  j["time_scale"] = cfg.time_scale;
  j["seed"] = cfg.seed;
  j["output_dir"] = cfg.output_dir;
  j["window_s"] = cfg.window_s;
  j["virtual_gateway_ns"] = cfg.virtual_gateway_ns;
  ordered_json l;
  l["enabled"] = cfg.live.enabled;
  l["max_users"] = cfg.live.max_users;
  l["requests_per_user"] = cfg.live.requests_per_user;
  l["max_tokens"] = cfg.live.max_tokens;
  l["control_round"] = cfg.live.control_round;
  l["time_scale"] = cfg.live.time_scale;
  j["live"] = l;
  return j.dump(2);
}

SweepConfig parse_sweep(const std::string& json_text, const std::string& base_dir) {
  SweepConfig cfg;
  try {
    const auto j = json::parse(json_text);
    cfg.batch_sizes = j.value("batch_sizes", cfg.batch_sizes);
    cfg.tp_degrees = j.value("tp_degrees", cfg.tp_degrees);
    cfg.concurrency_levels = j.value("concurrency_levels", cfg.concurrency_levels);
    cfg.repeats = j.value("repeats", cfg.repeats);
    cfg.max_tokens = j.value("max_tokens", cfg.max_tokens);
    cfg.requests_per_user = j.value("requests_per_user", cfg.requests_per_user);
    cfg.corpus = resolve(base_dir, j.value("corpus", cfg.corpus));
    cfg.seed = j.value("seed", cfg.seed);
    cfg.output_dir = resolve(base_dir, j.value("output_dir", cfg.output_dir));
    if (j.contains("input_length")) {
      ordered_json w;
      w["input_length_distribution"] = j.at("input_length");
      cfg.input_length = loadgen::parse_workload(w.dump()).input_length;
    }
    for (const auto& v : j.at("variants")) {
      SweepVariant sv;
      sv.name = v.at("name").get<std::string>();
      sv.profile = resolve(base_dir, v.at("profile").get<std::string>());
      for (const auto& [tp, gb] : v.at("kv_cache_gb").items()) sv.kv_cache_gb[std::stoi(tp)] = gb.get<double>();
      cfg.variants.push_back(std::move(sv));
    }
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kParse, std::string("sweep config: ") + e.what());
  } catch (const std::invalid_argument&) {
    throw Error(ErrorCode::kParse, "sweep config: kv_cache_gb keys must be integers");
  }
  cfg.validate();
  return cfg;
}

SweepConfig load_sweep(const std::string& path) {
  return parse_sweep(read_file(path), fs::path(path).parent_path().string());
}

std::string sweep_to_json(const SweepConfig& cfg) {
  ordered_json j;
  j["batch_sizes"] = cfg.batch_sizes;
  j["tp_degrees"] = cfg.tp_degrees;
  j["concurrency_levels"] = cfg.concurrency_levels;
  j["repeats"] = cfg.repeats;
  j["max_tokens"] = cfg.max_tokens;
  j["requests_per_user"] = cfg.requests_per_user;
  loadgen::WorkloadSpec w;
  w.input_length = cfg.input_length;
  j["input_length"] = ordered_json::parse(loadgen::workload_to_json(w))["input_length_distribution"];
  j["corpus"] = cfg.corpus;
  j["seed"] = cfg.seed;
  j["output_dir"] = cfg.output_dir;
  ordered_json vs = ordered_json::array();
  for (const auto& v : cfg.variants) {
    ordered_json o;
    o["name"] = v.name;
    o["profile"] = v.profile;
    ordered_json kv;
    for (const auto& [tp, gb] : v.kv_cache_gb) kv[std::to_string(tp)] = gb;
    o["kv_cache_gb"] = kv;
    vs.push_back(o);
  }
  j["variants"] = vs;
  return j.dump(2);
}

namespace {

std::optional<std::string> env(const char* name) {
  const char* v = std::getenv(name);
  if (!v || !*v) return std::nullopt;
  return std::string(v);
}

uint64_t env_seed(const std::string& v) {
  try {
    size_t used = 0;
    const auto s = std::stoull(v, &used);
    if (used != v.size()) throw std::invalid_argument(v);
    return s;
  } catch (const std::exception&) {
    throw Error(ErrorCode::kInvalidArgument, "XR_SEED must be an unsigned integer");
  }
}

}  // namespace

void apply_env_overrides(ExperimentConfig& cfg) {
  if (auto s = env("XR_SEED")) cfg.seed = env_seed(*s);
  if (auto t = env("XR_TIME_SCALE")) {
    try {
      cfg.time_scale = std::stod(*t);
    } catch (const std::exception&) {
      throw Error(ErrorCode::kInvalidArgument, "XR_TIME_SCALE must be a number");
    }
  }
  cfg.validate();
}

void apply_env_overrides(SweepConfig& cfg) {
  if (auto s = env("XR_SEED")) cfg.seed = env_seed(*s);
}

}  // namespace xrouter::benchctl
