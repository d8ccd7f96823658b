#include "xrouter/benchctl/experiment.h"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <memory>

#include <nlohmann/json.hpp>

#include "xrouter/benchctl/corpus_io.h"
#include "xrouter/benchctl/cosim.h"
#include "xrouter/benchctl/live.h"
#include "xrouter/benchctl/topology.h"
#include "xrouter/common/checksum.h"
#include "xrouter/common/error.h"

namespace xrouter::benchctl {

namespace fs = std::filesystem;

namespace {

void write_file(const fs::path& path, const std::string& body) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw Error(ErrorCode::kIo, "cannot write " + path.string());
  out << body;
}

std::string run_name(int level, int repeat) {
  return "N" + std::to_string(level) + "_r" + std::to_string(repeat);
}

}  // namespace

std::string live_json(const std::vector<LiveSummary>& live) {
  nlohmann::ordered_json arr = nlohmann::ordered_json::array();
  for (const auto& l : live) {
    nlohmann::ordered_json j;
    j["level"] = l.level;
    j["users"] = l.users;
    j["sessions"] = l.sessions;
    j["errors"] = l.errors;
    j["routing_mismatches"] = l.routing_mismatches;
    j["checksum_mismatches"] = l.checksum_mismatches;
    j["routed"] = l.routed;
    j["gateway_latency_ms"] = l.gateway_latency_ms;
    j["paired"] = l.paired;
    j["ttft_delta_ms"] = l.ttft_delta_ms;
    j["balancer_counts"] = l.balancer_counts;
    j["orphaned"] = l.orphaned;
    arr.push_back(j);
  }
  return nlohmann::ordered_json{{"live", arr}}.dump(2) + "\n";
}

ExperimentReport run_experiment(const ExperimentConfig& cfg) {
  cfg.validate();
  const fs::path out = cfg.output_dir;
  fs::create_directories(out);
  write_file(out / "config.json", experiment_to_json(cfg));

  if (!fs::exists(cfg.pipeline)) {
    throw Error(ErrorCode::kLaunchFailure, "classifier artifact not found: " + cfg.pipeline);
  }
  std::shared_ptr<const clusterkit::ClusterPipeline> pipeline;
  CorpusBundle corpus;
  try {
    pipeline = std::make_shared<const clusterkit::ClusterPipeline>(
        clusterkit::ClusterPipeline::load(cfg.pipeline));
    corpus = ingest_corpus(cfg.corpus);
  } catch (const Error& e) {
    throw Error(ErrorCode::kLaunchFailure, e.what());
  }
  const Topology topology = build_topology(cfg, pipeline->k());
  const loadgen::PromptSource source(corpus);

  nlohmann::ordered_json artifacts;
  artifacts["pipeline"] = {{"path", cfg.pipeline}, {"crc32", crc32_file_hex(cfg.pipeline)}};
  artifacts["corpus"] = {{"path", cfg.corpus}, {"crc32", crc32_file_hex(cfg.corpus)}};
  auto& profiles = artifacts["profiles"];
  profiles = nlohmann::ordered_json::object();
  for (const auto& b : topology.backends) {
    profiles[b.name] = {{"path", b.profile_path}, {"crc32", crc32_file_hex(b.profile_path)}};
  }
  write_file(out / "artifacts.json", artifacts.dump(2) + "\n");

  ExperimentReport report;
  report.output_dir = out.string();
  const auto classify = [&](const std::string& text) { return pipeline->classify(text); };

  for (int level : cfg.concurrency_levels) {
    for (int rep = 0; rep < cfg.repeats; ++rep) {
      const std::string name = run_name(level, rep);
      try {
        CosimOptions o;
        o.users = level;
        o.workload = cfg.workload;
        o.seed = cfg.seed + static_cast<uint64_t>(rep);
        o.gateway_ns = cfg.virtual_gateway_ns;
        o.run_id = name;
        o.scenario = cfg.scenario;
        const auto sim = cosimulate(topology, classify, source, o);
        const auto dir = (out / "runs" / name).string();
        loadgen::write_run(sim.log, dir);
        report.run_dirs.push_back(dir);
      } catch (const Error& e) {
        report.failures.push_back("N=" + std::to_string(level) + " " + name + ": " + e.what());
      }
    }

    if (!cfg.live.enabled) continue;
    try {
      LiveParams p;
      p.users = std::min(level, cfg.live.max_users);
      p.workload = cfg.workload;
      p.workload.requests_per_user = cfg.live.requests_per_user;
      p.workload.max_tokens = cfg.live.max_tokens;
      p.seed = cfg.seed;
      p.time_scale = cfg.live.time_scale < 0 ? cfg.time_scale : cfg.live.time_scale;
      p.gateways = cfg.gateway_instances;
      p.control_round = cfg.live.control_round;
      p.run_id = "live-N" + std::to_string(level);
      p.scenario = cfg.scenario;
      p.dir = (out / "live" / ("N" + std::to_string(level))).string();
      const auto round = run_live(topology, pipeline, source, p);
      LiveSummary s;
      s.level = level;
      s.users = p.users;
      s.sessions = round.sessions;
      s.errors = round.errors;
      s.routing_mismatches = round.routing_mismatches;
      s.checksum_mismatches = round.checksum_mismatches;
      s.routed = round.routed;
      s.gateway_latency_ms = round.gateway_latency_ms;
      s.paired = round.paired;
      s.ttft_delta_ms = round.ttft_delta_ms;
      s.balancer_counts = round.balancer_counts;
      s.orphaned = round.orphaned;
      report.live.push_back(std::move(s));
    } catch (const Error& e) {
      report.failures.push_back("N=" + std::to_string(level) + " live: " + e.what());
    }
  }

  if (cfg.live.enabled) write_file(out / "live.json", live_json(report.live));
  write_file(out / "failures.json",
             nlohmann::ordered_json{{"failures", report.failures}}.dump(2) + "\n");
  report.summary = metricspipe::summarize(report.run_dirs, cfg.window_s, out.string());
  return report;
}

}  // namespace xrouter::benchctl
