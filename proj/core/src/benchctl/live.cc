#include "xrouter/benchctl/live.h"

#include <algorithm>
#include <chrono>
#include <filesystem>
#include <map>
#include <thread>
#include <unordered_map>

#include "xrouter/common/error.h"
#include "xrouter/common/rng.h"
#include "xrouter/loadgen/run_load.h"
#include "xrouter/metricspipe/metrics.h"
#include "xrouter/routecore/gateway.h"
#include "xrouter/routecore/route_table.h"
#include "xrouter/simbackend/server.h"

namespace xrouter::benchctl {

namespace fs = std::filesystem;

namespace {

using Backends = std::vector<std::unique_ptr<simbackend::BackendServer>>;

Backends start_backends(const Topology& topology, const LiveParams& params,
                        const std::string& log_dir) {
  Backends out;
  for (size_t b = 0; b < topology.backends.size(); ++b) {
    simbackend::BackendOptions o;
    o.profile = topology.backends[b].profile;
    o.time_scale = params.time_scale;
    o.seed = mix_seed(params.seed, 1000 + b);
    o.record = true;
    if (!log_dir.empty()) {
      fs::create_directories(log_dir);
      o.event_log = (fs::path(log_dir) / (topology.backends[b].name + ".events.csv")).string();
      o.sessions_log = (fs::path(log_dir) / (topology.backends[b].name + ".sessions.csv")).string();
    }
    out.push_back(std::make_unique<simbackend::BackendServer>(o));
    try {
      out.back()->start();
    } catch (const Error& e) {
      throw Error(ErrorCode::kLaunchFailure, "backend " + topology.backends[b].name + ": " + e.what());
    }
  }
  return out;
}

bool has_ttft(const loadgen::SessionRecord& r) { return r.ok() && !r.stamps.empty(); }

}  // namespace

bool port_open(const net::Endpoint& endpoint) {
  try {
    net::dial(endpoint, std::chrono::milliseconds(200));
    return true;
  } catch (const Error&) {
    return false;
  }
}

LiveRound run_live(const Topology& topology,
                   std::shared_ptr<const clusterkit::ClusterPipeline> pipeline,
                   const loadgen::PromptSource& source, const LiveParams& params) {
  if (params.gateways < 1) throw Error(ErrorCode::kInvalidArgument, "gateways must be >= 1");
  const std::string dir = params.dir;
  auto sub = [&](const char* name) { return dir.empty() ? std::string() : (fs::path(dir) / name).string(); };

  LiveRound round;
  std::vector<net::Endpoint> listeners;

  // Via round.
  std::unordered_map<std::string, size_t> served;  // request id -> backend index
  std::unordered_map<std::string, uint32_t> backend_crc;
  {
    Backends backends = start_backends(topology, params, sub("backends"));
    std::map<int, std::vector<net::Endpoint>> entries;
    for (const auto& [cluster, idx] : topology.routes) {
      for (size_t b : idx) entries[cluster].push_back(backends[b]->endpoint());
    }
    auto routes = std::make_shared<const routecore::RouteTable>(entries);

    std::vector<std::unique_ptr<routecore::Gateway>> gateways;
    std::vector<net::Endpoint> gateway_eps;
    for (int g = 0; g < params.gateways; ++g) {
      gateways.push_back(std::make_unique<routecore::Gateway>(pipeline, routes, routecore::GatewayOptions{}));
      try {
        gateways.back()->start();
      } catch (const Error& e) {
        throw Error(ErrorCode::kLaunchFailure, std::string("gateway: ") + e.what());
      }
      gateway_eps.push_back(gateways.back()->endpoint());
    }
    routecore::Balancer balancer(gateway_eps);
    try {
      balancer.start();
    } catch (const Error& e) {
      throw Error(ErrorCode::kLaunchFailure, std::string("balancer: ") + e.what());
    }

    loadgen::LoadOptions lo;
    lo.run_id = params.run_id;
    lo.scenario = params.scenario;
    round.via = loadgen::run_load(balancer.endpoint(), params.users, params.workload, source,
                                  params.seed, lo);
    round.balancer_counts = balancer.counts();
    std::vector<double> routing_ms;
    for (const auto& g : gateways) {
      for (int64_t ns : g->routing_latencies_ns()) routing_ms.push_back(static_cast<double>(ns) / 1e6);
    }
    round.routed = static_cast<int64_t>(routing_ms.size());
    if (!routing_ms.empty()) round.gateway_latency_ms = metricspipe::percentile(routing_ms, 50.0);

    listeners.push_back(balancer.endpoint());
    balancer.stop();
    for (auto& g : gateways) {
      listeners.push_back(g->endpoint());
      g->stop();
    }
    for (size_t b = 0; b < backends.size(); ++b) {
      listeners.push_back(backends[b]->endpoint());
      backends[b]->stop();
      for (const auto& d : backends[b]->sessions()) {
        served[d.id] = b;
        backend_crc[d.id] = d.crc;
      }
    }
  }

  // Cross-checks against the prompts the users actually sent.
  std::unordered_map<std::string, std::string> prompts;
  for (int u = 0; u < params.users; ++u) {
    for (auto& p : loadgen::plan_user(params.workload, source, params.seed, u)) {
      prompts[p.request_id] = std::move(p.prompt);
    }
  }
  for (const auto& r : round.via.records) {
    ++round.sessions;
    if (!r.ok()) ++round.errors;
    const auto it = served.find(r.request_id);
    if (it == served.end()) {
      round.served_by.emplace_back();
      ++round.routing_mismatches;
      continue;
    }
    round.served_by.push_back(topology.backends[it->second].name);
    const auto route = topology.routes.find(pipeline->classify(prompts.at(r.request_id)));
    if (route == topology.routes.end() ||
        std::find(route->second.begin(), route->second.end(), it->second) == route->second.end()) {
      ++round.routing_mismatches;
    }
    if (backend_crc.at(r.request_id) != r.crc) ++round.checksum_mismatches;
  }
  if (!dir.empty()) loadgen::write_run(round.via, sub("via"));

  // Control round: same requests, fresh backends, no gateway.
  if (params.control_round) {
    Backends backends = start_backends(topology, params, "");
    round.direct = round.via;
    round.direct.run_id = params.run_id + "-direct";
    round.direct.records.clear();

    std::vector<std::vector<loadgen::SessionRecord>> per_user(static_cast<size_t>(params.users));
    const auto epoch = std::chrono::steady_clock::now();
    const std::function<int64_t()> now = [epoch] {
      return std::chrono::duration_cast<std::chrono::nanoseconds>(std::chrono::steady_clock::now() - epoch)
          .count();
    };
    loadgen::LoadOptions lo;
    {
      std::vector<std::jthread> threads;
      for (int u = 0; u < params.users; ++u) {
        threads.emplace_back([&, u] {
          for (const auto& plan : loadgen::plan_user(params.workload, source, params.seed, u)) {
            const auto it = served.find(plan.request_id);
            if (it == served.end()) continue;
            per_user[u].push_back(loadgen::stream_request(backends[it->second]->endpoint(), plan,
                                                          params.workload.max_tokens, now, lo));
          }
        });
      }
    }
    for (auto& records : per_user) {
      for (auto& r : records) round.direct.records.push_back(std::move(r));
    }
    for (auto& b : backends) {
      listeners.push_back(b->endpoint());
      b->stop();
    }
    if (!dir.empty()) loadgen::write_run(round.direct, sub("direct"));

    std::unordered_map<std::string, double> direct_ttft;
    for (const auto& r : round.direct.records) {
      if (has_ttft(r)) direct_ttft[r.request_id] = metricspipe::ttft(r);
    }
    std::vector<double> diffs;
    for (const auto& r : round.via.records) {
      const auto it = direct_ttft.find(r.request_id);
      if (it != direct_ttft.end() && has_ttft(r)) diffs.push_back(metricspipe::ttft(r) - it->second);
    }
    round.paired = static_cast<int64_t>(diffs.size());
    if (!diffs.empty()) round.ttft_delta_ms = metricspipe::percentile(diffs, 50.0) * 1e3;
  }

  for (const auto& ep : listeners) {
    if (port_open(ep)) round.orphaned.push_back(ep.str());
  }
  return round;
}

}  // namespace xrouter::benchctl
