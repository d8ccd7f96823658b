#include "xrouter/benchctl/cosim.h"

#include <limits>
#include <map>
#include <queue>
#include <unordered_map>

#include "xrouter/common/error.h"
#include "xrouter/common/rng.h"
#include "xrouter/common/wire.h"
#include "xrouter/simbackend/engine.h"

namespace xrouter::benchctl {

CosimResult cosimulate(const Topology& topology,
                       const std::function<int(const std::string&)>& classify,
                       const loadgen::PromptSource& source, const CosimOptions& options) {
  options.workload.validate();
  if (options.users < 1) throw Error(ErrorCode::kInvalidArgument, "users must be >= 1");
  if (topology.backends.empty()) throw Error(ErrorCode::kInvalidArgument, "no backends");

  std::vector<simbackend::BatchEngine> engines;
  for (size_t b = 0; b < topology.backends.size(); ++b) {
    engines.emplace_back(topology.backends[b].profile, mix_seed(options.seed, 1000 + b));
  }
  std::map<int, size_t> rr;

  struct Slot {
    size_t user;
    size_t seq;
  };
  std::vector<std::vector<loadgen::RequestPlan>> plans(static_cast<size_t>(options.users));
  std::vector<std::vector<loadgen::SessionRecord>> records(plans.size());
  std::vector<std::vector<int>> clusters(plans.size());
  std::unordered_map<std::string, Slot> by_id;
  for (int u = 0; u < options.users; ++u) {
    plans[u] = loadgen::plan_user(options.workload, source, options.seed, u);
  }

  CosimResult result;
  result.served.resize(engines.size());

  using Send = std::pair<int64_t, size_t>;  // (time, user)
  std::priority_queue<Send, std::vector<Send>, std::greater<>> sends;
  for (size_t u = 0; u < plans.size(); ++u) sends.push({0, u});

  constexpr int64_t kNever = std::numeric_limits<int64_t>::max();
  while (true) {
    const int64_t t_send = sends.empty() ? kNever : sends.top().first;
    int64_t t_engine = kNever;
    size_t which = 0;
    for (size_t b = 0; b < engines.size(); ++b) {
      const auto nb = engines[b].next_boundary();
      if (nb && *nb < t_engine) {
        t_engine = *nb;
        which = b;
      }
    }
    if (t_send == kNever && t_engine == kNever) break;

    if (t_send <= t_engine) {
      const auto [t, u] = sends.top();
      sends.pop();
      const size_t seq = records[u].size();
      const auto& plan = plans[u][seq];
      loadgen::SessionRecord rec;
      rec.user_id = static_cast<int>(u);
      rec.request_id = plan.request_id;
      rec.category = plan.category;
      rec.input_tokens = plan.input_tokens;
      rec.t_send_ns = t;
      const int cluster = classify(plan.prompt);
      const auto route = topology.routes.find(cluster);
      if (route == topology.routes.end()) {
        throw Error(ErrorCode::kUnknownCluster, "no route for cluster " + std::to_string(cluster));
      }
      const size_t b = route->second[rr[cluster]++ % route->second.size()];
      engines[b].admit(plan.request_id, wire::count_words(plan.prompt),
                       options.workload.max_tokens, t + options.gateway_ns);
      result.served[b].push_back(plan.request_id);
      records[u].push_back(std::move(rec));
      clusters[u].push_back(cluster);
      by_id[plan.request_id] = {u, seq};
      continue;
    }

    for (const auto& e : engines[which].step()) {
      if (e.kind == simbackend::EventKind::kAdmit) continue;
      const auto slot = by_id.at(e.id);
      auto& rec = records[slot.user][slot.seq];
      if (e.kind == simbackend::EventKind::kToken) {
        rec.stamps.push_back(e.t_ns);
        continue;
      }
      rec.t_end_ns = e.t_ns;
      if (e.kind == simbackend::EventKind::kEnd) {
        rec.end_reason = simbackend::to_string(e.reason);
      } else {
        rec.end_reason = "error";
        rec.error_code = "kv_overflow";
      }
      if (slot.seq + 1 < plans[slot.user].size()) sends.push({e.t_ns, slot.user});
    }
  }

  auto& log = result.log;
  log.run_id = options.run_id;
  log.scenario = options.scenario;
  log.clock = "virtual";
  log.concurrency = options.users;
  log.seed = options.seed;
  log.workload_json = loadgen::workload_to_json(options.workload);
  for (size_t u = 0; u < records.size(); ++u) {
    for (size_t i = 0; i < records[u].size(); ++i) {
      log.records.push_back(std::move(records[u][i]));
      result.clusters.push_back(clusters[u][i]);
    }
  }
  return result;
}

}  // namespace xrouter::benchctl
