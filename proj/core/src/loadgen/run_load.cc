#include "xrouter/loadgen/run_load.h"

#include <atomic>
#include <thread>

#include "xrouter/common/checksum.h"
#include "xrouter/common/error.h"
#include "xrouter/common/wire.h"

namespace xrouter::loadgen {

namespace {

int64_t steady_ns() {
  return std::chrono::duration_cast<std::chrono::nanoseconds>(
             std::chrono::steady_clock::now().time_since_epoch())
      .count();
}

}  // namespace

SessionRecord stream_request(const net::Endpoint& target, const RequestPlan& plan,
                             int max_tokens, const std::function<int64_t()>& now, const LoadOptions& options) {
  SessionRecord r;
  r.user_id = plan.user;
  r.request_id = plan.request_id;
  r.category = plan.category;
  r.input_tokens = plan.input_tokens;

  auto fail = [&](std::string code) {
    r.end_reason = "error";
    r.error_code = std::move(code);
    r.t_end_ns = std::max(now(), r.stamps.empty() ? r.t_send_ns : r.stamps.back());
    return r;
  };

  r.t_send_ns = now();
  net::Socket sock;
  try {
    sock = net::dial(target, options.connect_timeout);
  } catch (const Error&) {
    return fail("connect");
  }
  sock.set_recv_timeout(options.read_timeout);
  if (!sock.write_all(wire::encode(wire::make_req(plan.request_id, plan.prompt, max_tokens)))) {
    return fail("write");
  }
  net::LineReader reader(sock);
  while (true) {
    auto line = reader.read_line();
    // Stamps are strictly increasing even if two frames land within one tick.
    int64_t t = now();
    const int64_t floor = r.stamps.empty() ? r.t_send_ns : r.stamps.back();
    if (t <= floor) t = floor + 1;
    if (!line) return fail("disconnected");
    r.frames += 1;
    r.bytes += static_cast<int64_t>(line->size());
    r.crc = crc32(*line, r.crc);
    wire::Frame f;
    try {
      f = wire::decode(*line);
    } catch (const Error&) {
      return fail("malformed");
    }
    switch (f.type) {
      case wire::FrameType::kTok:
        r.stamps.push_back(t);
        break;
      case wire::FrameType::kEnd:
        r.t_end_ns = t;
        r.end_reason = f.reason;
        return r;
      case wire::FrameType::kErr:
        return fail(f.code);
      default:
        return fail("unexpected");
    }
  }
}

TokenEventLog run_load(const net::Endpoint& target, int users, const WorkloadSpec& spec,
                       const PromptSource& source, uint64_t seed, const LoadOptions& options) {
  spec.validate();
  if (users < 1) throw Error(ErrorCode::kInvalidArgument, "users must be >= 1");

  std::vector<std::vector<RequestPlan>> plans(static_cast<size_t>(users));
  for (int u = 0; u < users; ++u) plans[u] = plan_user(spec, source, seed, u);
  const int64_t total = static_cast<int64_t>(users) * spec.requests_per_user;

  const int64_t epoch = steady_ns();
  const std::function<int64_t()> now = [epoch] { return steady_ns() - epoch; };

  std::vector<std::vector<SessionRecord>> per_user(static_cast<size_t>(users));
  std::atomic<int64_t> errors{0};
  std::atomic<bool> aborted{false};
  const auto wall_start = std::chrono::steady_clock::now();
  {
    std::vector<std::jthread> threads;
    threads.reserve(static_cast<size_t>(users));
    for (int u = 0; u < users; ++u) {
      threads.emplace_back([&, u] {
        for (const auto& plan : plans[u]) {
          if (aborted) return;
          auto rec = stream_request(target, plan, spec.max_tokens, now, options);
          if (!rec.ok() && 2 * (errors.fetch_add(1) + 1) > total) aborted = true;
          per_user[u].push_back(std::move(rec));
        }
      });
    }
  }
  if (aborted) {
    throw Error(ErrorCode::kRunAborted,
                std::to_string(errors.load()) + " of " + std::to_string(total) +
                    " requests failed");
  }

  TokenEventLog log;
  log.run_id = options.run_id;
  log.scenario = options.scenario;
  log.concurrency = users;
  log.seed = seed;
  log.epoch_ns = epoch;
  log.wall_duration_s =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - wall_start).count();
  log.workload_json = workload_to_json(spec);
  for (auto& recs : per_user) {
    for (auto& r : recs) log.records.push_back(std::move(r));
  }
  return log;
}

}  // namespace xrouter::loadgen
