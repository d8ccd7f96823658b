#pragma once

#include <atomic>
#include <chrono>
#include <cstdint>
#include <memory>
#include <mutex>
#include <functional>
#include <string>
#include <thread>
#include <vector>

#include "xrouter/clusterkit/pipeline.h"
#include "xrouter/common/net.h"
#include "xrouter/routecore/route_table.h"

namespace xrouter::routecore {

struct GatewayOptions {
  net::Endpoint listen{"127.0.0.1", 0};
  size_t max_sessions = 2048;
  std::chrono::seconds idle_timeout{30};
};

/// Classifying reverse proxy. Each connection carries one `req`; the gateway
/// classifies the prompt, forwards the request with "cluster" added to the
/// routed backend, and relays the reply stream frame by frame.
class Gateway {
 public:
  Gateway(std::shared_ptr<const clusterkit::ClusterPipeline> pipeline,
          std::shared_ptr<const RouteTable> routes, GatewayOptions options);
  ~Gateway();
  Gateway(const Gateway&) = delete;
  Gateway& operator=(const Gateway&) = delete;

  void start();
  void stop();
  net::Endpoint endpoint() const { return endpoint_; }
  uint64_t sessions_started() const { return started_sessions_.load(); }
  /// Per forwarded request: wall time from the request line being read to
  /// the routed request being written upstream (decode, classify, dial).
  std::vector<int64_t> routing_latencies_ns() const;

  /// Serves one downstream connection to completion on the calling thread.
  /// `adopt` takes ownership of the upstream socket (so a shutdown can reach it).
  void handle_session(net::Socket& downstream,
                      const std::function<net::Socket&(net::Socket)>& adopt) const;

 private:
  void accept_loop();

  std::shared_ptr<const clusterkit::ClusterPipeline> pipeline_;
  std::shared_ptr<const RouteTable> routes_;
  GatewayOptions opts_;
  net::Listener listener_;
  net::Endpoint endpoint_;
  net::SessionGroup sessions_;
  std::thread accept_thread_;
  std::atomic<bool> stop_{false};
  bool running_ = false;
  std::atomic<size_t> active_{0};
  std::atomic<uint64_t> started_sessions_{0};
  mutable std::mutex latency_mu_;
  mutable std::vector<int64_t> routing_ns_;
};

/// TCP-level round-robin front for a set of gateways. Bytes are piped in both
/// directions without inspection.
class Balancer {
 public:
  explicit Balancer(std::vector<net::Endpoint> upstreams,
                    net::Endpoint listen = {"127.0.0.1", 0});
  ~Balancer();
  Balancer(const Balancer&) = delete;
  Balancer& operator=(const Balancer&) = delete;

  void start();
  void stop();
  net::Endpoint endpoint() const { return endpoint_; }
  /// Connections assigned to each upstream so far.
  std::vector<uint64_t> counts() const;

 private:
  void accept_loop();
  void pipe(net::SessionGroup::Handle& handle, size_t upstream);

  BalancerState state_;
  net::Endpoint listen_;
  net::Listener listener_;
  net::Endpoint endpoint_;
  net::SessionGroup sessions_;
  std::thread accept_thread_;
  std::atomic<bool> stop_{false};
  bool running_ = false;
  std::unique_ptr<std::atomic<uint64_t>[]> counts_;
};

}  // namespace xrouter::routecore
