#pragma once

#include <atomic>
#include <cstdint>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "xrouter/common/net.h"

namespace xrouter::routecore {

/// Cluster id to backend endpoints, with an independent round-robin cursor per
/// cluster. Lookups are safe from any number of threads.
class RouteTable {
 public:
  RouteTable() = default;
  explicit RouteTable(std::map<int, std::vector<net::Endpoint>> entries);

  /// Parses {"clusters": {"0": ["h:p", ...], ...}}. Throws Error(kParse).
  static RouteTable parse(const std::string& json_text);
  static RouteTable load(const std::string& path);
  std::string to_json() const;

  /// Next endpoint for `cluster` in per-cluster round-robin order.
  /// Throws Error(kUnknownCluster).
  const net::Endpoint& lookup(int cluster) const;

  /// Throws Error(kInvalidArgument) unless every id in [0, k) has an entry.
  void require_coverage(int k) const;

  const std::map<int, std::vector<net::Endpoint>>& entries() const { return entries_; }

 private:
  std::map<int, std::vector<net::Endpoint>> entries_;
  std::map<int, std::unique_ptr<std::atomic<uint64_t>>> cursors_;
};

/// Connection-level round robin over gateway endpoints.
class BalancerState {
 public:
  explicit BalancerState(std::vector<net::Endpoint> upstreams)
      : upstreams_(std::move(upstreams)) {}

  /// Throws Error(kNoUpstreams) when the list is empty.
  const net::Endpoint& next();
  size_t next_index();

  const std::vector<net::Endpoint>& upstreams() const { return upstreams_; }

 private:
  std::vector<net::Endpoint> upstreams_;
  std::atomic<uint64_t> counter_{0};
};

}  // namespace xrouter::routecore
