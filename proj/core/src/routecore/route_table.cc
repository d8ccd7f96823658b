#include "xrouter/routecore/route_table.h"

#include <charconv>
#include <fstream>
#include <sstream>

#include "json.hpp"
#include "xrouter/common/error.h"

namespace xrouter::routecore {

RouteTable::RouteTable(std::map<int, std::vector<net::Endpoint>> entries)
    : entries_(std::move(entries)) {
  for (const auto& [cluster, eps] : entries_) {
    if (eps.empty()) {
      throw Error(ErrorCode::kInvalidArgument,
                  "cluster " + std::to_string(cluster) + " has no endpoints");
    }
    cursors_.emplace(cluster, std::make_unique<std::atomic<uint64_t>>(0));
  }
}

RouteTable RouteTable::parse(const std::string& json_text) {
  std::map<int, std::vector<net::Endpoint>> entries;
  try {
    const auto j = nlohmann::json::parse(json_text);
    for (const auto& [key, list] : j.at("clusters").items()) {
      int cluster = -1;
      const auto [ptr, ec] = std::from_chars(key.data(), key.data() + key.size(), cluster);
      if (ec != std::errc() || ptr != key.data() + key.size() || cluster < 0) {
        throw Error(ErrorCode::kParse, "route table: bad cluster id '" + key + "'");
      }
      auto& eps = entries[cluster];
      for (const auto& ep : list) eps.push_back(net::Endpoint::parse(ep.get<std::string>()));
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kParse, std::string("route table: ") + e.what());
  } catch (const Error& e) {
    if (e.code() == ErrorCode::kParse) throw;
    throw Error(ErrorCode::kParse, std::string("route table: ") + e.what());
  }
  try {
    return RouteTable(std::move(entries));
  } catch (const Error& e) {
    throw Error(ErrorCode::kParse, std::string("route table: ") + e.what());
  }
}

RouteTable RouteTable::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIo, "cannot open route table " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return parse(buf.str());
}

std::string RouteTable::to_json() const {
  nlohmann::ordered_json clusters = nlohmann::ordered_json::object();
  for (const auto& [cluster, eps] : entries_) {
    auto& list = clusters[std::to_string(cluster)];
    list = nlohmann::ordered_json::array();
    for (const auto& ep : eps) list.push_back(ep.str());
  }
  nlohmann::ordered_json j;
  j["clusters"] = clusters;
  return j.dump(2);
}

const net::Endpoint& RouteTable::lookup(int cluster) const {
  const auto it = entries_.find(cluster);
  if (it == entries_.end()) {
    throw Error(ErrorCode::kUnknownCluster, "no route for cluster " + std::to_string(cluster));
  }
  const auto& eps = it->second;
  if (eps.size() == 1) return eps.front();
  const uint64_t n = cursors_.at(cluster)->fetch_add(1, std::memory_order_relaxed);
  return eps[n % eps.size()];
}

void RouteTable::require_coverage(int k) const {
  for (int c = 0; c < k; ++c) {
    if (!entries_.contains(c)) {
      throw Error(ErrorCode::kInvalidArgument,
                  "route table has no entry for cluster " + std::to_string(c));
    }
  }
}

size_t BalancerState::next_index() {
  if (upstreams_.empty()) throw Error(ErrorCode::kNoUpstreams, "balancer has no upstreams");
  return counter_.fetch_add(1, std::memory_order_relaxed) % upstreams_.size();
}

const net::Endpoint& BalancerState::next() { return upstreams_[next_index()]; }

}  // namespace xrouter::routecore
