#pragma once

#include <condition_variable>
#include <cstdint>
#include <deque>
#include <fstream>
#include <memory>
#include <mutex>
#include <string>
#include <thread>
#include <unordered_map>
#include <vector>

#include "xrouter/common/net.h"
#include "xrouter/simbackend/engine.h"

namespace xrouter::simbackend {

struct BackendOptions {
  ModelProfile profile;
  net::Endpoint listen{"127.0.0.1", 0};
  double time_scale = 1.0;  // wall seconds per virtual second
  uint64_t seed = 0;
  std::string event_log;     // diagnostic events CSV, empty to disable
  std::string sessions_log;  // per-session frame count / byte count / crc32
  bool record = false;       // keep arrivals and events in memory
};

/// Arrival as seen by the engine: the virtual clock when it was queued.
struct ArrivalRecord {
  std::string id;
  int64_t input_tokens = 0;
  int max_tokens = 0;
  int64_t arrival_ns = 0;
};

/// Per-session record of the bytes written downstream.
struct SessionDigest {
  std::string id;
  int64_t frames = 0;
  int64_t bytes = 0;
  uint32_t crc = 0;
};

/// Streaming wrapper around BatchEngine. A single driver thread owns the
/// engine and sleeps dt * time_scale per iteration; session threads hand
/// requests to it through an inbox and receive encoded frames back.
class BackendServer {
 public:
  explicit BackendServer(BackendOptions options);
  ~BackendServer();
  BackendServer(const BackendServer&) = delete;
  BackendServer& operator=(const BackendServer&) = delete;

  /// Binds the listener and starts the accept and driver threads.
  /// Throws Error(kIo) when the port cannot be bound.
  void start();
  /// Idempotent. Flushes the logs.
  void stop();

  net::Endpoint endpoint() const { return endpoint_; }

  /// While paused, requests accumulate and no iteration runs; on resume every
  /// waiting request is queued in arrival order at the same boundary.
  void pause();
  void resume();
  /// Number of requests waiting in the inbox (not yet seen by the engine).
  size_t pending() const;

  std::vector<ArrivalRecord> arrivals() const;
  std::vector<EngineEvent> events() const;
  std::vector<SessionDigest> sessions() const;

 private:
  struct Channel {
    std::mutex mu;
    std::condition_variable cv;
    std::deque<std::pair<std::string, bool>> frames;  // (bytes, terminal)
    bool closed = false;
  };
  struct Inbound {
    std::string id;
    int64_t input_tokens = 0;
    int max_tokens = 0;
    std::shared_ptr<Channel> channel;
  };

  void accept_loop();
  void drive();
  void serve_session(net::SessionGroup::Handle& handle);
  void deliver(const std::shared_ptr<Channel>& ch, std::string frame, bool terminal);
  void log_event(const EngineEvent& e);

  BackendOptions opts_;
  BatchEngine engine_;
  net::Listener listener_;
  net::Endpoint endpoint_;
  net::SessionGroup sessions_group_;
  std::thread accept_thread_;
  std::thread driver_thread_;

  mutable std::mutex mu_;
  std::condition_variable cv_;
  std::deque<Inbound> inbox_;
  bool paused_ = false;
  bool stop_ = false;
  bool started_ = false;

  // Driver-owned.
  std::unordered_map<std::string, std::shared_ptr<Channel>> live_;
  std::ofstream event_out_;

  mutable std::mutex record_mu_;
  std::vector<ArrivalRecord> arrivals_;
  std::vector<EngineEvent> events_;
  std::vector<SessionDigest> digests_;
};

}  // namespace xrouter::simbackend
