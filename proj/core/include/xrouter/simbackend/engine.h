#pragma once

#include <cstdint>
#include <deque>
#include <optional>
#include <string>
#include <unordered_set>
#include <vector>

#include "xrouter/common/rng.h"
#include "xrouter/simbackend/profile.h"

namespace xrouter::simbackend {

struct PendingRequest {
  std::string id;
  int64_t input_tokens = 0;
  int max_tokens = 0;
  int64_t arrival_ns = 0;
  int target_output = 0;  // drawn at queue time
  bool capped = false;
};

struct ActiveRequest {
  std::string id;
  int64_t input_tokens = 0;
  int target_output = 0;
  int emitted = 0;
  int64_t admitted_at = 0;
  int64_t kv_tokens_held = 0;
  bool capped = false;
};

enum class EventKind { kAdmit, kToken, kEnd, kReject };
enum class EndReason { kEos, kCap };

const char* to_string(EventKind kind);
const char* to_string(EndReason reason);

struct EngineEvent {
  EventKind kind = EventKind::kToken;
  std::string id;
  int token_index = -1;  // tok: 0-based index; end: total tokens emitted
  int64_t t_ns = 0;
  int batch_size = 0;
  EndReason reason = EndReason::kEos;

  bool operator==(const EngineEvent&) const = default;
};

/// In-flight batching state machine on a virtual clock. Requests queue FIFO
/// and join the running batch only at iteration boundaries, with KV-cache
/// space reserved for input plus the pre-sampled output length.
class BatchEngine {
 public:
  BatchEngine(ModelProfile profile, uint64_t seed);

  /// Queues a request arriving at virtual time `now_ns`. The output length is
  /// drawn here, capped at min(max_output_tokens, max_tokens).
  /// Throws Error(kDuplicateId) if the id is queued or running.
  void admit(std::string id, int64_t input_tokens, int max_tokens, int64_t now_ns);

  /// Runs one boundary: rejects requests that can never fit, admits from the
  /// queue head, then executes one iteration. Throws Error(kEmptyEngine).
  /// Returns no token events when nothing could run yet.
  std::vector<EngineEvent> step();

  /// Feeds a timestamped arrival trace (ascending arrival_ns) through a fresh
  /// sequence of steps: before each step every arrival at or before the
  /// upcoming boundary is queued. Returns all events in order.
  std::vector<EngineEvent> replay(const std::vector<PendingRequest>& trace);

  bool idle() const { return running_.empty() && queue_.empty(); }
  /// Virtual time at which the next step would begin its iteration.
  std::optional<int64_t> next_boundary() const;

  int64_t clock_ns() const { return clock_ns_; }
  int64_t kv_capacity_tokens() const { return kv_capacity_; }
  int64_t kv_used_tokens() const { return kv_used_; }
  int64_t kv_reserved_tokens() const { return kv_reserved_; }
  const std::vector<ActiveRequest>& running() const { return running_; }
  const std::deque<PendingRequest>& queue() const { return queue_; }
  const ModelProfile& profile() const { return profile_; }

 private:

  ModelProfile profile_;
  Rng rng_;
  int64_t clock_ns_ = 0;
  int64_t kv_capacity_ = 0;
  int64_t kv_used_ = 0;
  int64_t kv_reserved_ = 0;
  std::vector<ActiveRequest> running_;
  std::deque<PendingRequest> queue_;
  std::unordered_set<std::string> ids_;
};

}  // namespace xrouter::simbackend
