#include "xrouter/simbackend/engine.h"

#include <algorithm>
#include <utility>

#include "xrouter/common/error.h"

namespace xrouter::simbackend {

const char* to_string(EventKind kind) {
  switch (kind) {
    case EventKind::kAdmit: return "admit";
    case EventKind::kToken: return "tok";
    case EventKind::kEnd: return "end";
    case EventKind::kReject: return "reject";
  }
  return "?";
}

const char* to_string(EndReason reason) { return reason == EndReason::kCap ? "cap" : "eos"; }

BatchEngine::BatchEngine(ModelProfile profile, uint64_t seed)
    : profile_(std::move(profile)), rng_(seed) {
  profile_.validate();
  kv_capacity_ = profile_.kv_capacity_tokens();
}

void BatchEngine::admit(std::string id, int64_t input_tokens, int max_tokens, int64_t now_ns) {
  if (ids_.contains(id)) throw Error(ErrorCode::kDuplicateId, "duplicate request id '" + id + "'");
  if (input_tokens < 0) throw Error(ErrorCode::kInvalidArgument, "negative input_tokens");
  const int cap = std::min(profile_.max_output_tokens, std::max(max_tokens, 1));
  const OutputDraw d = draw_output_length(rng_, profile_, cap);
  ids_.insert(id);
  queue_.push_back({std::move(id), input_tokens, max_tokens, now_ns, d.length, d.capped});
}

std::optional<int64_t> BatchEngine::next_boundary() const {
  if (!running_.empty()) return clock_ns_;
  if (queue_.empty()) return std::nullopt;
  return std::max(clock_ns_, queue_.front().arrival_ns);
}

std::vector<EngineEvent> BatchEngine::step() {
  if (idle()) throw Error(ErrorCode::kEmptyEngine, "step on an empty engine");
  if (running_.empty()) clock_ns_ = std::max(clock_ns_, queue_.front().arrival_ns);

  std::vector<EngineEvent> events;
  const int64_t boundary = clock_ns_;

  // Requests whose reservation exceeds the whole cache can never run.
  for (size_t i = 0; i < queue_.size();) {
    const auto& q = queue_[i];
    if (q.arrival_ns <= boundary && q.input_tokens + q.target_output > kv_capacity_) {
      events.push_back({EventKind::kReject, q.id, -1, boundary,
                        static_cast<int>(running_.size()), EndReason::kEos});
      ids_.erase(q.id);
      queue_.erase(queue_.begin() + static_cast<std::ptrdiff_t>(i));
    } else {
      ++i;
    }
  }

  int64_t joining_tokens = 0;
  bool joined = false;
  while (!queue_.empty()) {
    const auto& q = queue_.front();
    const int64_t need = q.input_tokens + q.target_output;
    if (q.arrival_ns > boundary) break;
    if (static_cast<int>(running_.size()) >= profile_.max_batch) break;
    if (kv_reserved_ + need > kv_capacity_) break;
    ActiveRequest a;
    a.id = q.id;
    a.input_tokens = q.input_tokens;
    a.target_output = q.target_output;
    a.admitted_at = boundary;
    a.kv_tokens_held = q.input_tokens;
    a.capped = q.capped;
    kv_reserved_ += need;
    kv_used_ += a.kv_tokens_held;
    joining_tokens += a.input_tokens;
    joined = true;
    running_.push_back(std::move(a));
    queue_.pop_front();
    events.push_back({EventKind::kAdmit, running_.back().id, -1, boundary,
                      static_cast<int>(running_.size()), EndReason::kEos});
  }
  if (running_.empty()) return events;

  const int batch = static_cast<int>(running_.size());
  for (auto& e : events) {
    if (e.kind == EventKind::kAdmit) e.batch_size = batch;
  }
  clock_ns_ += iteration_time(profile_, batch,
                              joined ? std::optional<int64_t>(joining_tokens) : std::nullopt);

  for (auto& a : running_) {
    events.push_back({EventKind::kToken, a.id, a.emitted, clock_ns_, batch, EndReason::kEos});
    ++a.emitted;
    ++a.kv_tokens_held;
    ++kv_used_;
  }
  std::vector<ActiveRequest> still;
  still.reserve(running_.size());
  for (auto& a : running_) {
    if (a.emitted < a.target_output) {
      still.push_back(std::move(a));
      continue;
    }
    events.push_back({EventKind::kEnd, a.id, a.emitted, clock_ns_, batch,
                      a.capped ? EndReason::kCap : EndReason::kEos});
    kv_used_ -= a.kv_tokens_held;
    kv_reserved_ -= a.input_tokens + a.target_output;
    ids_.erase(a.id);
  }
  running_ = std::move(still);
  return events;
}

std::vector<EngineEvent> BatchEngine::replay(const std::vector<PendingRequest>& trace) {
  std::vector<EngineEvent> out;
  size_t next = 0;
  while (next < trace.size() || !idle()) {
    int64_t boundary = clock_ns_;
    if (idle()) boundary = std::max(boundary, trace[next].arrival_ns);
    while (next < trace.size() && trace[next].arrival_ns <= boundary) {
      const auto& r = trace[next++];
      admit(r.id, r.input_tokens, r.max_tokens, r.arrival_ns);
    }
    auto events = step();
    out.insert(out.end(), std::make_move_iterator(events.begin()),
               std::make_move_iterator(events.end()));
  }
  return out;
}

}  // namespace xrouter::simbackend
