#include "xrouter/simbackend/server.h"

#include <chrono>
#include <tuple>
#include <utility>

#include "xrouter/common/checksum.h"
#include "xrouter/common/error.h"
#include "xrouter/common/wire.h"

namespace xrouter::simbackend {

namespace {

wire::Frame to_frame(const EngineEvent& e) {
  switch (e.kind) {
    case EventKind::kToken:
      return wire::make_tok(e.id, e.token_index, "t" + std::to_string(e.token_index), e.t_ns);
    case EventKind::kEnd:
      return wire::make_end(e.id, e.token_index, to_string(e.reason));
    default:
      return wire::make_err(e.id, wire::errc::kKvOverflow,
                            "request does not fit in the KV cache");
  }
}

}  // namespace

BackendServer::BackendServer(BackendOptions options)
    : opts_(std::move(options)), engine_(opts_.profile, opts_.seed) {
  if (!(opts_.time_scale > 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "time_scale must be > 0");
  }
}

BackendServer::~BackendServer() { stop(); }

void BackendServer::start() {
  if (started_) return;
  if (!opts_.event_log.empty()) {
    event_out_.open(opts_.event_log, std::ios::trunc);
    if (!event_out_) throw Error(ErrorCode::kIo, "cannot write " + opts_.event_log);
    event_out_ << "request_id,event,token_index,virtual_t_ns,batch_size_at_event\n";
  }
  listener_ = net::Listener::bind(opts_.listen);
  endpoint_ = listener_.endpoint();
  started_ = true;
  driver_thread_ = std::thread([this] { drive(); });
  accept_thread_ = std::thread([this] { accept_loop(); });
}

void BackendServer::stop() {
  {
    std::lock_guard lock(mu_);
    if (!started_ || stop_) return;
    stop_ = true;
  }
  cv_.notify_all();
  if (accept_thread_.joinable()) accept_thread_.join();
  listener_.close();
  if (driver_thread_.joinable()) driver_thread_.join();
  for (auto& [_, ch] : live_) {
    std::lock_guard lock(ch->mu);
    ch->closed = true;
    ch->cv.notify_all();
  }
  {
    std::lock_guard lock(mu_);
    for (auto& in : inbox_) {
      std::lock_guard cl(in.channel->mu);
      in.channel->closed = true;
      in.channel->cv.notify_all();
    }
  }
  sessions_group_.stop();
  if (event_out_.is_open()) event_out_.close();
  if (!opts_.sessions_log.empty()) {
    std::ofstream out(opts_.sessions_log, std::ios::trunc);
    out << "request_id,frames,bytes,crc32\n";
    std::lock_guard lock(record_mu_);
    for (const auto& d : digests_) {
      out << d.id << ',' << d.frames << ',' << d.bytes << ',' << d.crc << '\n';
    }
  }
}

void BackendServer::pause() {
  std::lock_guard lock(mu_);
  paused_ = true;
}

void BackendServer::resume() {
  {
    std::lock_guard lock(mu_);
    paused_ = false;
  }
  cv_.notify_all();
}

size_t BackendServer::pending() const {
  std::lock_guard lock(mu_);
  return inbox_.size();
}

std::vector<ArrivalRecord> BackendServer::arrivals() const {
  std::lock_guard lock(record_mu_);
  return arrivals_;
}

std::vector<EngineEvent> BackendServer::events() const {
  std::lock_guard lock(record_mu_);
  return events_;
}

std::vector<SessionDigest> BackendServer::sessions() const {
  std::lock_guard lock(record_mu_);
  return digests_;
}

void BackendServer::accept_loop() {
  using namespace std::chrono_literals;
  while (true) {
    {
      std::lock_guard lock(mu_);
      if (stop_) return;
    }
    auto sock = listener_.accept(50ms);
    if (!sock) continue;
    sessions_group_.spawn(std::move(*sock),
                          [this](net::SessionGroup::Handle& h) { serve_session(h); });
  }
}

void BackendServer::serve_session(net::SessionGroup::Handle& handle) {
  auto& down = handle.downstream();
  net::LineReader reader(down);
  auto line = reader.read_line();
  if (!line) return;

  SessionDigest digest;
  auto send = [&](const std::string& bytes) {
    digest.frames += 1;
    digest.bytes += static_cast<int64_t>(bytes.size());
    digest.crc = crc32(bytes, digest.crc);
    return down.write_all(bytes);
  };

  wire::Frame req;
  try {
    req = wire::decode(*line);
    if (req.type != wire::FrameType::kReq) {
      throw Error(ErrorCode::kMalformedFrame, "expected a req frame");
    }
  } catch (const Error& e) {
    send(wire::encode(wire::make_err(req.id, wire::errc::kBadRequest, e.what())));
    return;
  }
  digest.id = req.id;

  auto ch = std::make_shared<Channel>();
  {
    std::lock_guard lock(mu_);
    if (stop_) return;
    inbox_.push_back({req.id, wire::count_words(req.prompt),
                      static_cast<int>(std::min<int64_t>(req.max_tokens, 1 << 30)), ch});
  }
  cv_.notify_all();

  while (true) {
    std::string frame;
    bool terminal = false;
    {
      std::unique_lock lock(ch->mu);
      ch->cv.wait(lock, [&] { return ch->closed || !ch->frames.empty(); });
      if (ch->frames.empty()) break;
      std::tie(frame, terminal) = std::move(ch->frames.front());
      ch->frames.pop_front();
    }
    if (!send(frame) || terminal) break;
  }
  std::lock_guard lock(record_mu_);
  digests_.push_back(std::move(digest));
}

void BackendServer::deliver(const std::shared_ptr<Channel>& ch, std::string frame,
                            bool terminal) {
  std::lock_guard lock(ch->mu);
  ch->frames.emplace_back(std::move(frame), terminal);
  if (terminal) ch->closed = true;
  ch->cv.notify_all();
}

void BackendServer::log_event(const EngineEvent& e) {
  if (event_out_.is_open()) {
    event_out_ << e.id << ',' << to_string(e.kind) << ',' << e.token_index << ',' << e.t_ns
               << ',' << e.batch_size << '\n';
  }
  if (opts_.record) {
    std::lock_guard lock(record_mu_);
    events_.push_back(e);
  }
}

void BackendServer::drive() {
  using clock = std::chrono::steady_clock;
  clock::time_point deadline = clock::now();
  while (true) {
    std::deque<Inbound> batch;
    {
      std::unique_lock lock(mu_);
      cv_.wait(lock, [&] {
        return stop_ || (!paused_ && (!inbox_.empty() || !engine_.idle()));
      });
      if (stop_) return;
      batch.swap(inbox_);
    }
    if (engine_.idle()) deadline = clock::now();
    for (auto& in : batch) {
      if (live_.contains(in.id)) {
        deliver(in.channel,
                wire::encode(wire::make_err(in.id, wire::errc::kBadRequest, "duplicate request id")),
                true);
        continue;
      }
      engine_.admit(in.id, in.input_tokens, in.max_tokens, engine_.clock_ns());
      if (opts_.record) {
        std::lock_guard lock(record_mu_);
        arrivals_.push_back({in.id, in.input_tokens, in.max_tokens, engine_.clock_ns()});
      }
      live_.emplace(in.id, std::move(in.channel));
    }
    if (engine_.idle()) continue;

    const int64_t before = engine_.clock_ns();
    auto events = engine_.step();
    const double wall_ns = static_cast<double>(engine_.clock_ns() - before) * opts_.time_scale;
    deadline += std::chrono::nanoseconds(static_cast<int64_t>(wall_ns));
    {
      std::unique_lock lock(mu_);
      if (cv_.wait_until(lock, deadline, [&] { return stop_; })) return;
    }

    for (const auto& e : events) {
      log_event(e);
      if (e.kind == EventKind::kAdmit) continue;
      auto it = live_.find(e.id);
      if (it == live_.end()) continue;
      const bool terminal = e.kind != EventKind::kToken;
      deliver(it->second, wire::encode(to_frame(e)), terminal);
      if (terminal) live_.erase(it);
    }
  }
}

}  // namespace xrouter::simbackend
