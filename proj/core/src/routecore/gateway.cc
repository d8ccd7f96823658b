#include "xrouter/routecore/gateway.h"

#include <poll.h>
#include <sys/socket.h>

#include <cerrno>
#include <chrono>

#include "xrouter/common/error.h"
#include "xrouter/common/wire.h"

namespace xrouter::routecore {

using namespace std::chrono_literals;

Gateway::Gateway(std::shared_ptr<const clusterkit::ClusterPipeline> pipeline,
                 std::shared_ptr<const RouteTable> routes, GatewayOptions options)
    : pipeline_(std::move(pipeline)), routes_(std::move(routes)), opts_(std::move(options)) {
  if (opts_.max_sessions < 1) {
    throw Error(ErrorCode::kInvalidArgument, "max sessions must be >= 1");
  }
}

Gateway::~Gateway() { stop(); }

std::vector<int64_t> Gateway::routing_latencies_ns() const {
  std::lock_guard lock(latency_mu_);
  return routing_ns_;
}

void Gateway::start() {
  if (running_) return;
  listener_ = net::Listener::bind(opts_.listen);
  endpoint_ = listener_.endpoint();
  running_ = true;
  accept_thread_ = std::thread([this] { accept_loop(); });
}

void Gateway::stop() {
  if (!running_) return;
  running_ = false;
  stop_ = true;
  if (accept_thread_.joinable()) accept_thread_.join();
  listener_.close();
  sessions_.stop();
}

void Gateway::accept_loop() {
  while (!stop_) {
    auto sock = listener_.accept(50ms);
    if (!sock) continue;
    if (active_.load() >= opts_.max_sessions) {
      sock->write_all(
          wire::encode(wire::make_err("", wire::errc::kOverloaded, "session limit reached")));
      continue;
    }
    ++active_;
    ++started_sessions_;
    sessions_.spawn(std::move(*sock), [this](net::SessionGroup::Handle& h) {
      struct Release {
        std::atomic<size_t>& n;
        ~Release() { --n; }
      } release{active_};
      handle_session(h.downstream(), [&h](net::Socket s) -> net::Socket& {
        return h.adopt(std::move(s));
      });
    });
  }
}

void Gateway::handle_session(net::Socket& down,
                             const std::function<net::Socket&(net::Socket)>& adopt) const {
  const auto idle = std::chrono::duration_cast<std::chrono::milliseconds>(opts_.idle_timeout);
  down.set_recv_timeout(idle);
  net::LineReader down_reader(down);
  auto line = down_reader.read_line();
  if (!line) return;
  const auto received = std::chrono::steady_clock::now();

  auto fail = [&](const std::string& id, std::string_view code, const std::string& msg) {
    down.write_all(wire::encode(wire::make_err(id, code, msg)));
  };

  wire::Frame req;
  try {
    req = wire::decode(*line);
    if (req.type != wire::FrameType::kReq) {
      throw Error(ErrorCode::kMalformedFrame, "expected a req frame");
    }
  } catch (const Error& e) {
    fail(req.id, wire::errc::kBadRequest, e.what());
    return;
  }

  const int cluster = pipeline_->classify(req.prompt);
  const net::Endpoint* target = nullptr;
  try {
    target = &routes_->lookup(cluster);
  } catch (const Error& e) {
    fail(req.id, wire::errc::kNoRoute, e.what());
    return;
  }

  net::Socket* up = nullptr;
  try {
    up = &adopt(net::dial(*target));
  } catch (const Error& e) {
    fail(req.id, wire::errc::kUpstreamUnavailable, e.what());
    return;
  }
  req.cluster = cluster;
  if (!up->write_all(wire::encode(req))) {
    fail(req.id, wire::errc::kUpstreamUnavailable, "upstream write failed");
    return;
  }
  {
    const auto spent = std::chrono::steady_clock::now() - received;
    std::lock_guard lock(latency_mu_);
    routing_ns_.push_back(std::chrono::duration_cast<std::chrono::nanoseconds>(spent).count());
  }

  // Relay verbatim, one frame in flight, until the stream terminates.
  up->set_recv_timeout(idle);
  net::LineReader up_reader(*up);
  while (true) {
    auto frame = up_reader.read_line();
    if (!frame) {
      fail(req.id, wire::errc::kUpstreamUnavailable, "upstream closed mid-stream");
      return;
    }
    if (!down.write_all(*frame)) return;
    bool terminal = false;
    try {
      terminal = wire::decode(*frame).is_terminal();
    } catch (const Error&) {
      // Relayed untouched; the client decides what to make of it.
    }
    if (terminal) return;
  }
}

Balancer::Balancer(std::vector<net::Endpoint> upstreams, net::Endpoint listen)
    : state_(std::move(upstreams)), listen_(std::move(listen)) {
  if (state_.upstreams().empty()) throw Error(ErrorCode::kNoUpstreams, "balancer has no upstreams");
  counts_ = std::make_unique<std::atomic<uint64_t>[]>(state_.upstreams().size());
}

Balancer::~Balancer() { stop(); }

void Balancer::start() {
  if (running_) return;
  listener_ = net::Listener::bind(listen_);
  endpoint_ = listener_.endpoint();
  running_ = true;
  accept_thread_ = std::thread([this] { accept_loop(); });
}

void Balancer::stop() {
  if (!running_) return;
  running_ = false;
  stop_ = true;
  if (accept_thread_.joinable()) accept_thread_.join();
  listener_.close();
  sessions_.stop();
}

std::vector<uint64_t> Balancer::counts() const {
  std::vector<uint64_t> out(state_.upstreams().size());
  for (size_t i = 0; i < out.size(); ++i) out[i] = counts_[i].load();
  return out;
}

void Balancer::accept_loop() {
  while (!stop_) {
    auto sock = listener_.accept(50ms);
    if (!sock) continue;
    const size_t idx = state_.next_index();
    ++counts_[idx];
    sessions_.spawn(std::move(*sock),
                    [this, idx](net::SessionGroup::Handle& h) { pipe(h, idx); });
  }
}

void Balancer::pipe(net::SessionGroup::Handle& handle, size_t upstream) {
  auto& down = handle.downstream();
  net::Socket* up = nullptr;
  try {
    up = &handle.adopt(net::dial(state_.upstreams()[upstream]));
  } catch (const Error& e) {
    down.write_all(wire::encode(wire::make_err("", wire::errc::kUpstreamUnavailable, e.what())));
    return;
  }
  pollfd fds[2] = {{down.fd(), POLLIN, 0}, {up->fd(), POLLIN, 0}};
  char buf[16384];
  while (true) {
    const int rc = ::poll(fds, 2, -1);
    if (rc < 0) {
      if (errno == EINTR) continue;
      return;
    }
    for (int i = 0; i < 2; ++i) {
      if (!(fds[i].revents & (POLLIN | POLLHUP | POLLERR))) continue;
      const ssize_t n = ::recv(fds[i].fd, buf, sizeof(buf), 0);
      if (n < 0 && errno == EINTR) continue;
      if (n <= 0) return;
      const net::Socket& dst = i == 0 ? *up : down;
      if (!dst.write_all(std::string_view(buf, static_cast<size_t>(n)))) return;
    }
  }
}

}  // namespace xrouter::routecore
