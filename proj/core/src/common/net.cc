#include "xrouter/common/net.h"

#include <arpa/inet.h>
#include <fcntl.h>
#include <netdb.h>
#include <netinet/in.h>
#include <netinet/tcp.h>
#include <poll.h>
#include <sys/socket.h>
#include <sys/time.h>
#include <unistd.h>

#include <cerrno>
#include <charconv>
#include <cstring>

#include "xrouter/common/error.h"

namespace xrouter::net {

namespace {

std::string errno_text(const std::string& what) {
  return what + ": " + std::strerror(errno);
}

void set_nodelay(int fd) {
  int one = 1;
  ::setsockopt(fd, IPPROTO_TCP, TCP_NODELAY, &one, sizeof(one));
}

addrinfo* resolve(const Endpoint& endpoint, bool passive) {
  addrinfo hints{};
  hints.ai_family = AF_INET;
  hints.ai_socktype = SOCK_STREAM;
  if (passive) hints.ai_flags = AI_PASSIVE;
  addrinfo* result = nullptr;
  const std::string port = std::to_string(endpoint.port);
  const char* host = endpoint.host.empty() ? nullptr : endpoint.host.c_str();
  if (int rc = ::getaddrinfo(host, port.c_str(), &hints, &result); rc != 0) {
    throw Error(ErrorCode::kIo, "resolve " + endpoint.str() + ": " +
                                    ::gai_strerror(rc));
  }
  return result;
}

}  // namespace

Endpoint Endpoint::parse(std::string_view text) {
  const auto colon = text.rfind(':');
  if (colon == std::string_view::npos || colon == 0 || colon + 1 == text.size())
    throw Error(ErrorCode::kInvalidArgument,
                "endpoint must be host:port, got '" + std::string(text) + "'");
  unsigned port = 0;
  const auto digits = text.substr(colon + 1);
  auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), port);
  if (ec != std::errc{} || ptr != digits.data() + digits.size() || port > 65535)
    throw Error(ErrorCode::kInvalidArgument,
                "bad port in endpoint '" + std::string(text) + "'");
  return {std::string(text.substr(0, colon)), static_cast<uint16_t>(port)};
}

std::vector<Endpoint> parse_endpoint_list(std::string_view comma_separated) {
  std::vector<Endpoint> out;
  while (!comma_separated.empty()) {
    const auto comma = comma_separated.find(',');
    const auto item = comma_separated.substr(0, comma);
    if (!item.empty()) out.push_back(Endpoint::parse(item));
    if (comma == std::string_view::npos) break;
    comma_separated.remove_prefix(comma + 1);
  }
  return out;
}

Socket& Socket::operator=(Socket&& other) noexcept {
  if (this != &other) {
    close();
    fd_ = std::exchange(other.fd_, -1);
  }
  return *this;
}

void Socket::shutdown() const {
  if (fd_ >= 0) ::shutdown(fd_, SHUT_RDWR);
}

void Socket::close() {
  if (fd_ >= 0) {
    ::close(fd_);
    fd_ = -1;
  }
}

bool Socket::write_all(std::string_view bytes) const {
  while (!bytes.empty()) {
    const ssize_t n = ::send(fd_, bytes.data(), bytes.size(), MSG_NOSIGNAL);
    if (n < 0) {
      if (errno == EINTR) continue;
      return false;
    }
    bytes.remove_prefix(static_cast<size_t>(n));
  }
  return true;
}

Socket dial(const Endpoint& endpoint, std::chrono::milliseconds timeout) {
  addrinfo* addrs = resolve(endpoint, false);
  std::string last_error = "no address";
  for (addrinfo* ai = addrs; ai != nullptr; ai = ai->ai_next) {
    Socket sock(::socket(ai->ai_family, ai->ai_socktype | SOCK_CLOEXEC, ai->ai_protocol));
    if (!sock.valid()) {
      last_error = errno_text("socket");
      continue;
    }
    const int flags = ::fcntl(sock.fd(), F_GETFL, 0);
    ::fcntl(sock.fd(), F_SETFL, flags | O_NONBLOCK);
    int rc = ::connect(sock.fd(), ai->ai_addr, ai->ai_addrlen);
    if (rc != 0 && errno == EINPROGRESS) {
      pollfd pfd{sock.fd(), POLLOUT, 0};
      rc = ::poll(&pfd, 1, static_cast<int>(timeout.count()));
      if (rc == 1) {
        int err = 0;
        socklen_t len = sizeof(err);
        ::getsockopt(sock.fd(), SOL_SOCKET, SO_ERROR, &err, &len);
        errno = err;
        rc = err == 0 ? 0 : -1;
      } else {
        if (rc == 0) errno = ETIMEDOUT;
        rc = -1;
      }
    }
    if (rc != 0) {
      last_error = errno_text("connect " + endpoint.str());
      continue;
    }
    ::fcntl(sock.fd(), F_SETFL, flags);
    set_nodelay(sock.fd());
    ::freeaddrinfo(addrs);
    return sock;
  }
  ::freeaddrinfo(addrs);
  throw Error(ErrorCode::kIo, last_error);
}

Listener Listener::bind(const Endpoint& endpoint, int backlog) {
  addrinfo* addrs = resolve(endpoint, true);
  Listener l;
  l.socket_ = Socket(::socket(addrs->ai_family, addrs->ai_socktype | SOCK_CLOEXEC,
                              addrs->ai_protocol));
  if (!l.socket_.valid()) {
    ::freeaddrinfo(addrs);
    throw Error(ErrorCode::kIo, errno_text("socket"));
  }
  int one = 1;
  ::setsockopt(l.socket_.fd(), SOL_SOCKET, SO_REUSEADDR, &one, sizeof(one));
  if (::bind(l.socket_.fd(), addrs->ai_addr, addrs->ai_addrlen) != 0) {
    const std::string msg = errno_text("bind " + endpoint.str());
    ::freeaddrinfo(addrs);
    throw Error(ErrorCode::kIo, msg);
  }
  ::freeaddrinfo(addrs);
  if (::listen(l.socket_.fd(), backlog) != 0)
    throw Error(ErrorCode::kIo, errno_text("listen " + endpoint.str()));
  sockaddr_in bound{};
  socklen_t len = sizeof(bound);
  ::getsockname(l.socket_.fd(), reinterpret_cast<sockaddr*>(&bound), &len);
  l.host_ = endpoint.host.empty() ? "127.0.0.1" : endpoint.host;
  l.port_ = ntohs(bound.sin_port);
  return l;
}

std::optional<Socket> Listener::accept(std::chrono::milliseconds wait) {
  if (!socket_.valid()) return std::nullopt;
  pollfd pfd{socket_.fd(), POLLIN, 0};
  const int rc = ::poll(&pfd, 1, static_cast<int>(wait.count()));
  if (rc <= 0 || !(pfd.revents & POLLIN)) return std::nullopt;
  const int fd = ::accept4(socket_.fd(), nullptr, nullptr, SOCK_CLOEXEC);
  if (fd < 0) return std::nullopt;
  set_nodelay(fd);
  return Socket(fd);
}

void Socket::set_recv_timeout(std::chrono::milliseconds timeout) const {
  timeval tv{};
  tv.tv_sec = static_cast<time_t>(timeout.count() / 1000);
  tv.tv_usec = static_cast<suseconds_t>((timeout.count() % 1000) * 1000);
  ::setsockopt(fd_, SOL_SOCKET, SO_RCVTIMEO, &tv, sizeof(tv));
}

std::optional<std::string> LineReader::read_line() {
  for (;;) {
    const auto nl = buffer_.find('\n', scan_from_);
    if (nl != std::string::npos) {
      std::string line = buffer_.substr(0, nl + 1);
      buffer_.erase(0, nl + 1);
      scan_from_ = 0;
      return line;
    }
    scan_from_ = buffer_.size();
    if (buffer_.size() > max_line_) return std::nullopt;
    char chunk[8192];
    const ssize_t n = ::recv(socket_->fd(), chunk, sizeof(chunk), 0);
    if (n < 0 && errno == EINTR) continue;
    if (n <= 0) return std::nullopt;
    buffer_.append(chunk, static_cast<size_t>(n));
  }
}

Socket& SessionGroup::Handle::adopt(Socket socket) {
  std::lock_guard lock(mu_);
  sockets_.push_back(std::make_unique<Socket>(std::move(socket)));
  if (stopping_) sockets_.back()->shutdown();
  return *sockets_.back();
}

void SessionGroup::spawn(Socket downstream, std::function<void(Handle&)> body) {
  auto handle = std::make_unique<Handle>();
  handle->sockets_.push_back(std::make_unique<Socket>(std::move(downstream)));
  Handle* raw = handle.get();
  std::lock_guard lock(mu_);
  reap_locked();
  sessions_.push_back(std::move(handle));
  raw->thread_ = std::thread([raw, body = std::move(body)] {
    try {
      body(*raw);
    } catch (...) {
      // A failing session must not take the server down.
    }
    raw->done_.store(true, std::memory_order_release);
  });
}

size_t SessionGroup::active() const {
  std::lock_guard lock(mu_);
  size_t n = 0;
  for (const auto& s : sessions_) n += s->done_.load(std::memory_order_acquire) ? 0 : 1;
  return n;
}

void SessionGroup::reap_locked() {
  for (auto it = sessions_.begin(); it != sessions_.end();) {
    if ((*it)->done_.load(std::memory_order_acquire) && (*it)->thread_.joinable()) {
      (*it)->thread_.join();
      it = sessions_.erase(it);
    } else {
      ++it;
    }
  }
}

void SessionGroup::stop() {
  std::list<std::unique_ptr<Handle>> all;
  {
    std::lock_guard lock(mu_);
    all.swap(sessions_);
  }
  for (auto& s : all) {
    std::lock_guard lock(s->mu_);
    s->stopping_ = true;
    for (auto& sock : s->sockets_) sock->shutdown();
  }
  for (auto& s : all) {
    if (s->thread_.joinable()) s->thread_.join();
  }
}

}  // namespace xrouter::net
