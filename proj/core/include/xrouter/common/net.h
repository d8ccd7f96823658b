#pragma once

#include <atomic>
#include <chrono>
#include <cstdint>
#include <functional>
#include <list>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

namespace xrouter::net {

struct Endpoint {
  std::string host;
  uint16_t port = 0;

  std::string str() const { return host + ":" + std::to_string(port); }
  bool operator==(const Endpoint&) const = default;

  /// Parses "host:port". Throws Error(kInvalidArgument) when malformed.
  static Endpoint parse(std::string_view text);
};

std::vector<Endpoint> parse_endpoint_list(std::string_view comma_separated);

/// Owning TCP socket handle.
class Socket {
 public:
  Socket() = default;
  explicit Socket(int fd) : fd_(fd) {}
  ~Socket() { close(); }
  Socket(Socket&& other) noexcept : fd_(std::exchange(other.fd_, -1)) {}
  Socket& operator=(Socket&& other) noexcept;
  Socket(const Socket&) = delete;
  Socket& operator=(const Socket&) = delete;

  int fd() const { return fd_; }
  bool valid() const { return fd_ >= 0; }

  /// Unblocks any reader/writer on this socket without releasing the fd.
  void shutdown() const;
  void close();

  /// Reads then fail after `timeout` without data; zero disables.
  void set_recv_timeout(std::chrono::milliseconds timeout) const;

  /// Writes every byte; false on error or peer reset.
  bool write_all(std::string_view bytes) const;

 private:
  int fd_ = -1;
};

/// Connects with a timeout. Throws Error(kIo) on failure.
Socket dial(const Endpoint& endpoint,
            std::chrono::milliseconds timeout = std::chrono::milliseconds(2000));

class Listener {
 public:
  /// Binds and listens; port 0 selects an ephemeral port.
  static Listener bind(const Endpoint& endpoint, int backlog = 4096);

  uint16_t port() const { return port_; }
  Endpoint endpoint() const { return {host_, port_}; }

  /// Waits up to `wait` for a connection; nullopt on timeout or after close().
  std::optional<Socket> accept(std::chrono::milliseconds wait);
  void close() { socket_.close(); }

 private:
  Socket socket_;
  std::string host_;
  uint16_t port_ = 0;
};

/// Buffered newline reader. Lines are returned with their trailing '\n' so
/// they can be relayed byte-for-byte.
class LineReader {
 public:
  explicit LineReader(const Socket& socket, size_t max_line = 16 << 20)
      : socket_(&socket), max_line_(max_line) {}

  /// nullopt on EOF, error, or an over-long line. A trailing partial line at
  /// EOF is discarded.
  std::optional<std::string> read_line();

 private:
  const Socket* socket_;
  size_t max_line_;
  std::string buffer_;
  size_t scan_from_ = 0;
};

/// Thread-per-session bookkeeping for the servers. Every socket a session
/// touches is owned here so that stop() can unblock it and the fd stays valid
/// until the session thread has been joined.
class SessionGroup {
 public:
  class Handle {
   public:
    /// Takes ownership of an extra socket (e.g. an upstream dial).
    Socket& adopt(Socket socket);
    Socket& downstream() { return *sockets_.front(); }

   private:
    friend class SessionGroup;
    std::mutex mu_;
    std::vector<std::unique_ptr<Socket>> sockets_;
    std::atomic<bool> done_{false};
    bool stopping_ = false;
    std::thread thread_;
  };

  SessionGroup() = default;
  SessionGroup(const SessionGroup&) = delete;
  SessionGroup& operator=(const SessionGroup&) = delete;
  ~SessionGroup() { stop(); }

  void spawn(Socket downstream, std::function<void(Handle&)> body);
  size_t active() const;

  /// Shuts every owned socket down and joins all session threads.
  void stop();

 private:
  void reap_locked();

  mutable std::mutex mu_;
  std::list<std::unique_ptr<Handle>> sessions_;
};

}  // namespace xrouter::net
