#pragma once

#include <atomic>
#include <cstdint>
#include <memory>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

#include "vsrboost/backend.hpp"
#include "vsrboost/protocol.hpp"

namespace vsrboost {

struct Endpoint {
  std::string host = "127.0.0.1";
  std::uint16_t port = 0;

  std::string to_string() const { return host + ":" + std::to_string(port); }
};

/// Parses "host:port". Throws InvalidArgument.
Endpoint parse_endpoint(const std::string& text);

/// Owning TCP socket handle.
class Socket {
 public:
  Socket() = default;
  explicit Socket(int fd) noexcept : fd_(fd) {}
  Socket(Socket&& other) noexcept : fd_(other.release()) {}
  Socket& operator=(Socket&& other) noexcept;
  Socket(const Socket&) = delete;
  Socket& operator=(const Socket&) = delete;
  ~Socket();

  int fd() const noexcept { return fd_; }
  bool valid() const noexcept { return fd_ >= 0; }
  int release() noexcept;
  void close() noexcept;
  void shutdown() noexcept;

  void write_all(std::span<const std::uint8_t> bytes);

  static Socket connect(const Endpoint& endpoint);

 private:
  int fd_ = -1;
};

/// One connection, one request in flight at a time.
class Client {
 public:
  explicit Client(const Endpoint& endpoint);

  /// Sends the request and waits for its reply. Error replies become
  /// BackendError carrying the wire code; malformed replies or an id
  /// mismatch become ProtocolError and close the connection.
  wire::SrResponse call(const wire::SrRequest& request);

  bool connected() const noexcept { return socket_.valid(); }

 private:
  Socket socket_;
};

/// Backend that ships each batch to a BSR1 server. Every call opens its own
/// connection, so concurrent batches never share a socket.
class RemoteBackend final : public Backend {
 public:
  explicit RemoteBackend(Endpoint endpoint) : endpoint_(std::move(endpoint)) {}
  std::vector<ByteImage> super_resolve(std::span<const PatchSlice> batch, int scale) override;

 private:
  Endpoint endpoint_;
  std::atomic<std::uint64_t> next_id_{0};
};

enum class MockBehavior { bicubic, nearest, error };

struct MockConfig {
  MockBehavior behavior = MockBehavior::bicubic;
  std::uint32_t error_code = wire::kInternal;
};

/// Serves the protocol on 127.0.0.1. The resampling behaviors apply the
/// builtin resampler to the center frame of each payload; only scales 2 and
/// 4 are accepted. Port 0 binds an ephemeral port.
class MockServer {
 public:
  MockServer(std::uint16_t port, MockConfig config);
  ~MockServer();
  MockServer(const MockServer&) = delete;
  MockServer& operator=(const MockServer&) = delete;

  std::uint16_t port() const noexcept { return port_; }
  Endpoint endpoint() const { return {"127.0.0.1", port_}; }
  std::size_t requests_served() const noexcept { return served_; }

  /// Blocks until stop() is called from another thread or a signal handler
  /// flips the flag.
  void wait();
  void stop();

 private:
  void accept_loop();
  void serve(int fd);
  wire::Message answer(const wire::SrRequest& request) const;

  MockConfig config_;
  Socket listener_;
  std::uint16_t port_ = 0;
  std::atomic<bool> running_{true};
  std::atomic<std::size_t> served_{0};
  std::thread acceptor_;
  std::mutex connections_mutex_;
  std::vector<std::thread> workers_;
  std::vector<int> open_fds_;
};

}  // namespace vsrboost
