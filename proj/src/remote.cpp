#include "vsrboost/remote.hpp"

#include <arpa/inet.h>
#include <netdb.h>
#include <netinet/in.h>
#include <netinet/tcp.h>
#include <poll.h>
#include <sys/socket.h>
#include <unistd.h>

#include <algorithm>
#include <cerrno>
#include <chrono>
#include <cstring>

#include "vsrboost/resample.hpp"

namespace vsrboost {
namespace {

class SocketReader final : public wire::Reader {
 public:
  explicit SocketReader(int fd) : fd_(fd) {}

  void read_exact(std::span<std::uint8_t> out) override {
    std::size_t got = 0;
    while (got < out.size()) {
      const ssize_t n = ::recv(fd_, out.data() + got, out.size() - got, 0);
      if (n == 0) throw ProtocolError("connection closed mid-message");
      if (n < 0) {
        if (errno == EINTR) continue;
        throw ProtocolError(std::string("recv failed: ") + std::strerror(errno));
      }
      got += static_cast<std::size_t>(n);
    }
  }

 private:
  int fd_;
};

wire::WirePatch to_wire(std::span<const ByteImage> frames) {
  const auto& first = frames.front();
  wire::WirePatch p;
  p.height = static_cast<std::uint32_t>(first.height());
  p.width = static_cast<std::uint32_t>(first.width());
  p.channels = static_cast<std::uint32_t>(first.channels());
  p.data.reserve(first.sample_count() * frames.size());
  for (const auto& f : frames) {
    if (!f.same_shape(first)) throw InvalidArgument("slice frames differ in shape");
    p.data.insert(p.data.end(), f.samples().begin(), f.samples().end());
  }
  return p;
}

ByteImage center_frame(const wire::WirePatch& p, std::uint32_t frames) {
  const std::size_t frame_bytes = std::size_t{p.height} * p.width * p.channels;
  const auto begin = p.data.begin() + static_cast<std::ptrdiff_t>(frame_bytes * (frames / 2));
  return ByteImage(static_cast<int>(p.width), static_cast<int>(p.height),
                   static_cast<int>(p.channels),
                   std::vector<std::uint8_t>(begin, begin + static_cast<std::ptrdiff_t>(frame_bytes)));
}

}  // namespace

Endpoint parse_endpoint(const std::string& text) {
  const auto colon = text.rfind(':');
  if (colon == std::string::npos || colon == 0 || colon + 1 == text.size()) {
    throw InvalidArgument("endpoint must look like host:port, got '" + text + "'");
  }
  Endpoint e;
  e.host = text.substr(0, colon);
  const std::string port = text.substr(colon + 1);
  if (!std::all_of(port.begin(), port.end(), [](char c) { return c >= '0' && c <= '9'; }) ||
      port.size() > 5 || std::stoul(port) > 65535) {
    throw InvalidArgument("invalid port in endpoint '" + text + "'");
  }
  e.port = static_cast<std::uint16_t>(std::stoul(port));
  return e;
}

Socket& Socket::operator=(Socket&& other) noexcept {
  if (this != &other) {
    close();
    fd_ = other.release();
  }
  return *this;
}

Socket::~Socket() { close(); }

int Socket::release() noexcept {
  const int fd = fd_;
  fd_ = -1;
  return fd;
}

void Socket::close() noexcept {
  if (fd_ >= 0) ::close(fd_);
  fd_ = -1;
}

void Socket::shutdown() noexcept {
  if (fd_ >= 0) ::shutdown(fd_, SHUT_RDWR);
}

void Socket::write_all(std::span<const std::uint8_t> bytes) {
  std::size_t sent = 0;
  while (sent < bytes.size()) {
    const ssize_t n = ::send(fd_, bytes.data() + sent, bytes.size() - sent, MSG_NOSIGNAL);
    if (n < 0) {
      if (errno == EINTR) continue;
      throw ProtocolError(std::string("send failed: ") + std::strerror(errno));
    }
    sent += static_cast<std::size_t>(n);
  }
}

Socket Socket::connect(const Endpoint& endpoint) {
  addrinfo hints{};
  hints.ai_family = AF_UNSPEC;
  hints.ai_socktype = SOCK_STREAM;
  addrinfo* found = nullptr;
  const std::string port = std::to_string(endpoint.port);
  if (const int rc = ::getaddrinfo(endpoint.host.c_str(), port.c_str(), &hints, &found); rc != 0) {
    throw BackendError("cannot resolve " + endpoint.to_string() + ": " + ::gai_strerror(rc));
  }
  std::unique_ptr<addrinfo, decltype(&::freeaddrinfo)> guard(found, ::freeaddrinfo);
  for (auto* ai = found; ai; ai = ai->ai_next) {
    Socket s(::socket(ai->ai_family, ai->ai_socktype, ai->ai_protocol));
    if (!s.valid()) continue;
    if (::connect(s.fd(), ai->ai_addr, ai->ai_addrlen) == 0) {
      int one = 1;
      ::setsockopt(s.fd(), IPPROTO_TCP, TCP_NODELAY, &one, sizeof(one));
      return s;
    }
  }
  throw BackendError("cannot connect to " + endpoint.to_string() + ": " + std::strerror(errno));
}

Client::Client(const Endpoint& endpoint) : socket_(Socket::connect(endpoint)) {}

wire::SrResponse Client::call(const wire::SrRequest& request) {
  if (!socket_.valid()) throw ProtocolError("connection is closed");
  try {
    socket_.write_all(wire::encode(request));
    SocketReader reader(socket_.fd());
    wire::Message reply = wire::read_message(reader);
    if (auto* err = std::get_if<wire::ErrorReply>(&reply)) {
      throw BackendError("backend error " + std::to_string(err->code) + ": " + err->message,
                         err->code);
    }
    auto* res = std::get_if<wire::SrResponse>(&reply);
    if (!res) throw ProtocolError("server sent a request message");
    if (res->request_id != request.request_id) {
      throw ProtocolError("response id " + std::to_string(res->request_id) +
                          " does not match request " + std::to_string(request.request_id));
    }
    return std::move(*res);
  } catch (const ProtocolError&) {
    socket_.close();
    throw;
  }
}

std::vector<ByteImage> RemoteBackend::super_resolve(std::span<const PatchSlice> batch, int scale) {
  if (batch.empty()) return {};
  wire::SrRequest req;
  req.request_id = next_id_++;
  req.scale = static_cast<std::uint32_t>(scale);
  req.frames_per_patch = static_cast<std::uint32_t>(batch.front().frames.size());
  for (const auto& slice : batch) {
    if (slice.frames.size() != req.frames_per_patch) {
      throw InvalidArgument("slices in one batch must carry the same number of frames");
    }
    req.patches.push_back(to_wire(slice.frames));
  }
  Client client(endpoint_);
  const auto res = client.call(req);
  if (res.patches.size() != batch.size()) {
    throw ProtocolError("response carries " + std::to_string(res.patches.size()) +
                        " patches for " + std::to_string(batch.size()) + " requested");
  }
  std::vector<ByteImage> out;
  out.reserve(batch.size());
  for (std::size_t k = 0; k < batch.size(); ++k) {
    const auto& p = res.patches[k];
    const auto& in = batch[k].center();
    if (p.height != in.height() * req.scale || p.width != in.width() * req.scale ||
        p.channels != static_cast<std::uint32_t>(in.channels())) {
      throw ProtocolError("response patch " + std::to_string(k) + " has unexpected dimensions");
    }
    out.emplace_back(static_cast<int>(p.width), static_cast<int>(p.height),
                     static_cast<int>(p.channels), p.data);
  }
  return out;
}

MockServer::MockServer(std::uint16_t port, MockConfig config) : config_(config) {
  listener_ = Socket(::socket(AF_INET, SOCK_STREAM, 0));
  if (!listener_.valid()) throw IoError(std::string("socket: ") + std::strerror(errno));
  sockaddr_in addr{};
  addr.sin_family = AF_INET;
  addr.sin_addr.s_addr = htonl(INADDR_LOOPBACK);
  addr.sin_port = htons(port);
  if (::bind(listener_.fd(), reinterpret_cast<sockaddr*>(&addr), sizeof(addr)) != 0) {
    throw IoError("cannot bind port " + std::to_string(port) +
                  (errno == EADDRINUSE ? ": port in use" : std::string(": ") + std::strerror(errno)));
  }
  if (::listen(listener_.fd(), 64) != 0) throw IoError(std::string("listen: ") + std::strerror(errno));
  socklen_t len = sizeof(addr);
  ::getsockname(listener_.fd(), reinterpret_cast<sockaddr*>(&addr), &len);
  port_ = ntohs(addr.sin_port);
  acceptor_ = std::thread([this] { accept_loop(); });
}

MockServer::~MockServer() { stop(); }

void MockServer::wait() {
  while (running_) std::this_thread::sleep_for(std::chrono::milliseconds(50));
}

void MockServer::stop() {
  running_ = false;
  if (acceptor_.joinable()) acceptor_.join();
  std::vector<std::thread> workers;
  {
    std::lock_guard lock(connections_mutex_);
    for (int fd : open_fds_) ::shutdown(fd, SHUT_RDWR);
    workers.swap(workers_);
  }
  for (auto& t : workers) t.join();
  listener_.close();
}

void MockServer::accept_loop() {
  while (running_) {
    pollfd pfd{listener_.fd(), POLLIN, 0};
    const int ready = ::poll(&pfd, 1, 50);
    if (ready <= 0 || !(pfd.revents & POLLIN)) continue;
    const int fd = ::accept(listener_.fd(), nullptr, nullptr);
    if (fd < 0) continue;
    int one = 1;
    ::setsockopt(fd, IPPROTO_TCP, TCP_NODELAY, &one, sizeof(one));
    std::lock_guard lock(connections_mutex_);
    open_fds_.push_back(fd);
    workers_.emplace_back([this, fd] { serve(fd); });
  }
}

void MockServer::serve(int fd) {
  Socket conn(fd);
  SocketReader reader(fd);
  while (running_) {
    wire::Message msg;
    try {
      msg = wire::read_message(reader);
    } catch (const ProtocolError& e) {
      // Clean EOF between messages surfaces as a short read too; a reply
      // only matters when the peer is still there.
      try {
        conn.write_all(wire::encode(wire::ErrorReply{0, wire::kMalformed, e.what()}));
      } catch (const Error&) {
      }
      break;
    }
    auto* req = std::get_if<wire::SrRequest>(&msg);
    wire::Message reply = req ? answer(*req)
                              : wire::Message{wire::ErrorReply{0, wire::kMalformed,
                                                               "expected a request message"}};
    ++served_;
    try {
      conn.write_all(wire::encode(reply));
    } catch (const Error&) {
      break;
    }
  }
  std::lock_guard lock(connections_mutex_);
  open_fds_.erase(std::remove(open_fds_.begin(), open_fds_.end(), fd), open_fds_.end());
}

wire::Message MockServer::answer(const wire::SrRequest& req) const {
  if (config_.behavior == MockBehavior::error) {
    return wire::ErrorReply{req.request_id, config_.error_code,
                            "mock configured to fail with code " + std::to_string(config_.error_code)};
  }
  if (req.scale != 2 && req.scale != 4) {
    return wire::ErrorReply{req.request_id, wire::kUnsupportedScale,
                            "unsupported scale " + std::to_string(req.scale)};
  }
  const ResampleKernel kernel =
      config_.behavior == MockBehavior::bicubic ? ResampleKernel::cubic : ResampleKernel::nearest;
  wire::SrResponse res;
  res.request_id = req.request_id;
  try {
    for (const auto& p : req.patches) {
      const ByteImage sr = resample(center_frame(p, req.frames_per_patch),
                                    Scale::up(static_cast<int>(req.scale)), {kernel});
      res.patches.push_back({static_cast<std::uint32_t>(sr.height()),
                             static_cast<std::uint32_t>(sr.width()),
                             static_cast<std::uint32_t>(sr.channels()), sr.vector()});
    }
  } catch (const std::exception& e) {
    return wire::ErrorReply{req.request_id, wire::kInternal, e.what()};
  }
  return res;
}

}  // namespace vsrboost
