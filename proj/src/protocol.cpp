#include "vsrboost/protocol.hpp"

#include <algorithm>
#include <cstring>

#include "vsrboost/errors.hpp"

namespace vsrboost::wire {
namespace {

class Writer {
 public:
  void bytes(std::span<const std::uint8_t> b) { out_.insert(out_.end(), b.begin(), b.end()); }
  void u8(std::uint8_t v) { out_.push_back(v); }
  void u32(std::uint32_t v) {
    for (int k = 0; k < 4; ++k) out_.push_back(static_cast<std::uint8_t>(v >> (8 * k)));
  }
  void u64(std::uint64_t v) {
    for (int k = 0; k < 8; ++k) out_.push_back(static_cast<std::uint8_t>(v >> (8 * k)));
  }
  void header(MessageType type) {
    bytes(kMagic);
    u8(static_cast<std::uint8_t>(type));
  }
  void patch(const WirePatch& p) {
    u32(p.height);
    u32(p.width);
    u32(p.channels);
    u64(p.data.size());
    bytes(p.data);
  }
  std::vector<std::uint8_t> take() { return std::move(out_); }

 private:
  std::vector<std::uint8_t> out_;
};

std::uint32_t read_u32(Reader& r) {
  std::array<std::uint8_t, 4> b{};
  r.read_exact(b);
  std::uint32_t v = 0;
  for (int k = 3; k >= 0; --k) v = (v << 8) | b[k];
  return v;
}

std::uint64_t read_u64(Reader& r) {
  std::array<std::uint8_t, 8> b{};
  r.read_exact(b);
  std::uint64_t v = 0;
  for (int k = 7; k >= 0; --k) v = (v << 8) | b[k];
  return v;
}

std::uint64_t product(std::uint64_t a, std::uint64_t b) {
  if (a != 0 && b > kMaxPayload / a) throw ProtocolError("patch dimensions overflow the payload limit");
  return a * b;
}

WirePatch read_patch(Reader& r, std::uint32_t frames) {
  WirePatch p;
  p.height = read_u32(r);
  p.width = read_u32(r);
  p.channels = read_u32(r);
  const std::uint64_t len = read_u64(r);
  const std::uint64_t expected =
      product(product(product(p.height, p.width), p.channels), frames);
  if (len != expected) {
    throw ProtocolError("patch payload length " + std::to_string(len) + " does not match " +
                        std::to_string(p.height) + "x" + std::to_string(p.width) + "x" +
                        std::to_string(p.channels) + "x" + std::to_string(frames));
  }
  p.data.resize(len);
  r.read_exact(p.data);
  return p;
}

std::uint32_t count_of(std::size_t n) {
  if (n > 0xffffffffu) throw ProtocolError("too many patches for one message");
  return static_cast<std::uint32_t>(n);
}

}  // namespace

void SrRequest::validate() const {
  if (scale == 0) throw ProtocolError("request scale must be positive");
  if (frames_per_patch == 0) throw ProtocolError("frames_per_patch must be positive");
  for (const auto& p : patches) {
    const auto& first = patches.front();
    if (p.height != first.height || p.width != first.width || p.channels != first.channels) {
      throw ProtocolError("patches in one request must share dimensions");
    }
    if (p.data.size() != std::uint64_t{p.height} * p.width * p.channels * frames_per_patch) {
      throw ProtocolError("patch payload does not match its dimensions");
    }
  }
}

std::vector<std::uint8_t> encode(const SrRequest& request) {
  request.validate();
  Writer w;
  w.header(MessageType::request);
  w.u64(request.request_id);
  w.u32(request.scale);
  w.u32(request.frames_per_patch);
  w.u32(count_of(request.patches.size()));
  for (const auto& p : request.patches) w.patch(p);
  return w.take();
}

std::vector<std::uint8_t> encode(const SrResponse& response) {
  Writer w;
  w.header(MessageType::response);
  w.u64(response.request_id);
  w.u32(count_of(response.patches.size()));
  for (const auto& p : response.patches) {
    if (p.data.size() != std::uint64_t{p.height} * p.width * p.channels) {
      throw ProtocolError("response patch payload does not match its dimensions");
    }
    w.patch(p);
  }
  return w.take();
}

std::vector<std::uint8_t> encode(const ErrorReply& error) {
  Writer w;
  w.header(MessageType::error);
  w.u64(error.request_id);
  w.u32(error.code);
  w.u32(count_of(error.message.size()));
  w.bytes({reinterpret_cast<const std::uint8_t*>(error.message.data()), error.message.size()});
  return w.take();
}

std::vector<std::uint8_t> encode(const Message& message) {
  return std::visit([](const auto& m) { return encode(m); }, message);
}

void SpanReader::read_exact(std::span<std::uint8_t> out) {
  if (out.size() > remaining()) throw ProtocolError("truncated message");
  std::copy_n(bytes_.begin() + static_cast<std::ptrdiff_t>(pos_), out.size(), out.begin());
  pos_ += out.size();
}

Message read_message(Reader& reader) {
  std::array<std::uint8_t, 5> head{};
  reader.read_exact(head);
  if (!std::equal(kMagic.begin(), kMagic.end(), head.begin())) throw ProtocolError("bad magic");

  switch (static_cast<MessageType>(head[4])) {
    case MessageType::request: {
      SrRequest req;
      req.request_id = read_u64(reader);
      req.scale = read_u32(reader);
      req.frames_per_patch = read_u32(reader);
      const std::uint32_t count = read_u32(reader);
      for (std::uint32_t k = 0; k < count; ++k) {
        req.patches.push_back(read_patch(reader, req.frames_per_patch));
      }
      req.validate();
      return req;
    }
    case MessageType::response: {
      SrResponse res;
      res.request_id = read_u64(reader);
      const std::uint32_t count = read_u32(reader);
      for (std::uint32_t k = 0; k < count; ++k) res.patches.push_back(read_patch(reader, 1));
      return res;
    }
    case MessageType::error: {
      ErrorReply err;
      err.request_id = read_u64(reader);
      err.code = read_u32(reader);
      const std::uint32_t len = read_u32(reader);
      if (len > kMaxPayload) throw ProtocolError("error message too long");
      err.message.resize(len);
      reader.read_exact({reinterpret_cast<std::uint8_t*>(err.message.data()), len});
      return err;
    }
  }
  throw ProtocolError("unknown message type " + std::to_string(head[4]));
}

Message decode(std::span<const std::uint8_t> bytes) {
  SpanReader reader(bytes);
  Message m = read_message(reader);
  if (reader.remaining() != 0) throw ProtocolError("trailing bytes after message");
  return m;
}

}  // namespace vsrboost::wire
