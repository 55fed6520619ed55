#pragma once

// BSR1 wire format. Little-endian throughout.
//
//   request  : magic "BSR1", u8 type=1, u64 request_id, u32 scale,
//              u32 frames_per_patch, u32 patch_count,
//              patch_count x { u32 h, u32 w, u32 c, u64 len, len bytes }
//              with len == h * w * c * frames_per_patch
//   response : magic, u8 type=2, u64 request_id, u32 patch_count,
//              patch_count x { u32 h', u32 w', u32 c, u64 len, len bytes }
//              with len == h' * w' * c
//   error    : magic, u8 type=255, u64 request_id, u32 code, u32 msg_len,
//              msg_len bytes of UTF-8

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <variant>
#include <vector>

namespace vsrboost::wire {

inline constexpr std::array<std::uint8_t, 4> kMagic{0x42, 0x53, 0x52, 0x31};

enum class MessageType : std::uint8_t { request = 1, response = 2, error = 255 };

enum ErrorCode : std::uint32_t {
  kMalformed = 1,
  kUnsupportedScale = 2,
  kInternal = 3,
};

// Upper bound on one patch payload; larger lengths are treated as malformed.
inline constexpr std::uint64_t kMaxPayload = 1ull << 30;

struct WirePatch {
  std::uint32_t height = 0;
  std::uint32_t width = 0;
  std::uint32_t channels = 0;
  std::vector<std::uint8_t> data;

  bool operator==(const WirePatch&) const = default;
};

struct SrRequest {
  std::uint64_t request_id = 0;
  std::uint32_t scale = 4;
  std::uint32_t frames_per_patch = 1;
  std::vector<WirePatch> patches;

  // Shared dims across patches and payload lengths matching them.
  void validate() const;
  bool operator==(const SrRequest&) const = default;
};

struct SrResponse {
  std::uint64_t request_id = 0;
  std::vector<WirePatch> patches;

  bool operator==(const SrResponse&) const = default;
};

struct ErrorReply {
  std::uint64_t request_id = 0;
  std::uint32_t code = kInternal;
  std::string message;

  bool operator==(const ErrorReply&) const = default;
};

using Message = std::variant<SrRequest, SrResponse, ErrorReply>;

std::vector<std::uint8_t> encode(const SrRequest& request);
std::vector<std::uint8_t> encode(const SrResponse& response);
std::vector<std::uint8_t> encode(const ErrorReply& error);
std::vector<std::uint8_t> encode(const Message& message);

/// Pull-style byte source the decoder reads from.
class Reader {
 public:
  virtual ~Reader() = default;
  /// Fills `out` completely or throws ProtocolError on a short stream.
  virtual void read_exact(std::span<std::uint8_t> out) = 0;
};

class SpanReader final : public Reader {
 public:
  explicit SpanReader(std::span<const std::uint8_t> bytes) : bytes_(bytes) {}
  void read_exact(std::span<std::uint8_t> out) override;
  std::size_t remaining() const noexcept { return bytes_.size() - pos_; }

 private:
  std::span<const std::uint8_t> bytes_;
  std::size_t pos_ = 0;
};

/// Reads exactly one message. Throws ProtocolError on bad magic, unknown
/// type, truncation or inconsistent lengths.
Message read_message(Reader& reader);

/// Decodes a buffer holding exactly one message.
Message decode(std::span<const std::uint8_t> bytes);

}  // namespace vsrboost::wire
