#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "vsrboost/errors.hpp"

namespace vsrboost {

/// Row-major interleaved image buffer.
///
/// Sample (x, y, c) lives at `(y * width + x) * channels + c`. Width and
/// height are at least one; the sample vector always has exactly
/// `width * height * channels` entries.
template <typename Sample>
class Image {
 public:
  Image() = default;

  Image(int width, int height, int channels, Sample fill = Sample{})
      : width_(width), height_(height), channels_(channels) {
    check_shape();
    data_.assign(sample_count(), fill);
  }

  Image(int width, int height, int channels, std::vector<Sample> data)
      : width_(width), height_(height), channels_(channels), data_(std::move(data)) {
    check_shape();
    if (data_.size() != sample_count()) {
      throw InvalidArgument("image data length " + std::to_string(data_.size()) +
                            " does not match " + std::to_string(width) + "x" +
                            std::to_string(height) + "x" + std::to_string(channels));
    }
  }

  int width() const noexcept { return width_; }
  int height() const noexcept { return height_; }
  int channels() const noexcept { return channels_; }
  bool empty() const noexcept { return data_.empty(); }

  std::size_t sample_count() const noexcept {
    return static_cast<std::size_t>(width_) * static_cast<std::size_t>(height_) *
           static_cast<std::size_t>(channels_);
  }

  std::size_t offset(int x, int y, int c = 0) const noexcept {
    return (static_cast<std::size_t>(y) * static_cast<std::size_t>(width_) +
            static_cast<std::size_t>(x)) *
               static_cast<std::size_t>(channels_) +
           static_cast<std::size_t>(c);
  }

  Sample& at(int x, int y, int c = 0) noexcept { return data_[offset(x, y, c)]; }
  const Sample& at(int x, int y, int c = 0) const noexcept { return data_[offset(x, y, c)]; }

  std::span<Sample> samples() noexcept { return data_; }
  std::span<const Sample> samples() const noexcept { return data_; }
  const std::vector<Sample>& vector() const noexcept { return data_; }

  bool same_shape(const Image& other) const noexcept {
    return width_ == other.width_ && height_ == other.height_ && channels_ == other.channels_;
  }

  bool operator==(const Image& other) const = default;

 private:
  void check_shape() const {
    if (width_ < 1 || height_ < 1 || channels_ < 1) {
      throw InvalidArgument("image dimensions must be positive, got " + std::to_string(width_) +
                            "x" + std::to_string(height_) + "x" + std::to_string(channels_));
    }
  }

  int width_ = 0;
  int height_ = 0;
  int channels_ = 0;
  std::vector<Sample> data_;
};

using ByteImage = Image<std::uint8_t>;
using FloatImage = Image<float>;

/// One video frame: 8-bit samples with 1 (gray) or 3 (RGB) channels.
class Frame : public ByteImage {
 public:
  Frame() = default;
  Frame(int width, int height, int channels, std::uint8_t fill = 0, int index = 0)
      : ByteImage(width, height, channels, fill), index_(index) {
    check_channels();
  }
  Frame(int width, int height, int channels, std::vector<std::uint8_t> data, int index = 0)
      : ByteImage(width, height, channels, std::move(data)), index_(index) {
    check_channels();
  }
  explicit Frame(ByteImage image, int index = 0) : ByteImage(std::move(image)), index_(index) {
    check_channels();
  }

  int index() const noexcept { return index_; }
  void set_index(int index) noexcept { index_ = index; }

  const ByteImage& image() const noexcept { return *this; }

  // Pixel content only; the ordinal is metadata.
  bool operator==(const Frame& other) const {
    return static_cast<const ByteImage&>(*this) == static_cast<const ByteImage&>(other);
  }

 private:
  void check_channels() const {
    if (channels() != 1 && channels() != 3) {
      throw InvalidArgument("frames carry 1 or 3 channels, got " + std::to_string(channels()));
    }
  }

  int index_ = 0;
};

/// A square tile cut out of a frame at a grid position.
struct Patch {
  ByteImage image;
  int x = 0;
  int y = 0;
  std::size_t grid_index = 0;

  int size() const noexcept { return image.width(); }
  bool operator==(const Patch&) const = default;
};

/// Hidden-state features covering the same rectangle as a Patch.
struct HiddenPatch {
  FloatImage features;
  int x = 0;
  int y = 0;
  std::size_t grid_index = 0;

  int size() const noexcept { return features.width(); }
  int channels() const noexcept { return features.channels(); }
  bool operator==(const HiddenPatch&) const = default;
};

// Round half away from zero and saturate to [0, 255].
inline std::uint8_t to_byte(double value) noexcept {
  if (!(value > 0.0)) return 0;  // also maps NaN to 0
  if (value >= 255.0) return 255;
  return static_cast<std::uint8_t>(std::floor(value + 0.5));
}

// BT.601 luma of an RGB sample triple.
inline double luma601(double r, double g, double b) noexcept {
  return 0.299 * r + 0.587 * g + 0.114 * b;
}

/// Single-channel float view: BT.601 luma for RGB, a copy for gray.
FloatImage to_gray(const ByteImage& image);

FloatImage to_float(const ByteImage& image);

/// Crop a rectangle; throws if it leaves the image.
template <typename Sample>
Image<Sample> crop(const Image<Sample>& image, int x, int y, int width, int height) {
  if (x < 0 || y < 0 || width < 1 || height < 1 || x + width > image.width() ||
      y + height > image.height()) {
    throw InvalidArgument("crop rectangle outside image");
  }
  Image<Sample> out(width, height, image.channels());
  const auto row = static_cast<std::size_t>(width) * static_cast<std::size_t>(image.channels());
  for (int r = 0; r < height; ++r) {
    const auto* src = image.samples().data() + image.offset(x, y + r);
    std::copy(src, src + row, out.samples().data() + out.offset(0, r));
  }
  return out;
}

}  // namespace vsrboost
