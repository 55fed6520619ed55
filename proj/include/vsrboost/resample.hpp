#pragma once

#include "vsrboost/image.hpp"

namespace vsrboost {

/// Positive rational scale factor num/den.
struct Scale {
  int num = 1;
  int den = 1;

  static constexpr Scale up(int factor) { return {factor, 1}; }
  static constexpr Scale down(int factor) { return {1, factor}; }

  double value() const noexcept { return static_cast<double>(num) / den; }
  // round(dim * num / den), halves away from zero.
  int apply(int dim) const noexcept {
    return static_cast<int>((2LL * dim * num + den) / (2LL * den));
  }
};

enum class ResampleKernel { cubic, lanczos3, nearest };

struct ResampleOptions {
  ResampleKernel kernel = ResampleKernel::cubic;
  // Cubic convolution parameter; -0.5 is Catmull-Rom.
  double cubic_a = -0.5;
};

/// Separable resampling with pixel-center alignment and clamped edges.
/// Output dimensions are round(dim * scale). Deterministic.
ByteImage resample(const ByteImage& image, Scale scale, const ResampleOptions& options = {});

inline ByteImage resample_bicubic(const ByteImage& image, Scale scale, double kernel_a = -0.5) {
  return resample(image, scale, {ResampleKernel::cubic, kernel_a});
}

inline ByteImage resample_nearest(const ByteImage& image, Scale scale) {
  return resample(image, scale, {ResampleKernel::nearest});
}

inline ByteImage resample_lanczos(const ByteImage& image, Scale scale) {
  return resample(image, scale, {ResampleKernel::lanczos3});
}

}  // namespace vsrboost
