#pragma once

#include <vector>

#include "vsrboost/image.hpp"

namespace vsrboost {

/// Dense per-pixel displacement field.
///
/// Convention: reference(p) ~ target(p + flow(p)). warp(target, flow) lands
/// target content on the reference's pixel grid.
class FlowField {
 public:
  FlowField() = default;
  FlowField(int width, int height);

  int width() const noexcept { return width_; }
  int height() const noexcept { return height_; }

  float u(int x, int y) const noexcept { return uv_[index(x, y)]; }
  float v(int x, int y) const noexcept { return uv_[index(x, y) + 1]; }
  void set(int x, int y, float u, float v) noexcept {
    uv_[index(x, y)] = u;
    uv_[index(x, y) + 1] = v;
  }

  /// Interleaved (u, v) pairs, row-major.
  const std::vector<float>& components() const noexcept { return uv_; }

  bool is_zero() const noexcept;
  bool operator==(const FlowField&) const = default;

  static FlowField uniform(int width, int height, float u, float v);

 private:
  std::size_t index(int x, int y) const noexcept {
    return 2 * (static_cast<std::size_t>(y) * static_cast<std::size_t>(width_) +
                static_cast<std::size_t>(x));
  }

  int width_ = 0;
  int height_ = 0;
  std::vector<float> uv_;
};

/// Tuning knobs of the estimator.
struct FlowParams {
  int pyramid_levels = 4;
  int block_size = 8;
  int iterations_per_level = 8;
  int search_radius_coarsest = 4;

  void validate() const;
};

/// Coarse-to-fine block flow with inverse-search refinement.
///
/// Per pyramid level: overlapping blocks (stride block_size / 2) are matched
/// by exhaustive integer SSD search around the prior (radius
/// search_radius_coarsest on the coarsest level, 1 elsewhere), refined by
/// inverse-compositional Gauss-Newton iterations, then densified by bilinear
/// interpolation of block-center vectors and upsampled to the next level.
/// RGB inputs are reduced to BT.601 luma. Bitwise-identical inputs return the
/// exact zero field.
FlowField estimate_flow(const ByteImage& reference, const ByteImage& target,
                        const FlowParams& params = {});

/// Motion state: mean over pixels of sqrt(u^2 + v^2).
double mean_abs_flow(const FlowField& flow);

/// Backward warp: out(p) = image(p + flow(p)), bilinear, border-clamped.
ByteImage warp(const ByteImage& image, const FlowField& flow);
FloatImage warp(const FloatImage& image, const FlowField& flow);

}  // namespace vsrboost
