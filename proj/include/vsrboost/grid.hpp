#pragma once

#include <cstddef>
#include <span>
#include <utility>
#include <vector>

#include "vsrboost/image.hpp"

namespace vsrboost {

/// Overlapping square-tile geometry over a frame.
///
/// Origins on each axis are 0, stride, 2*stride, ... while the tile still
/// fits, plus a final origin clamped to `dim - patch_size` when the regular
/// sequence does not land there. Every pixel is covered by at least one tile
/// and every tile lies inside the frame. Tiles are indexed row-major:
/// index = row * columns + column.
class PatchGrid {
 public:
  PatchGrid() = default;

  int width() const noexcept { return width_; }
  int height() const noexcept { return height_; }
  int patch_size() const noexcept { return patch_size_; }
  int stride() const noexcept { return stride_; }
  int overlap() const noexcept { return patch_size_ - stride_; }
  const std::vector<int>& origins_x() const noexcept { return origins_x_; }
  const std::vector<int>& origins_y() const noexcept { return origins_y_; }

  std::size_t columns() const noexcept { return origins_x_.size(); }
  std::size_t rows() const noexcept { return origins_y_.size(); }
  std::size_t size() const noexcept { return columns() * rows(); }

  /// (x, y) origin of tile `index`.
  std::pair<int, int> origin(std::size_t index) const;

  /// The same geometry with every length multiplied by `factor`.
  PatchGrid scaled(int factor) const;

  bool operator==(const PatchGrid&) const = default;

  friend PatchGrid build_grid(int width, int height, int patch_size, int stride);

 private:
  int width_ = 0;
  int height_ = 0;
  int patch_size_ = 0;
  int stride_ = 0;
  std::vector<int> origins_x_;
  std::vector<int> origins_y_;
};

/// Throws InvalidArgument("frame too small ...") when a dimension is smaller
/// than the patch, or when the stride is outside (0, patch_size].
PatchGrid build_grid(int width, int height, int patch_size, int stride);

/// Copies every tile out of `image`, ordered by (origin_y, origin_x).
std::vector<Patch> decompose(const ByteImage& image, const PatchGrid& grid);

/// Averages overlapping tiles back into one image.
///
/// Tiles may sit on `grid` or on `grid.scaled(k)` where k = out_width /
/// grid.width(). Each output sample is the float mean of the covering tile
/// samples, rounded half away from zero.
ByteImage recombine(std::span<const Patch> patches, const PatchGrid& grid, int out_width,
                    int out_height);

}  // namespace vsrboost
