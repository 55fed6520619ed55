#include "vsrboost/grid.hpp"

#include <string>

namespace vsrboost {
namespace {

std::vector<int> axis_origins(int dim, int patch_size, int stride) {
  std::vector<int> origins;
  for (int o = 0; o + patch_size <= dim; o += stride) origins.push_back(o);
  if (origins.back() != dim - patch_size) origins.push_back(dim - patch_size);
  return origins;
}

}  // namespace

PatchGrid build_grid(int width, int height, int patch_size, int stride) {
  if (patch_size < 1 || stride < 1 || stride > patch_size) {
    throw InvalidArgument("grid requires 0 < stride <= patch_size, got patch " +
                          std::to_string(patch_size) + " stride " + std::to_string(stride));
  }
  if (width < patch_size || height < patch_size) {
    throw InvalidArgument("frame too small: " + std::to_string(width) + "x" +
                          std::to_string(height) + " is smaller than patch size " +
                          std::to_string(patch_size));
  }
  PatchGrid grid;
  grid.width_ = width;
  grid.height_ = height;
  grid.patch_size_ = patch_size;
  grid.stride_ = stride;
  grid.origins_x_ = axis_origins(width, patch_size, stride);
  grid.origins_y_ = axis_origins(height, patch_size, stride);
  return grid;
}

std::pair<int, int> PatchGrid::origin(std::size_t index) const {
  if (index >= size()) throw InvalidArgument("grid index out of range");
  return {origins_x_[index % columns()], origins_y_[index / columns()]};
}

PatchGrid PatchGrid::scaled(int factor) const {
  if (factor < 1) throw InvalidArgument("grid scale factor must be positive");
  PatchGrid out = *this;
  out.width_ *= factor;
  out.height_ *= factor;
  out.patch_size_ *= factor;
  out.stride_ *= factor;
  for (auto& o : out.origins_x_) o *= factor;
  for (auto& o : out.origins_y_) o *= factor;
  return out;
}

std::vector<Patch> decompose(const ByteImage& image, const PatchGrid& grid) {
  if (image.width() != grid.width() || image.height() != grid.height()) {
    throw InvalidArgument("grid built for " + std::to_string(grid.width()) + "x" +
                          std::to_string(grid.height()) + " but frame is " +
                          std::to_string(image.width()) + "x" + std::to_string(image.height()));
  }
  std::vector<Patch> patches;
  patches.reserve(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    auto [x, y] = grid.origin(i);
    patches.push_back(
        Patch{crop(image, x, y, grid.patch_size(), grid.patch_size()), x, y, i});
  }
  return patches;
}

ByteImage recombine(std::span<const Patch> patches, const PatchGrid& grid, int out_width,
                    int out_height) {
  if (patches.empty()) throw InvalidArgument("coverage hole: no patches to recombine");
  if (grid.width() < 1 || out_width % grid.width() != 0 ||
      out_height != (out_width / grid.width()) * grid.height()) {
    throw InvalidArgument("output size is not an integer multiple of the grid");
  }
  const PatchGrid placed = grid.scaled(out_width / grid.width());
  const int size = patches.front().image.width();
  const int channels = patches.front().image.channels();

  std::vector<double> sums(static_cast<std::size_t>(out_width) * out_height * channels, 0.0);
  std::vector<unsigned> counts(static_cast<std::size_t>(out_width) * out_height, 0);
  for (const auto& p : patches) {
    if (p.image.width() != size || p.image.height() != size || p.image.channels() != channels) {
      throw InvalidArgument("inconsistent patch sizes in recombine");
    }
    if (size != placed.patch_size() || p.grid_index >= placed.size() ||
        placed.origin(p.grid_index) != std::pair{p.x, p.y}) {
      throw InvalidArgument("patch " + std::to_string(p.grid_index) +
                            " does not match grid geometry");
    }
    for (int y = 0; y < size; ++y) {
      for (int x = 0; x < size; ++x) {
        const auto pixel = static_cast<std::size_t>(p.y + y) * out_width + (p.x + x);
        ++counts[pixel];
        for (int c = 0; c < channels; ++c) {
          sums[pixel * channels + c] += p.image.at(x, y, c);
        }
      }
    }
  }

  ByteImage out(out_width, out_height, channels);
  auto dst = out.samples();
  for (std::size_t pixel = 0; pixel < counts.size(); ++pixel) {
    if (counts[pixel] == 0) {
      throw InvalidArgument("coverage hole at pixel (" + std::to_string(pixel % out_width) +
                            ", " + std::to_string(pixel / out_width) + ")");
    }
    for (int c = 0; c < channels; ++c) {
      dst[pixel * channels + c] = to_byte(sums[pixel * channels + c] / counts[pixel]);
    }
  }
  return out;
}

}  // namespace vsrboost
