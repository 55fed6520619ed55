#include "vsrboost/image.hpp"

namespace vsrboost {

FloatImage to_gray(const ByteImage& image) {
  FloatImage out(image.width(), image.height(), 1);
  auto dst = out.samples();
  auto src = image.samples();
  if (image.channels() == 1) {
    for (std::size_t i = 0; i < dst.size(); ++i) dst[i] = src[i];
    return out;
  }
  const auto c = static_cast<std::size_t>(image.channels());
  for (std::size_t i = 0; i < dst.size(); ++i) {
    dst[i] = static_cast<float>(luma601(src[i * c], src[i * c + 1], src[i * c + 2]));
  }
  return out;
}

FloatImage to_float(const ByteImage& image) {
  std::vector<float> data(image.samples().begin(), image.samples().end());
  return FloatImage(image.width(), image.height(), image.channels(), std::move(data));
}

}  // namespace vsrboost
