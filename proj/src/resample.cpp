#include "vsrboost/resample.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace vsrboost {
namespace {

double cubic_weight(double t, double a) {
  t = std::abs(t);
  if (t < 1.0) return ((a + 2.0) * t - (a + 3.0)) * t * t + 1.0;
  if (t < 2.0) return ((a * t - 5.0 * a) * t + 8.0 * a) * t - 4.0 * a;
  return 0.0;
}

double lanczos_weight(double t) {
  t = std::abs(t);
  if (t == 0.0) return 1.0;
  if (t >= 3.0) return 0.0;
  const double x = std::numbers::pi * t;
  return 3.0 * std::sin(x) * std::sin(x / 3.0) / (x * x);
}

// Taps and normalized weights for every output coordinate along one axis.
struct AxisTable {
  int taps = 0;
  std::vector<int> index;      // out_dim * taps, already clamped
  std::vector<double> weight;  // out_dim * taps
};

AxisTable build_axis(int in_dim, int out_dim, Scale scale, const ResampleOptions& opt) {
  AxisTable table;
  if (opt.kernel == ResampleKernel::nearest) {
    table.taps = 1;
    table.index.resize(out_dim);
    table.weight.assign(out_dim, 1.0);
    for (int d = 0; d < out_dim; ++d) {
      const long long src = ((2LL * d + 1) * scale.den) / (2LL * scale.num);
      table.index[d] = static_cast<int>(std::clamp<long long>(src, 0, in_dim - 1));
    }
    return table;
  }

  const int radius = opt.kernel == ResampleKernel::cubic ? 2 : 3;
  table.taps = 2 * radius;
  table.index.resize(static_cast<std::size_t>(out_dim) * table.taps);
  table.weight.resize(table.index.size());
  for (int d = 0; d < out_dim; ++d) {
    const double src = (d + 0.5) * scale.den / scale.num - 0.5;
    const int base = static_cast<int>(std::floor(src));
    double sum = 0.0;
    for (int k = 0; k < table.taps; ++k) {
      const int tap = base - radius + 1 + k;
      const double t = src - tap;
      const double w = opt.kernel == ResampleKernel::cubic ? cubic_weight(t, opt.cubic_a)
                                                           : lanczos_weight(t);
      table.index[d * table.taps + k] = std::clamp(tap, 0, in_dim - 1);
      table.weight[d * table.taps + k] = w;
      sum += w;
    }
    for (int k = 0; k < table.taps; ++k) table.weight[d * table.taps + k] /= sum;
  }
  return table;
}

}  // namespace

ByteImage resample(const ByteImage& image, Scale scale, const ResampleOptions& options) {
  if (scale.num <= 0 || scale.den <= 0) throw InvalidArgument("resample scale must be positive");
  const int out_w = scale.apply(image.width());
  const int out_h = scale.apply(image.height());
  if (out_w < 1 || out_h < 1) throw InvalidArgument("resample output would be empty");
  if (scale.num == scale.den) return image;

  const int channels = image.channels();
  const AxisTable tx = build_axis(image.width(), out_w, scale, options);
  const AxisTable ty = build_axis(image.height(), out_h, scale, options);

  // Horizontal pass into doubles, then vertical pass with a single rounding.
  std::vector<double> horizontal(static_cast<std::size_t>(out_w) * image.height() * channels);
  for (int y = 0; y < image.height(); ++y) {
    for (int x = 0; x < out_w; ++x) {
      for (int c = 0; c < channels; ++c) {
        double acc = 0.0;
        for (int k = 0; k < tx.taps; ++k) {
          acc += tx.weight[x * tx.taps + k] * image.at(tx.index[x * tx.taps + k], y, c);
        }
        horizontal[(static_cast<std::size_t>(y) * out_w + x) * channels + c] = acc;
      }
    }
  }

  ByteImage out(out_w, out_h, channels);
  for (int y = 0; y < out_h; ++y) {
    for (int x = 0; x < out_w; ++x) {
      for (int c = 0; c < channels; ++c) {
        double acc = 0.0;
        for (int k = 0; k < ty.taps; ++k) {
          const auto row = static_cast<std::size_t>(ty.index[y * ty.taps + k]);
          acc += ty.weight[y * ty.taps + k] * horizontal[(row * out_w + x) * channels + c];
        }
        out.at(x, y, c) = to_byte(acc);
      }
    }
  }
  return out;
}

}  // namespace vsrboost
