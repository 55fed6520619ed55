#include "vsrboost/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

namespace vsrboost {
namespace {

void require_same_shape(const ByteImage& a, const ByteImage& b, const char* what) {
  if (!a.same_shape(b)) {
    throw InvalidArgument(std::string(what) + ": dimension mismatch " + std::to_string(a.width()) +
                          "x" + std::to_string(a.height()) + "x" + std::to_string(a.channels()) +
                          " vs " + std::to_string(b.width()) + "x" + std::to_string(b.height()) +
                          "x" + std::to_string(b.channels()));
  }
}

std::vector<int> window_starts(int dim, int window, int step) {
  std::vector<int> starts;
  for (int s = 0; s + window <= dim; s += step) starts.push_back(s);
  if (starts.back() != dim - window) starts.push_back(dim - window);
  return starts;
}

}  // namespace

double psnr(const ByteImage& a, const ByteImage& b) {
  require_same_shape(a, b, "psnr");
  auto sa = a.samples();
  auto sb = b.samples();
  // Integer accumulation keeps the result independent of summation order.
  unsigned long long sse = 0;
  for (std::size_t i = 0; i < sa.size(); ++i) {
    const int d = static_cast<int>(sa[i]) - static_cast<int>(sb[i]);
    sse += static_cast<unsigned long long>(d * d);
  }
  if (sse == 0) return kPsnrCap;
  const double mse = static_cast<double>(sse) / static_cast<double>(sa.size());
  return std::min(kPsnrCap, 10.0 * std::log10(255.0 * 255.0 / mse));
}

double ssim(const ByteImage& a, const ByteImage& b, const SsimOptions& options) {
  require_same_shape(a, b, "ssim");
  const int win = options.window;
  if (a.width() < win || a.height() < win) {
    throw InvalidArgument("ssim: image smaller than the " + std::to_string(win) + "x" +
                          std::to_string(win) + " window");
  }
  const FloatImage la = to_gray(a);
  const FloatImage lb = to_gray(b);
  const double c1 = (options.k1 * 255.0) * (options.k1 * 255.0);
  const double c2 = (options.k2 * 255.0) * (options.k2 * 255.0);
  const double n = static_cast<double>(win) * win;

  double total = 0.0;
  std::size_t windows = 0;
  for (int wy : window_starts(a.height(), win, options.step)) {
    for (int wx : window_starts(a.width(), win, options.step)) {
      double sx = 0, sy = 0, sxx = 0, syy = 0, sxy = 0;
      for (int y = wy; y < wy + win; ++y) {
        for (int x = wx; x < wx + win; ++x) {
          const double u = la.at(x, y);
          const double v = lb.at(x, y);
          sx += u;
          sy += v;
          sxx += u * u;
          syy += v * v;
          sxy += u * v;
        }
      }
      const double mx = sx / n;
      const double my = sy / n;
      const double vx = sxx / n - mx * mx;
      const double vy = syy / n - my * my;
      const double cov = sxy / n - mx * my;
      total += ((2 * mx * my + c1) * (2 * cov + c2)) / ((mx * mx + my * my + c1) * (vx + vy + c2));
      ++windows;
    }
  }
  return total / static_cast<double>(windows);
}

}  // namespace vsrboost
