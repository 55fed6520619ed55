#include "vsrboost/flow.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace vsrboost {

FlowField::FlowField(int width, int height) : width_(width), height_(height) {
  if (width < 1 || height < 1) throw InvalidArgument("flow field dimensions must be positive");
  uv_.assign(2 * static_cast<std::size_t>(width) * static_cast<std::size_t>(height), 0.0f);
}

FlowField FlowField::uniform(int width, int height, float u, float v) {
  FlowField f(width, height);
  for (std::size_t i = 0; i < f.uv_.size(); i += 2) {
    f.uv_[i] = u;
    f.uv_[i + 1] = v;
  }
  return f;
}

bool FlowField::is_zero() const noexcept {
  return std::all_of(uv_.begin(), uv_.end(), [](float c) { return c == 0.0f; });
}

void FlowParams::validate() const {
  if (pyramid_levels < 1) throw InvalidArgument("flow: pyramid_levels must be >= 1");
  if (block_size < 4) throw InvalidArgument("flow: block_size must be >= 4");
  if (iterations_per_level < 0) throw InvalidArgument("flow: iterations_per_level must be >= 0");
  if (search_radius_coarsest < 0) throw InvalidArgument("flow: search radius must be >= 0");
}

namespace {

// Single-channel float plane used inside the estimator.
struct Plane {
  int w = 0;
  int h = 0;
  std::vector<float> px;

  float at(int x, int y) const { return px[static_cast<std::size_t>(y) * w + x]; }

  float clamped(int x, int y) const {
    return at(std::clamp(x, 0, w - 1), std::clamp(y, 0, h - 1));
  }

  float bilinear(float x, float y) const {
    x = std::clamp(x, 0.0f, static_cast<float>(w - 1));
    y = std::clamp(y, 0.0f, static_cast<float>(h - 1));
    const int x0 = static_cast<int>(x);
    const int y0 = static_cast<int>(y);
    const int x1 = std::min(x0 + 1, w - 1);
    const int y1 = std::min(y0 + 1, h - 1);
    const float fx = x - x0;
    const float fy = y - y0;
    return (1 - fy) * ((1 - fx) * at(x0, y0) + fx * at(x1, y0)) +
           fy * ((1 - fx) * at(x0, y1) + fx * at(x1, y1));
  }
};

Plane from_gray(const FloatImage& gray) {
  return Plane{gray.width(), gray.height(), gray.vector()};
}

Plane half(const Plane& src) {
  Plane dst{std::max(1, src.w / 2), std::max(1, src.h / 2), {}};
  dst.px.resize(static_cast<std::size_t>(dst.w) * dst.h);
  for (int y = 0; y < dst.h; ++y) {
    for (int x = 0; x < dst.w; ++x) {
      dst.px[static_cast<std::size_t>(y) * dst.w + x] =
          0.25f * (src.clamped(2 * x, 2 * y) + src.clamped(2 * x + 1, 2 * y) +
                   src.clamped(2 * x, 2 * y + 1) + src.clamped(2 * x + 1, 2 * y + 1));
    }
  }
  return dst;
}

std::vector<int> block_origins(int dim, int block, int stride) {
  std::vector<int> origins;
  for (int o = 0; o + block <= dim; o += stride) origins.push_back(o);
  if (origins.back() != dim - block) origins.push_back(dim - block);
  return origins;
}

struct Vec2 {
  float u = 0;
  float v = 0;
};

class BlockMatcher {
 public:
  BlockMatcher(const Plane& ref, const Plane& tgt, int block) : ref_(ref), tgt_(tgt), b_(block) {}

  double ssd(int ox, int oy, Vec2 d) const {
    double acc = 0;
    for (int y = oy; y < oy + b_; ++y) {
      for (int x = ox; x < ox + b_; ++x) {
        const double e = tgt_.bilinear(x + d.u, y + d.v) - ref_.at(x, y);
        acc += e * e;
      }
    }
    return acc;
  }

  double ssd_integer(int ox, int oy, int du, int dv) const {
    double acc = 0;
    for (int y = oy; y < oy + b_; ++y) {
      for (int x = ox; x < ox + b_; ++x) {
        const double e = tgt_.clamped(x + du, y + dv) - ref_.at(x, y);
        acc += e * e;
      }
    }
    return acc;
  }

  Vec2 match(int ox, int oy, Vec2 prior, int radius, int iterations) const {
    Vec2 best = prior;
    double best_cost = ssd(ox, oy, prior);

    const int cu = static_cast<int>(std::lround(prior.u));
    const int cv = static_cast<int>(std::lround(prior.v));
    for (int dv = -radius; dv <= radius; ++dv) {
      for (int du = -radius; du <= radius; ++du) {
        const double cost = ssd_integer(ox, oy, cu + du, cv + dv);
        if (cost < best_cost) {
          best_cost = cost;
          best = {static_cast<float>(cu + du), static_cast<float>(cv + dv)};
        }
      }
    }
    return refine(ox, oy, best, best_cost, iterations);
  }

 private:
  // Inverse-compositional Gauss-Newton on a pure translation.
  Vec2 refine(int ox, int oy, Vec2 start, double start_cost, int iterations) const {
    double hxx = 0, hxy = 0, hyy = 0;
    std::vector<float> gx(static_cast<std::size_t>(b_) * b_);
    std::vector<float> gy(gx.size());
    for (int y = 0; y < b_; ++y) {
      for (int x = 0; x < b_; ++x) {
        const int px = ox + x;
        const int py = oy + y;
        const float dx = 0.5f * (ref_.clamped(px + 1, py) - ref_.clamped(px - 1, py));
        const float dy = 0.5f * (ref_.clamped(px, py + 1) - ref_.clamped(px, py - 1));
        gx[static_cast<std::size_t>(y) * b_ + x] = dx;
        gy[static_cast<std::size_t>(y) * b_ + x] = dy;
        hxx += dx * dx;
        hxy += dx * dy;
        hyy += dy * dy;
      }
    }
    const double det = hxx * hyy - hxy * hxy;
    const double trace = hxx + hyy;
    if (!(det > 1e-6 * trace * trace) || trace < 1e-3) return start;

    Vec2 best = start;
    double best_cost = start_cost;
    Vec2 cur = start;
    for (int it = 0; it < iterations; ++it) {
      double bx = 0, by = 0, cost = 0;
      for (int y = 0; y < b_; ++y) {
        for (int x = 0; x < b_; ++x) {
          const double e = tgt_.bilinear(ox + x + cur.u, oy + y + cur.v) - ref_.at(ox + x, oy + y);
          bx += gx[static_cast<std::size_t>(y) * b_ + x] * e;
          by += gy[static_cast<std::size_t>(y) * b_ + x] * e;
          cost += e * e;
        }
      }
      if (cost < best_cost) {
        best_cost = cost;
        best = cur;
      }
      const double du = (hyy * bx - hxy * by) / det;
      const double dv = (hxx * by - hxy * bx) / det;
      cur.u -= static_cast<float>(std::clamp(du, -1.0, 1.0));
      cur.v -= static_cast<float>(std::clamp(dv, -1.0, 1.0));
      if (std::abs(du) < 1e-3 && std::abs(dv) < 1e-3) break;
    }
    const double final_cost = ssd(ox, oy, cur);
    if (final_cost < best_cost) best = cur;
    return best;
  }

  const Plane& ref_;
  const Plane& tgt_;
  int b_;
};

// Linear interpolation weights of coordinate p between sorted centers.
struct AxisWeight {
  int lo = 0;
  int hi = 0;
  float t = 0;
};

std::vector<AxisWeight> axis_weights(int dim, const std::vector<float>& centers) {
  std::vector<AxisWeight> out(dim);
  for (int p = 0; p < dim; ++p) {
    const float q = static_cast<float>(p);
    if (q <= centers.front()) {
      out[p] = {0, 0, 0};
    } else if (q >= centers.back()) {
      const int last = static_cast<int>(centers.size()) - 1;
      out[p] = {last, last, 0};
    } else {
      int k = 0;
      while (centers[k + 1] < q) ++k;
      out[p] = {k, k + 1, (q - centers[k]) / (centers[k + 1] - centers[k])};
    }
  }
  return out;
}

// One pyramid level: block matching around `prior`, densified to w x h.
std::vector<Vec2> solve_level(const Plane& ref, const Plane& tgt, const std::vector<Vec2>& prior,
                              int block, int radius, int iterations) {
  const int stride = std::max(1, block / 2);
  const auto ox = block_origins(ref.w, block, stride);
  const auto oy = block_origins(ref.h, block, stride);
  BlockMatcher matcher(ref, tgt, block);

  const std::size_t cols = ox.size();
  const std::size_t rows = oy.size();
  std::vector<Vec2> inits(cols * rows);
  for (std::size_t j = 0; j < rows; ++j) {
    for (std::size_t i = 0; i < cols; ++i) {
      Vec2 init;
      for (int y = oy[j]; y < oy[j] + block; ++y) {
        for (int x = ox[i]; x < ox[i] + block; ++x) {
          const auto& p = prior[static_cast<std::size_t>(y) * ref.w + x];
          init.u += p.u;
          init.v += p.v;
        }
      }
      const float n = static_cast<float>(block * block);
      init.u /= n;
      init.v /= n;
      inits[j * cols + i] = init;
    }
  }

  // Each block starts from whichever of its own and its 4-neighbors' priors
  // fits best, so an isolated coarse-level outlier cannot persist.
  std::vector<Vec2> blocks(cols * rows);
  for (std::size_t j = 0; j < rows; ++j) {
    for (std::size_t i = 0; i < cols; ++i) {
      Vec2 start = inits[j * cols + i];
      double start_cost = matcher.ssd(ox[i], oy[j], start);
      const std::pair<long, long> offsets[] = {{0, -1}, {-1, 0}, {1, 0}, {0, 1}};
      for (auto [di, dj] : offsets) {
        const long ni = static_cast<long>(i) + di;
        const long nj = static_cast<long>(j) + dj;
        if (ni < 0 || nj < 0 || ni >= static_cast<long>(cols) || nj >= static_cast<long>(rows)) continue;
        const Vec2 cand = inits[static_cast<std::size_t>(nj) * cols + static_cast<std::size_t>(ni)];
        const double cost = matcher.ssd(ox[i], oy[j], cand);
        if (cost < start_cost) {
          start_cost = cost;
          start = cand;
        }
      }
      blocks[j * cols + i] = matcher.match(ox[i], oy[j], start, radius, iterations);
    }
  }

  std::vector<float> cx(ox.size()), cy(oy.size());
  for (std::size_t i = 0; i < ox.size(); ++i) cx[i] = ox[i] + 0.5f * (block - 1);
  for (std::size_t j = 0; j < oy.size(); ++j) cy[j] = oy[j] + 0.5f * (block - 1);
  const auto wx = axis_weights(ref.w, cx);
  const auto wy = axis_weights(ref.h, cy);

  std::vector<Vec2> dense(static_cast<std::size_t>(ref.w) * ref.h);
  for (int y = 0; y < ref.h; ++y) {
    const auto& ay = wy[y];
    for (int x = 0; x < ref.w; ++x) {
      const auto& ax = wx[x];
      const Vec2& a = blocks[ay.lo * cols + ax.lo];
      const Vec2& b = blocks[ay.lo * cols + ax.hi];
      const Vec2& c = blocks[ay.hi * cols + ax.lo];
      const Vec2& d = blocks[ay.hi * cols + ax.hi];
      Vec2& out = dense[static_cast<std::size_t>(y) * ref.w + x];
      out.u = (1 - ay.t) * ((1 - ax.t) * a.u + ax.t * b.u) + ay.t * ((1 - ax.t) * c.u + ax.t * d.u);
      out.v = (1 - ay.t) * ((1 - ax.t) * a.v + ax.t * b.v) + ay.t * ((1 - ax.t) * c.v + ax.t * d.v);
    }
  }
  return dense;
}

std::vector<Vec2> upsample_flow(const std::vector<Vec2>& flow, int w, int h, int out_w,
                                int out_h) {
  Plane pu{w, h, std::vector<float>(flow.size())};
  Plane pv{w, h, std::vector<float>(flow.size())};
  for (std::size_t i = 0; i < flow.size(); ++i) {
    pu.px[i] = flow[i].u;
    pv.px[i] = flow[i].v;
  }
  const float sx = static_cast<float>(w) / out_w;
  const float sy = static_cast<float>(h) / out_h;
  std::vector<Vec2> out(static_cast<std::size_t>(out_w) * out_h);
  for (int y = 0; y < out_h; ++y) {
    for (int x = 0; x < out_w; ++x) {
      const float fx = (x + 0.5f) * sx - 0.5f;
      const float fy = (y + 0.5f) * sy - 0.5f;
      out[static_cast<std::size_t>(y) * out_w + x] = {pu.bilinear(fx, fy) / sx,
                                                      pv.bilinear(fx, fy) / sy};
    }
  }
  return out;
}

template <typename Sample>
Image<Sample> warp_impl(const Image<Sample>& image, const FlowField& flow) {
  if (image.width() != flow.width() || image.height() != flow.height()) {
    throw InvalidArgument("warp: flow " + std::to_string(flow.width()) + "x" +
                          std::to_string(flow.height()) + " does not match image " +
                          std::to_string(image.width()) + "x" + std::to_string(image.height()));
  }
  const int w = image.width();
  const int h = image.height();
  Image<Sample> out(w, h, image.channels());
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const double sx = std::clamp(x + static_cast<double>(flow.u(x, y)), 0.0, w - 1.0);
      const double sy = std::clamp(y + static_cast<double>(flow.v(x, y)), 0.0, h - 1.0);
      const int x0 = static_cast<int>(sx);
      const int y0 = static_cast<int>(sy);
      const int x1 = std::min(x0 + 1, w - 1);
      const int y1 = std::min(y0 + 1, h - 1);
      const double fx = sx - x0;
      const double fy = sy - y0;
      for (int c = 0; c < image.channels(); ++c) {
        const double value = (1 - fy) * ((1 - fx) * image.at(x0, y0, c) + fx * image.at(x1, y0, c)) +
                             fy * ((1 - fx) * image.at(x0, y1, c) + fx * image.at(x1, y1, c));
        if constexpr (std::is_same_v<Sample, std::uint8_t>) {
          out.at(x, y, c) = to_byte(value);
        } else {
          out.at(x, y, c) = static_cast<Sample>(value);
        }
      }
    }
  }
  return out;
}

}  // namespace

FlowField estimate_flow(const ByteImage& reference, const ByteImage& target,
                        const FlowParams& params) {
  params.validate();
  if (!reference.same_shape(target)) {
    throw InvalidArgument("estimate_flow: dimension mismatch " + std::to_string(reference.width()) +
                          "x" + std::to_string(reference.height()) + " vs " +
                          std::to_string(target.width()) + "x" + std::to_string(target.height()));
  }
  const int w = reference.width();
  const int h = reference.height();
  if (reference == target) return FlowField(w, h);

  std::vector<Plane> ref_pyr{from_gray(to_gray(reference))};
  std::vector<Plane> tgt_pyr{from_gray(to_gray(target))};
  while (static_cast<int>(ref_pyr.size()) < params.pyramid_levels) {
    const Plane& last = ref_pyr.back();
    if (std::min(last.w, last.h) / 2 < 2 * params.block_size) break;
    ref_pyr.push_back(half(last));
    tgt_pyr.push_back(half(tgt_pyr.back()));
  }

  std::vector<Vec2> flow;
  for (int level = static_cast<int>(ref_pyr.size()) - 1; level >= 0; --level) {
    const Plane& ref = ref_pyr[level];
    const Plane& tgt = tgt_pyr[level];
    const bool coarsest = level == static_cast<int>(ref_pyr.size()) - 1;
    if (coarsest) {
      flow.assign(static_cast<std::size_t>(ref.w) * ref.h, Vec2{});
    } else {
      const Plane& prev = ref_pyr[level + 1];
      flow = upsample_flow(flow, prev.w, prev.h, ref.w, ref.h);
    }
    const int block = std::min({params.block_size, ref.w, ref.h});
    const int radius = coarsest ? params.search_radius_coarsest : 1;
    flow = solve_level(ref, tgt, flow, block, radius, params.iterations_per_level);
  }

  FlowField out(w, h);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const Vec2& d = flow[static_cast<std::size_t>(y) * w + x];
      out.set(x, y, std::isfinite(d.u) ? d.u : 0.0f, std::isfinite(d.v) ? d.v : 0.0f);
    }
  }
  return out;
}

double mean_abs_flow(const FlowField& flow) {
  const auto& uv = flow.components();
  if (uv.empty()) return 0.0;
  double total = 0.0;
  for (std::size_t i = 0; i < uv.size(); i += 2) {
    total += std::hypot(static_cast<double>(uv[i]), static_cast<double>(uv[i + 1]));
  }
  return total / static_cast<double>(uv.size() / 2);
}

ByteImage warp(const ByteImage& image, const FlowField& flow) { return warp_impl(image, flow); }

FloatImage warp(const FloatImage& image, const FlowField& flow) { return warp_impl(image, flow); }

}  // namespace vsrboost
