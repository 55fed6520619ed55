#pragma once

// Synthetic fixtures and brute-force oracles shared by the test suites.
// Nothing here calls into the code paths the tests check.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <vector>

#include "vsrboost/image.hpp"

namespace fixtures {

using vsrboost::ByteImage;
using vsrboost::Frame;

inline Frame random_frame(int w, int h, int c, std::uint32_t seed) {
  std::mt19937 rng(seed);
  std::uniform_int_distribution<int> dist(0, 255);
  std::vector<std::uint8_t> data(static_cast<std::size_t>(w) * h * c);
  for (auto& s : data) s = static_cast<std::uint8_t>(dist(rng));
  return Frame(w, h, c, std::move(data));
}

// Band-limited random texture: noise box-blurred with wraparound so the
// result tiles seamlessly and circular shifts stay consistent.
inline Frame textured_frame(int w, int h, int c, std::uint32_t seed, int blur = 1) {
  const Frame noise = random_frame(w, h, c, seed);
  Frame out(w, h, c);
  const int n = (2 * blur + 1) * (2 * blur + 1);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      for (int ch = 0; ch < c; ++ch) {
        int acc = 0;
        for (int dy = -blur; dy <= blur; ++dy) {
          for (int dx = -blur; dx <= blur; ++dx) {
            acc += noise.at((x + dx + w) % w, (y + dy + h) % h, ch);
          }
        }
        // Stretch contrast back toward the full range.
        const double v = 128.0 + 2.5 * (static_cast<double>(acc) / n - 127.5);
        out.at(x, y, ch) = static_cast<std::uint8_t>(std::clamp(std::lround(v), 0L, 255L));
      }
    }
  }
  return out;
}

// target(x + dx, y + dy) == source(x, y), wrapping around.
inline Frame circular_shift(const ByteImage& src, int dx, int dy) {
  Frame out(src.width(), src.height(), src.channels());
  const int w = src.width();
  const int h = src.height();
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      for (int c = 0; c < src.channels(); ++c) {
        out.at(((x + dx) % w + w) % w, ((y + dy) % h + h) % h, c) = src.at(x, y, c);
      }
    }
  }
  return out;
}

struct IntShift {
  int dx = 0;
  int dy = 0;
};

// Exhaustive integer search: displacement d minimizing
// sum (target(p + d) - reference(p))^2 over pixels whose match stays inside.
inline IntShift block_matching_oracle(const ByteImage& reference, const ByteImage& target,
                                      int radius) {
  IntShift best;
  double best_cost = std::numeric_limits<double>::infinity();
  const int w = reference.width();
  const int h = reference.height();
  for (int dy = -radius; dy <= radius; ++dy) {
    for (int dx = -radius; dx <= radius; ++dx) {
      double cost = 0;
      long count = 0;
      for (int y = radius; y < h - radius; ++y) {
        for (int x = radius; x < w - radius; ++x) {
          for (int c = 0; c < reference.channels(); ++c) {
            const double e = double(target.at(x + dx, y + dy, c)) - reference.at(x, y, c);
            cost += e * e;
          }
          ++count;
        }
      }
      cost /= static_cast<double>(count);
      if (cost < best_cost) {
        best_cost = cost;
        best = {dx, dy};
      }
    }
  }
  return best;
}

// Nearest-neighbor integer upscale computed by direct index replication.
inline ByteImage replicate_upscale(const ByteImage& src, int factor) {
  ByteImage out(src.width() * factor, src.height() * factor, src.channels());
  for (int y = 0; y < out.height(); ++y) {
    for (int x = 0; x < out.width(); ++x) {
      for (int c = 0; c < src.channels(); ++c) out.at(x, y, c) = src.at(x / factor, y / factor, c);
    }
  }
  return out;
}

inline int max_abs_diff(const ByteImage& a, const ByteImage& b) {
  int m = 0;
  for (std::size_t i = 0; i < a.samples().size(); ++i) {
    m = std::max(m, std::abs(int(a.samples()[i]) - int(b.samples()[i])));
  }
  return m;
}

// Camera pan over a larger texture: frame t is the window at a
// pseudo-random offset, so every consecutive pair differs by a few pixels.
inline std::vector<Frame> panning_video(int n, int w, int h, int c, std::uint32_t seed) {
  const int margin = 24;
  const Frame base = textured_frame(w + margin, h + margin, c, seed);
  std::vector<Frame> out;
  for (int t = 0; t < n; ++t) {
    const int ox = (5 * t + 3 * (t % 3)) % margin;
    const int oy = (3 * t + 2 * (t % 4)) % margin;
    Frame f(w, h, c, 0, t);
    for (int y = 0; y < h; ++y) {
      for (int x = 0; x < w; ++x) {
        for (int ch = 0; ch < c; ++ch) f.at(x, y, ch) = base.at(x + ox, y + oy, ch);
      }
    }
    out.push_back(std::move(f));
  }
  return out;
}

}  // namespace fixtures
