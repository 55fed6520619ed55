#include <random>

#include "doctest.h"
#include "support/fixtures.hpp"
#include "vsrboost/grid.hpp"
#include "vsrboost/metrics.hpp"
#include "vsrboost/resample.hpp"

using namespace vsrboost;

namespace {

// Origins per axis by direct enumeration: k*stride while the tile fits,
// then the clamped last origin.
std::vector<int> enumerate_origins(int dim, int patch, int stride) {
  std::vector<int> out;
  for (int k = 0; k * stride + patch <= dim; ++k) out.push_back(k * stride);
  if (out.back() != dim - patch) out.push_back(dim - patch);
  return out;
}

}  // namespace

TEST_CASE("build_grid examples") {
  auto g1 = build_grid(64, 64, 64, 56);
  CHECK(g1.origins_x() == std::vector<int>{0});
  CHECK(g1.size() == 1);

  auto g2 = build_grid(184, 184, 64, 56);
  CHECK(g2.origins_x() == std::vector<int>{0, 56, 112, 120});
  CHECK(g2.origins_y() == std::vector<int>{0, 56, 112, 120});
  CHECK(g2.size() == 16);

  auto g3 = build_grid(120, 120, 64, 56);
  CHECK(g3.origins_x() == std::vector<int>{0, 56});
  CHECK(g3.size() == 4);
  CHECK(g3.overlap() == 8);
}

TEST_CASE("build_grid errors") {
  CHECK_THROWS_WITH_AS(build_grid(63, 64, 64, 56), doctest::Contains("frame too small"),
                       InvalidArgument);
  CHECK_THROWS_AS(build_grid(64, 64, 64, 0), InvalidArgument);
  CHECK_THROWS_AS(build_grid(64, 64, 32, 33), InvalidArgument);
}

TEST_CASE("grid coverage and ordering over many sizes") {
  std::mt19937 rng(7);
  for (int trial = 0; trial < 200; ++trial) {
    const int patch = std::uniform_int_distribution<int>(4, 40)(rng);
    const int stride = std::uniform_int_distribution<int>(1, patch)(rng);
    const int w = std::uniform_int_distribution<int>(patch, 150)(rng);
    const int h = std::uniform_int_distribution<int>(patch, 150)(rng);
    const auto g = build_grid(w, h, patch, stride);
    REQUIRE(g.origins_x() == enumerate_origins(w, patch, stride));
    REQUIRE(g.origins_y() == enumerate_origins(h, patch, stride));
    std::vector<int> covered(static_cast<std::size_t>(w) * h, 0);
    for (std::size_t i = 0; i < g.size(); ++i) {
      auto [x, y] = g.origin(i);
      REQUIRE(x + patch <= w);
      REQUIRE(y + patch <= h);
      if (i > 0) {
        auto [px, py] = g.origin(i - 1);
        REQUIRE((py < y || (py == y && px < x)));
      }
      for (int yy = y; yy < y + patch; ++yy)
        for (int xx = x; xx < x + patch; ++xx) covered[static_cast<std::size_t>(yy) * w + xx] = 1;
    }
    REQUIRE(std::all_of(covered.begin(), covered.end(), [](int c) { return c == 1; }));
  }
}

TEST_CASE("decompose examples") {
  const Frame f = fixtures::random_frame(64, 64, 3, 1);
  const auto single = decompose(f, build_grid(64, 64, 64, 56));
  REQUIRE(single.size() == 1);
  CHECK(single[0].image == f.image());

  const Frame constant(120, 120, 3, 7);
  const auto four = decompose(constant, build_grid(120, 120, 64, 56));
  REQUIRE(four.size() == 4);
  for (const auto& p : four) {
    CHECK(std::all_of(p.image.samples().begin(), p.image.samples().end(),
                      [](std::uint8_t s) { return s == 7; }));
  }

  Frame ramp(184, 184, 1);
  for (int y = 0; y < 184; ++y)
    for (int x = 0; x < 184; ++x) ramp.at(x, y) = static_cast<std::uint8_t>((x + 3 * y) % 256);
  const auto grid = build_grid(184, 184, 64, 56);
  const auto patches = decompose(ramp, grid);
  const auto& last = patches.back();
  CHECK(last.x == 120);
  CHECK(last.y == 120);
  for (int y = 0; y < 64; ++y)
    for (int x = 0; x < 64; ++x) REQUIRE(last.image.at(x, y) == ramp.at(120 + x, 120 + y));

  CHECK_THROWS_AS(decompose(Frame(100, 100, 1), grid), InvalidArgument);
}

TEST_CASE("recombine averages overlaps") {
  const auto grid = build_grid(120, 64, 64, 56);
  REQUIRE(grid.size() == 2);
  std::vector<Patch> patches{{ByteImage(64, 64, 1, 0), 0, 0, 0}, {ByteImage(64, 64, 1, 2), 56, 0, 1}};
  const auto out = recombine(patches, grid, 120, 64);
  CHECK(out.at(10, 5) == 0);
  for (int x = 56; x < 64; ++x) CHECK(out.at(x, 30) == 1);
  CHECK(out.at(100, 5) == 2);
}

TEST_CASE("recombine rejects holes and inconsistent sizes") {
  const auto grid = build_grid(120, 64, 64, 56);
  std::vector<Patch> one{{ByteImage(64, 64, 1, 0), 0, 0, 0}};
  CHECK_THROWS_WITH_AS(recombine(one, grid, 120, 64), doctest::Contains("coverage hole"),
                       InvalidArgument);
  std::vector<Patch> mixed{{ByteImage(64, 64, 1, 0), 0, 0, 0}, {ByteImage(32, 32, 1, 0), 56, 0, 1}};
  CHECK_THROWS_AS(recombine(mixed, grid, 120, 64), InvalidArgument);
}

TEST_CASE("recombine of decompose is identity (property)") {
  std::mt19937 rng(11);
  for (int trial = 0; trial < 40; ++trial) {
    const int w = std::uniform_int_distribution<int>(64, 200)(rng);
    const int h = std::uniform_int_distribution<int>(64, 200)(rng);
    const int c = trial % 2 ? 3 : 1;
    const Frame f = fixtures::random_frame(w, h, c, 100 + trial);
    const auto grid = build_grid(w, h, 64, 56);
    REQUIRE(recombine(decompose(f, grid), grid, w, h) == f.image());
  }
}

TEST_CASE("per-patch nearest upscale recombines to whole-frame nearest") {
  const Frame f = fixtures::random_frame(184, 184, 3, 5);
  const auto grid = build_grid(184, 184, 64, 56);
  auto patches = decompose(f, grid);
  for (auto& p : patches) {
    p.image = resample_nearest(p.image, Scale::up(4));
    p.x *= 4;
    p.y *= 4;
  }
  const auto out = recombine(patches, grid, 736, 736);
  CHECK(out == fixtures::replicate_upscale(f, 4));
}

TEST_CASE("resample keeps constants and identity") {
  const Frame constant(37, 23, 3, 201);
  for (Scale s : {Scale::up(4), Scale::down(4), Scale{3, 2}, Scale{2, 3}}) {
    for (auto kernel : {ResampleKernel::cubic, ResampleKernel::lanczos3, ResampleKernel::nearest}) {
      const auto out = resample(constant, s, {kernel});
      CHECK(out.width() == s.apply(37));
      CHECK(out.height() == s.apply(23));
      CHECK(std::all_of(out.samples().begin(), out.samples().end(),
                        [](std::uint8_t v) { return v == 201; }));
    }
  }
  const Frame f = fixtures::random_frame(31, 17, 3, 2);
  CHECK(resample_bicubic(f, Scale{1, 1}) == f.image());
  CHECK(resample_bicubic(f, Scale{3, 3}) == f.image());
  CHECK_THROWS_AS(resample_bicubic(f, Scale{0, 1}), InvalidArgument);
  CHECK_THROWS_AS(resample_bicubic(f, Scale{-4, 1}), InvalidArgument);
}

TEST_CASE("nearest upscale is pixel replication") {
  const Frame f = fixtures::random_frame(9, 7, 3, 3);
  CHECK(resample_nearest(f, Scale::up(4)) == fixtures::replicate_upscale(f, 4));
}

TEST_CASE("bicubic upscale matches hand-computed Catmull-Rom taps") {
  // 1-D row [0, 100, 200, 100]: output pixel 6 of a x4 upscale samples source
  // coordinate (6.5 / 4) - 0.5 = 1.125, taps at 0..3 with offsets
  // 1.125, 0.125, 0.875, 1.875.
  ByteImage row(4, 1, 1, std::vector<std::uint8_t>{0, 100, 200, 100});
  auto w = [](double t) {
    const double a = -0.5;
    t = std::abs(t);
    return t < 1 ? (a + 2) * t * t * t - (a + 3) * t * t + 1
                 : a * t * t * t - 5 * a * t * t + 8 * a * t - 4 * a;
  };
  const double expected = w(1.125) * 0 + w(0.125) * 100 + w(0.875) * 200 + w(1.875) * 100;
  const auto out = resample_bicubic(row, Scale::up(4));
  CHECK(out.at(6, 0) == to_byte(expected));
}

TEST_CASE("bicubic x4 then /4 round trip baseline") {
  const ByteImage fixture(4, 4, 1,
                          std::vector<std::uint8_t>{10, 40, 80, 120, 30, 60, 100, 140, 50, 90,
                                                    130, 170, 70, 110, 150, 200});
  const auto round_trip = resample_bicubic(resample_bicubic(fixture, Scale::up(4)), Scale::down(4));
  CHECK(round_trip.width() == 4);
  const double value = psnr(round_trip, fixture);
  CHECK(value >= 40.0);
  CHECK(value == doctest::Approx(60.172003435238352).epsilon(1e-9));
}

TEST_CASE("psnr closed forms") {
  const Frame zeros(16, 16, 3, 0);
  const Frame full(16, 16, 3, 255);
  const Frame ones(16, 16, 3, 1);
  CHECK(psnr(zeros, zeros) == 99.0);
  CHECK(psnr(zeros, full) == doctest::Approx(0.0));
  CHECK(psnr(zeros, ones) == doctest::Approx(20.0 * std::log10(255.0)));
  CHECK(psnr(zeros, ones) == doctest::Approx(48.13).epsilon(0.0003));
  CHECK_THROWS_AS(psnr(zeros, Frame(16, 15, 3)), InvalidArgument);
  CHECK_THROWS_AS(psnr(zeros, Frame(16, 16, 1)), InvalidArgument);
}

TEST_CASE("psnr symmetric and decreasing in noise amplitude") {
  const Frame base(32, 32, 3, 128);
  double previous = 99.0;
  for (int amp = 1; amp <= 40; amp += 3) {
    Frame noisy = base;
    std::mt19937 rng(amp);
    for (auto& s : noisy.samples()) s = static_cast<std::uint8_t>(128 + (rng() % 2 ? amp : -amp));
    const double forward = psnr(base, noisy);
    CHECK(forward == psnr(noisy, base));
    CHECK(forward < previous);
    previous = forward;
  }
}

TEST_CASE("ssim") {
  const Frame tex = fixtures::random_frame(64, 64, 3, 9);
  CHECK(ssim(tex, tex) == 1.0);
  const Frame constant(32, 32, 1, 77);
  CHECK(ssim(constant, constant) == 1.0);

  Frame inverted = tex;
  for (auto& s : inverted.samples()) s = static_cast<std::uint8_t>(255 - s);
  const double inv = ssim(tex, inverted);
  CHECK(inv < 0.2);
  CHECK(inv == doctest::Approx(-0.97077131810425799).epsilon(1e-9));

  CHECK_THROWS_AS(ssim(Frame(7, 7, 1), Frame(7, 7, 1)), InvalidArgument);
  CHECK_THROWS_AS(ssim(tex, Frame(64, 63, 3)), InvalidArgument);
}
