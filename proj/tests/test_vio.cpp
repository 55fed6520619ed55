#include <doctest.h>

#include <cmath>
#include <fstream>
#include <random>

#include "support/fixtures.hpp"
#include "vsrboost/config.hpp"
#include "vsrboost/errors.hpp"
#include "vsrboost/vio.hpp"

using namespace vsrboost;

namespace {

struct TempDir {
  fs::path path;
  TempDir() {
    static int counter = 0;
    path = fs::temp_directory_path() /
           ("vsrboost_vio_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

void write_raw(const fs::path& p, const std::string& header, const std::vector<std::uint8_t>& body) {
  std::ofstream out(p, std::ios::binary);
  out << header;
  out.write(reinterpret_cast<const char*>(body.data()), static_cast<std::streamsize>(body.size()));
}

std::vector<std::uint8_t> planes(std::size_t n, std::uint8_t y, std::size_t nc, std::uint8_t u, std::uint8_t v) {
  std::vector<std::uint8_t> out(n, y);
  out.insert(out.end(), nc, u);
  out.insert(out.end(), nc, v);
  return out;
}

// Textbook limited-range BT.601 inverse with the usual rounded coefficients.
std::array<double, 3> yuv_oracle(double y, double u, double v) {
  return {1.164 * (y - 16) + 1.596 * (v - 128),
          1.164 * (y - 16) - 0.392 * (u - 128) - 0.813 * (v - 128),
          1.164 * (y - 16) + 2.017 * (u - 128)};
}

}  // namespace

TEST_CASE("PNG and PPM round trips are lossless") {
  TempDir dir;
  for (int c : {1, 3}) {
    const auto f = fixtures::random_frame(37, 23, c, 5 + c);
    write_png(dir.path / "a.png", f);
    CHECK(read_png(dir.path / "a.png") == f);
    write_pnm(dir.path / "a.ppm", f);
    const auto back = read_pnm(dir.path / "a.ppm");
    CHECK(back == f);
    CHECK(back.channels() == c);
  }
}

TEST_CASE("PNM header with comments") {
  TempDir dir;
  write_raw(dir.path / "c.ppm", "P6\n# made by hand\n2 1\n# another\n255\n", {1, 2, 3, 4, 5, 6});
  const auto f = read_pnm(dir.path / "c.ppm");
  CHECK(f.width() == 2);
  CHECK(f.at(1, 0, 2) == 6);
}

TEST_CASE("unsupported and broken images") {
  TempDir dir;
  write_raw(dir.path / "deep.ppm", "P6\n1 1\n65535\n", {0, 0, 0, 0, 0, 0});
  CHECK_THROWS_WITH_AS(read_pnm(dir.path / "deep.ppm"), doctest::Contains("bit depth"), IoError);
  write_raw(dir.path / "short.ppm", "P6\n4 4\n255\n", {1, 2, 3});
  CHECK_THROWS_WITH_AS(read_pnm(dir.path / "short.ppm"), doctest::Contains("short.ppm"), IoError);
  write_raw(dir.path / "bad.png", "not a png", {});
  CHECK_THROWS_WITH_AS(read_png(dir.path / "bad.png"), doctest::Contains("bad.png"), IoError);
  CHECK_THROWS_AS(read_image(dir.path / "missing.png"), IoError);
}

TEST_CASE("directory sequences load in numeric order") {
  TempDir dir;
  std::vector<Frame> frames;
  for (int k = 0; k < 3; ++k) frames.push_back(fixtures::random_frame(8, 8, 3, static_cast<std::uint32_t>(k)));
  write_png(dir.path / "frame_10.png", frames[2]);
  write_png(dir.path / "frame_2.png", frames[1]);
  write_pnm(dir.path / "frame_001.ppm", frames[0]);
  write_raw(dir.path / "notes.txt", "ignored", {});
  const auto loaded = load_sequence(dir.path);
  REQUIRE(loaded.size() == 3);
  for (int k = 0; k < 3; ++k) {
    CHECK(loaded[k] == frames[k]);
    CHECK(loaded[k].index() == k);
  }
}

TEST_CASE("two PNG files give two frames in order") {
  TempDir dir;
  const Frame a(4, 4, 3, 10);
  const Frame b(4, 4, 3, 20);
  write_png(dir.path / "000.png", a);
  write_png(dir.path / "001.png", b);
  const auto loaded = load_sequence(dir.path);
  REQUIRE(loaded.size() == 2);
  CHECK(loaded[0] == a);
  CHECK(loaded[1] == b);
}

TEST_CASE("mixed frame sizes name both sizes") {
  TempDir dir;
  write_png(dir.path / "0.png", Frame(64, 64, 3));
  write_png(dir.path / "1.png", Frame(32, 32, 3));
  CHECK_THROWS_WITH_AS(load_sequence(dir.path),
                       doctest::Contains("64x64"), IoError);
  CHECK_THROWS_WITH_AS(load_sequence(dir.path),
                       doctest::Contains("32x32"), IoError);
}

TEST_CASE("sequence errors") {
  TempDir dir;
  CHECK_THROWS_AS(load_sequence(dir.path), IoError);
  CHECK_THROWS_AS(load_sequence(dir.path / "nope"), IoError);
  write_png(dir.path / "3.png", Frame(2, 2, 1));
  write_pnm(dir.path / "03.pgm", Frame(2, 2, 1));
  CHECK_THROWS_WITH_AS(load_sequence(dir.path), doctest::Contains("twice"), IoError);
}

TEST_CASE("save and load sequences") {
  TempDir dir;
  std::vector<Frame> frames;
  for (int k = 0; k < 12; ++k) frames.push_back(fixtures::random_frame(9, 7, 3, static_cast<std::uint32_t>(k)));
  save_sequence(dir.path / "png", frames);
  save_sequence(dir.path / "ppm", frames, ImageFormat::ppm);
  CHECK(load_sequence(dir.path / "png") == frames);
  CHECK(load_sequence(dir.path / "ppm") == frames);
  CHECK(fs::exists(dir.path / "png" / "000011.png"));
}

TEST_CASE("Y4M C444 header parse") {
  TempDir dir;
  const auto body = planes(64 * 64, 235, 64 * 64, 128, 128);
  write_raw(dir.path / "a.y4m", "YUV4MPEG2 W64 H64 F30:1 C444\nFRAME\n", body);
  Y4mHeader hdr;
  const auto frames = read_y4m(dir.path / "a.y4m", &hdr);
  REQUIRE(frames.size() == 1);
  CHECK(hdr.width == 64);
  CHECK(hdr.frame_rate == "30:1");
  CHECK(frames[0].width() == 64);
  CHECK(frames[0].height() == 64);
  CHECK(frames[0].channels() == 3);
  CHECK(frames[0].at(10, 10, 0) == 255);
  CHECK(frames[0].at(10, 10, 2) == 255);
}

TEST_CASE("Y4M 4:2:0 conversion matches the BT.601 formula") {
  TempDir dir;
  std::mt19937 rng(4);
  // 6x4 luma, 3x2 chroma, two frames.
  std::string stream = "YUV4MPEG2 W6 H4 F25:1 Ip C420jpeg XYSCSS=420JPEG\n";
  std::vector<std::vector<std::uint8_t>> raw;
  std::ofstream out(dir.path / "c.y4m", std::ios::binary);
  out << stream;
  for (int f = 0; f < 2; ++f) {
    std::vector<std::uint8_t> body(24 + 6 + 6);
    for (auto& b : body) b = static_cast<std::uint8_t>(16 + rng() % 220);
    out << "FRAME\n";
    out.write(reinterpret_cast<const char*>(body.data()), static_cast<std::streamsize>(body.size()));
    raw.push_back(body);
  }
  out.close();
  const auto frames = read_y4m(dir.path / "c.y4m");
  REQUIRE(frames.size() == 2);
  for (int f = 0; f < 2; ++f) {
    for (int y = 0; y < 4; ++y) {
      for (int x = 0; x < 6; ++x) {
        const int ci = (y / 2) * 3 + x / 2;
        const auto rgb = yuv_oracle(raw[f][y * 6 + x], raw[f][24 + ci], raw[f][30 + ci]);
        for (int c = 0; c < 3; ++c) {
          CHECK(std::abs(frames[f].at(x, y, c) - std::clamp(rgb[c], 0.0, 255.0)) <= 1.0);
        }
      }
    }
  }
}

TEST_CASE("Y4M odd sizes, mono, and errors") {
  TempDir dir;
  write_raw(dir.path / "odd.y4m", "YUV4MPEG2 W3 H3 C420\nFRAME\n", planes(9, 16, 4, 128, 128));
  const auto odd = read_y4m(dir.path / "odd.y4m");
  REQUIRE(odd.size() == 1);
  CHECK(odd[0].width() == 3);
  CHECK(odd[0].at(2, 2, 1) == 0);

  write_raw(dir.path / "deep.y4m", "YUV4MPEG2 W2 H2 C420p10\nFRAME\n", std::vector<std::uint8_t>(12));
  CHECK_THROWS_WITH_AS(read_y4m(dir.path / "deep.y4m"), doctest::Contains("bit depth"), IoError);
  write_raw(dir.path / "trunc.y4m", "YUV4MPEG2 W4 H4 C444\nFRAME\n", std::vector<std::uint8_t>(20));
  CHECK_THROWS_WITH_AS(read_y4m(dir.path / "trunc.y4m"), doctest::Contains("truncated"), IoError);
  write_raw(dir.path / "sig.y4m", "YUV4MPEG W4 H4\n", {});
  CHECK_THROWS_AS(read_y4m(dir.path / "sig.y4m"), IoError);

  std::vector<Frame> gray;
  for (int k = 0; k < 3; ++k) gray.push_back(fixtures::random_frame(5, 4, 1, static_cast<std::uint32_t>(k)));
  save_sequence(dir.path / "g.y4m", gray);
  CHECK(load_sequence(dir.path / "g.y4m") == gray);
}

TEST_CASE("Y4M RGB round trip stays within conversion error") {
  TempDir dir;
  std::vector<Frame> frames{fixtures::textured_frame(16, 8, 3, 1), fixtures::textured_frame(16, 8, 3, 2)};
  // Keep colors inside the gamut both directions can represent.
  for (auto& f : frames) {
    for (auto& s : f.samples()) s = static_cast<std::uint8_t>(40 + s / 2);
  }
  save_sequence(dir.path / "v.y4m", frames);
  const auto back = load_sequence(dir.path / "v.y4m");
  REQUIRE(back.size() == 2);
  for (std::size_t k = 0; k < 2; ++k) CHECK(fixtures::max_abs_diff(back[k], frames[k]) <= 2);
}

TEST_CASE("prepare_lr") {
  const std::vector<Frame> gt{fixtures::random_frame(256, 256, 3, 1), Frame(256, 256, 3, 77)};
  const auto set = prepare_lr(gt, 4);
  CHECK(set.lr[0].width() == 64);
  CHECK(set.lr[0].height() == 64);
  CHECK(set.lr[1] == Frame(64, 64, 3, 77));
  CHECK(set.manifest.lr_width == 64);
  CHECK(set.manifest.gt_width == 256);
  CHECK(set.manifest.frame_count == 2);
  CHECK(set.manifest.kernel == "bicubic");
  CHECK(prepare_lr(gt, 4).lr == set.lr);
  CHECK_THROWS_AS(prepare_lr({Frame(10, 8, 1)}, 4), InvalidArgument);
}

TEST_CASE("prepare_dataset writes frames and a manifest that loads back") {
  TempDir dir;
  std::vector<Frame> gt;
  for (int k = 0; k < 3; ++k) gt.push_back(fixtures::textured_frame(32, 16, 3, static_cast<std::uint32_t>(k)));
  save_sequence(dir.path / "gt", gt);
  const auto manifest = prepare_dataset(dir.path / "gt", dir.path / "lr", 2);
  CHECK(load_manifest(dir.path / "lr") == manifest);
  CHECK(manifest_from_json(to_json(manifest)) == manifest);
  const auto lr = load_sequence(dir.path / "lr");
  CHECK(lr == prepare_lr(gt, 2).lr);
}

TEST_CASE("run config defaults and parsing") {
  const auto d = run_config_from_json(nlohmann::json::object());
  CHECK(d.gamma_routing == 1.0);
  CHECK(d.gamma_pdp == 0.2);
  CHECK(d.patch_size == 64);
  CHECK(d.stride == 56);
  CHECK(d.scale == 4);
  CHECK(d.hidden_channels == 4);
  CHECK_FALSE(d.backend.has_value());

  const auto c = run_config_from_json(nlohmann::json::parse(R"({
    "scale": 2, "stride": 48, "flow": {"block_size": 6}, "cost_weights": {"L1": 0.1},
    "backend": "127.0.0.1:7000", "seed": 9})"));
  CHECK(c.scale == 2);
  CHECK(c.flow.block_size == 6);
  CHECK(c.cost_weights.l1 == 0.1);
  CHECK(c.cost_weights.l5 == 1.0);
  REQUIRE(c.backend.has_value());
  CHECK(c.backend->port == 7000);
  CHECK(c.seed == 9);

  const auto again = run_config_from_json(to_json(c));
  CHECK(to_json(again) == to_json(c));
}

TEST_CASE("run config rejects unknown keys and bad values") {
  using nlohmann::json;
  CHECK_THROWS_WITH_AS(run_config_from_json(json::parse(R"({"gama_pdp": 0.3})")),
                       doctest::Contains("gama_pdp"), InvalidArgument);
  CHECK_THROWS_WITH_AS(run_config_from_json(json::parse(R"({"flow": {"levels": 3}})")),
                       doctest::Contains("flow.levels"), InvalidArgument);
  CHECK_THROWS_AS(run_config_from_json(json::parse(R"({"scale": 3})")), InvalidArgument);
  CHECK_THROWS_AS(run_config_from_json(json::parse(R"({"stride": 65})")), InvalidArgument);
  CHECK_THROWS_AS(run_config_from_json(json::parse(R"({"alpha": 1.5})")), InvalidArgument);
  CHECK_THROWS_AS(run_config_from_json(json::parse(R"({"scale": "4"})")), InvalidArgument);
  CHECK_THROWS_AS(run_config_from_json(json::parse(R"([1, 2])")), InvalidArgument);
  CHECK_THROWS_AS(run_config_from_json(json::parse(R"({"backend": "nohost"})")), InvalidArgument);
}

TEST_CASE("pipeline spec from config") {
  auto c = run_config_from_json(nlohmann::json::parse(R"({"gamma_routing": 2.0, "alpha": 0.25})"));
  const auto spec = make_pipeline_spec(c, PipelineKind::boosted_frame);
  CHECK(spec.detection.gamma == 2.0);
  CHECK(spec.alpha == 0.25f);
  CHECK(spec.backend == nullptr);
  c.backend = Endpoint{"127.0.0.1", 1};
  CHECK(make_pipeline_spec(c, PipelineKind::boosted_video).backend != nullptr);
}
