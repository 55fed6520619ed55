#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "vsrboost/image.hpp"

namespace vsrboost {

namespace fs = std::filesystem;

/// 8-bit PNG. Palette and sub-byte gray are expanded; alpha is dropped.
Frame read_png(const fs::path& path);
void write_png(const fs::path& path, const ByteImage& image);

/// Binary PPM (P6) and PGM (P5), maxval 255.
Frame read_pnm(const fs::path& path);
void write_pnm(const fs::path& path, const ByteImage& image);

struct Y4mHeader {
  int width = 0;
  int height = 0;
  std::string colorspace = "420jpeg";
  std::string frame_rate = "30:1";
};

/// YUV4MPEG2 with C444, C420* or Cmono. Color input is converted with
/// limited-range BT.601; 4:2:0 chroma is replicated to full size. Mono
/// planes are returned as one-channel frames, unchanged.
std::vector<Frame> read_y4m(const fs::path& path, Y4mHeader* header = nullptr);
/// Three-channel frames are written as C444, one-channel frames as Cmono.
void write_y4m(const fs::path& path, const std::vector<Frame>& frames,
               const std::string& frame_rate = "30:1");

Frame read_image(const fs::path& path);

/// A directory of numbered PNG/PPM/PGM files in numeric order, or one Y4M.
std::vector<Frame> load_sequence(const fs::path& path);

enum class ImageFormat { png, ppm };

/// Writes frames as 000000.png, 000001.png, ... (or .ppm/.pgm), or a single
/// Y4M file when `path` ends in ".y4m".
void save_sequence(const fs::path& path, const std::vector<Frame>& frames,
                   ImageFormat format = ImageFormat::png);

struct LrManifest {
  std::string kernel = "bicubic";
  double cubic_a = -0.5;
  int scale = 4;
  std::size_t frame_count = 0;
  int gt_width = 0;
  int gt_height = 0;
  int lr_width = 0;
  int lr_height = 0;

  bool operator==(const LrManifest&) const = default;
};

nlohmann::json to_json(const LrManifest& manifest);
LrManifest manifest_from_json(const nlohmann::json& j);

struct PreparedSet {
  std::vector<Frame> lr;
  LrManifest manifest;
};

/// Bicubic 1/scale downsampling of every frame.
PreparedSet prepare_lr(const std::vector<Frame>& gt, int scale);

/// Loads GT from `in`, writes LR frames and manifest.json into `out`.
LrManifest prepare_dataset(const fs::path& in, const fs::path& out, int scale,
                           ImageFormat format = ImageFormat::png);
LrManifest load_manifest(const fs::path& path);

std::string read_text(const fs::path& path);
void write_text(const fs::path& path, const std::string& text);

}  // namespace vsrboost
