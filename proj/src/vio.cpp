#include "vsrboost/vio.hpp"

#include <png.h>

#include <algorithm>
#include <cctype>
#include <cstring>
#include <fstream>
#include <optional>
#include <sstream>

#include "vsrboost/errors.hpp"
#include "vsrboost/parallel.hpp"
#include "vsrboost/resample.hpp"

namespace vsrboost {
namespace {

std::string size_string(const ByteImage& f) {
  return std::to_string(f.width()) + "x" + std::to_string(f.height());
}

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
  return s;
}

std::vector<std::uint8_t> read_bytes(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

std::ofstream open_out(const fs::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  return out;
}

// PNM header token, skipping whitespace and comments.
std::string pnm_token(const std::vector<std::uint8_t>& bytes, std::size_t& pos) {
  while (pos < bytes.size()) {
    if (bytes[pos] == '#') {
      while (pos < bytes.size() && bytes[pos] != '\n') ++pos;
    } else if (std::isspace(bytes[pos])) {
      ++pos;
    } else {
      break;
    }
  }
  std::string tok;
  while (pos < bytes.size() && !std::isspace(bytes[pos])) tok += static_cast<char>(bytes[pos++]);
  return tok;
}

int parse_positive(const std::string& text, const std::string& what, const fs::path& path) {
  if (text.empty() || !std::all_of(text.begin(), text.end(), ::isdigit) || text.size() > 9) {
    throw IoError(path.string() + ": bad " + what + " '" + text + "'");
  }
  const int v = std::stoi(text);
  if (v <= 0) throw IoError(path.string() + ": " + what + " must be positive");
  return v;
}

// Last run of digits in the stem, if any.
std::optional<unsigned long long> frame_number(const fs::path& p) {
  const std::string stem = p.stem().string();
  auto end = stem.find_last_of("0123456789");
  if (end == std::string::npos) return std::nullopt;
  auto begin = end;
  while (begin > 0 && std::isdigit(static_cast<unsigned char>(stem[begin - 1]))) --begin;
  const std::string digits = stem.substr(begin, end - begin + 1);
  if (digits.size() > 18) return std::nullopt;
  return std::stoull(digits);
}

bool is_image_ext(const fs::path& p) {
  const auto ext = lower(p.extension().string());
  return ext == ".png" || ext == ".ppm" || ext == ".pgm";
}

std::uint8_t clamp_byte(double v) { return to_byte(v); }

}  // namespace

Frame read_png(const fs::path& path) {
  png_image image{};
  image.version = PNG_IMAGE_VERSION;
  if (!png_image_begin_read_from_file(&image, path.c_str())) {
    throw IoError("cannot decode " + path.string() + ": " + image.message);
  }
  if (image.format & PNG_FORMAT_FLAG_LINEAR) {
    png_image_free(&image);
    throw IoError(path.string() + ": unsupported bit depth (only 8-bit images are accepted)");
  }
  const bool color = image.format & PNG_FORMAT_FLAG_COLOR;
  image.format = color ? PNG_FORMAT_RGB : PNG_FORMAT_GRAY;
  const int channels = color ? 3 : 1;
  Frame frame(static_cast<int>(image.width), static_cast<int>(image.height), channels);
  if (!png_image_finish_read(&image, nullptr, frame.samples().data(), 0, nullptr)) {
    const std::string msg = image.message;
    png_image_free(&image);
    throw IoError("cannot decode " + path.string() + ": " + msg);
  }
  return frame;
}

void write_png(const fs::path& path, const ByteImage& img) {
  if (img.channels() != 1 && img.channels() != 3) {
    throw InvalidArgument("PNG output needs 1 or 3 channels");
  }
  png_image image{};
  image.version = PNG_IMAGE_VERSION;
  image.width = static_cast<png_uint_32>(img.width());
  image.height = static_cast<png_uint_32>(img.height());
  image.format = img.channels() == 3 ? PNG_FORMAT_RGB : PNG_FORMAT_GRAY;
  if (!png_image_write_to_file(&image, path.c_str(), 0, img.samples().data(), 0, nullptr)) {
    const std::string msg = image.message;
    png_image_free(&image);
    throw IoError("cannot write " + path.string() + ": " + msg);
  }
}

Frame read_pnm(const fs::path& path) {
  const auto bytes = read_bytes(path);
  std::size_t pos = 0;
  const std::string magic = pnm_token(bytes, pos);
  int channels = 0;
  if (magic == "P6") {
    channels = 3;
  } else if (magic == "P5") {
    channels = 1;
  } else {
    throw IoError(path.string() + ": not a binary PPM/PGM (magic '" + magic + "')");
  }
  const int w = parse_positive(pnm_token(bytes, pos), "width", path);
  const int h = parse_positive(pnm_token(bytes, pos), "height", path);
  const int maxval = parse_positive(pnm_token(bytes, pos), "maxval", path);
  if (maxval != 255) {
    throw IoError(path.string() + ": unsupported bit depth (maxval " + std::to_string(maxval) + ")");
  }
  ++pos;  // single whitespace after maxval
  const std::size_t need = static_cast<std::size_t>(w) * h * channels;
  if (bytes.size() < pos + need) throw IoError(path.string() + ": truncated pixel data");
  return Frame(w, h, channels,
               std::vector<std::uint8_t>(bytes.begin() + static_cast<std::ptrdiff_t>(pos),
                                         bytes.begin() + static_cast<std::ptrdiff_t>(pos + need)));
}

void write_pnm(const fs::path& path, const ByteImage& img) {
  if (img.channels() != 1 && img.channels() != 3) throw InvalidArgument("PNM output needs 1 or 3 channels");
  auto out = open_out(path);
  out << (img.channels() == 3 ? "P6" : "P5") << '\n' << img.width() << ' ' << img.height() << "\n255\n";
  out.write(reinterpret_cast<const char*>(img.samples().data()),
            static_cast<std::streamsize>(img.samples().size()));
  if (!out) throw IoError("cannot write " + path.string());
}

std::vector<Frame> read_y4m(const fs::path& path, Y4mHeader* header_out) {
  const auto bytes = read_bytes(path);
  std::size_t pos = 0;
  auto line = [&]() -> std::string {
    const auto nl = std::find(bytes.begin() + static_cast<std::ptrdiff_t>(pos), bytes.end(), '\n');
    if (nl == bytes.end()) throw IoError(path.string() + ": truncated Y4M header");
    std::string s(bytes.begin() + static_cast<std::ptrdiff_t>(pos), nl);
    pos = static_cast<std::size_t>(nl - bytes.begin()) + 1;
    return s;
  };

  std::istringstream head(line());
  std::string tok;
  head >> tok;
  if (tok != "YUV4MPEG2") throw IoError(path.string() + ": missing YUV4MPEG2 signature");
  Y4mHeader hdr;
  while (head >> tok) {
    const char key = tok[0];
    const std::string value = tok.substr(1);
    if (key == 'W') hdr.width = parse_positive(value, "width", path);
    if (key == 'H') hdr.height = parse_positive(value, "height", path);
    if (key == 'C') hdr.colorspace = value;
    if (key == 'F') hdr.frame_rate = value;
  }
  if (hdr.width == 0 || hdr.height == 0) throw IoError(path.string() + ": Y4M header lacks W or H");

  enum class Layout { c444, c420, mono };
  const auto p = hdr.colorspace.find_last_of('p');
  const bool deep = p != std::string::npos && p + 1 < hdr.colorspace.size() &&
                    std::all_of(hdr.colorspace.begin() + static_cast<std::ptrdiff_t>(p + 1),
                                hdr.colorspace.end(), ::isdigit);
  if (deep) throw IoError(path.string() + ": unsupported bit depth (C" + hdr.colorspace + ")");
  Layout layout;
  if (hdr.colorspace == "444") {
    layout = Layout::c444;
  } else if (hdr.colorspace.rfind("420", 0) == 0) {
    layout = Layout::c420;
  } else if (hdr.colorspace == "mono") {
    layout = Layout::mono;
  } else {
    throw IoError(path.string() + ": unsupported colorspace C" + hdr.colorspace);
  }

  const int w = hdr.width;
  const int h = hdr.height;
  const int cw = layout == Layout::c420 ? (w + 1) / 2 : w;
  const int ch = layout == Layout::c420 ? (h + 1) / 2 : h;
  const std::size_t luma = static_cast<std::size_t>(w) * h;
  const std::size_t chroma = layout == Layout::mono ? 0 : static_cast<std::size_t>(cw) * ch;

  std::vector<Frame> frames;
  while (pos < bytes.size()) {
    const std::string marker = line();
    if (marker.rfind("FRAME", 0) != 0) {
      throw IoError(path.string() + ": expected FRAME marker at frame " + std::to_string(frames.size()));
    }
    if (bytes.size() - pos < luma + 2 * chroma) {
      throw IoError(path.string() + ": truncated frame " + std::to_string(frames.size()));
    }
    const std::uint8_t* yp = bytes.data() + pos;
    const std::uint8_t* up = yp + luma;
    const std::uint8_t* vp = up + chroma;
    pos += luma + 2 * chroma;
    const int index = static_cast<int>(frames.size());
    if (layout == Layout::mono) {
      frames.emplace_back(w, h, 1, std::vector<std::uint8_t>(yp, yp + luma), index);
      continue;
    }
    Frame f(w, h, 3, 0, index);
    const int shift = layout == Layout::c420 ? 1 : 0;
    for (int y = 0; y < h; ++y) {
      for (int x = 0; x < w; ++x) {
        const std::size_t ci = static_cast<std::size_t>(y >> shift) * cw + (x >> shift);
        const double yy = 1.164383561643836 * (yp[static_cast<std::size_t>(y) * w + x] - 16.0);
        const double u = up[ci] - 128.0;
        const double v = vp[ci] - 128.0;
        f.at(x, y, 0) = clamp_byte(yy + 1.596026785714286 * v);
        f.at(x, y, 1) = clamp_byte(yy - 0.391762290094914 * u - 0.812967647237771 * v);
        f.at(x, y, 2) = clamp_byte(yy + 2.017232142857143 * u);
      }
    }
    frames.push_back(std::move(f));
  }
  if (header_out) *header_out = hdr;
  return frames;
}

void write_y4m(const fs::path& path, const std::vector<Frame>& frames, const std::string& frame_rate) {
  if (frames.empty()) throw InvalidArgument("cannot write an empty Y4M");
  const Frame& first = frames.front();
  for (const auto& f : frames) {
    if (!f.same_shape(first)) throw InvalidArgument("Y4M frames must share dimensions");
  }
  const bool mono = first.channels() == 1;
  auto out = open_out(path);
  out << "YUV4MPEG2 W" << first.width() << " H" << first.height() << " F" << frame_rate
      << " Ip A1:1 C" << (mono ? "mono" : "444") << '\n';
  const std::size_t n = static_cast<std::size_t>(first.width()) * first.height();
  std::vector<std::uint8_t> planes(mono ? n : 3 * n);
  for (const auto& f : frames) {
    out << "FRAME\n";
    if (mono) {
      std::copy(f.samples().begin(), f.samples().end(), planes.begin());
    } else {
      for (std::size_t i = 0; i < n; ++i) {
        const double r = f.samples()[3 * i];
        const double g = f.samples()[3 * i + 1];
        const double b = f.samples()[3 * i + 2];
        planes[i] = to_byte(16.0 + 0.256788235294118 * r + 0.504129411764706 * g + 0.097905882352941 * b);
        planes[n + i] = to_byte(128.0 - 0.148223529411765 * r - 0.290992156862745 * g + 0.439215686274510 * b);
        planes[2 * n + i] = to_byte(128.0 + 0.439215686274510 * r - 0.367788235294118 * g - 0.071427450980392 * b);
      }
    }
    out.write(reinterpret_cast<const char*>(planes.data()), static_cast<std::streamsize>(planes.size()));
  }
  if (!out) throw IoError("cannot write " + path.string());
}

Frame read_image(const fs::path& path) {
  const auto ext = lower(path.extension().string());
  if (ext == ".png") return read_png(path);
  if (ext == ".ppm" || ext == ".pgm") return read_pnm(path);
  throw IoError(path.string() + ": unsupported image type");
}

std::vector<Frame> load_sequence(const fs::path& path) {
  std::error_code ec;
  if (fs::is_regular_file(path, ec)) {
    if (lower(path.extension().string()) == ".y4m") return read_y4m(path);
    return {read_image(path)};
  }
  if (!fs::is_directory(path, ec)) throw IoError("no such file or directory: " + path.string());

  struct Entry {
    unsigned long long number;
    fs::path path;
  };
  std::vector<Entry> entries;
  for (const auto& de : fs::directory_iterator(path)) {
    if (!de.is_regular_file() || !is_image_ext(de.path())) continue;
    const auto n = frame_number(de.path());
    if (!n) throw IoError(de.path().string() + ": file name carries no frame number");
    entries.push_back({*n, de.path()});
  }
  if (entries.empty()) throw IoError(path.string() + ": no PNG/PPM/PGM frames found");
  std::sort(entries.begin(), entries.end(), [](const Entry& a, const Entry& b) {
    return a.number != b.number ? a.number < b.number : a.path.filename() < b.path.filename();
  });
  for (std::size_t k = 1; k < entries.size(); ++k) {
    if (entries[k].number == entries[k - 1].number) {
      throw IoError("frame number " + std::to_string(entries[k].number) + " appears twice: " +
                    entries[k - 1].path.filename().string() + ", " + entries[k].path.filename().string());
    }
  }

  std::vector<Frame> frames(entries.size());
  parallel_for(entries.size(), [&](std::size_t k) {
    frames[k] = read_image(entries[k].path);
    frames[k].set_index(static_cast<int>(k));
  });
  for (std::size_t k = 1; k < frames.size(); ++k) {
    if (frames[k].width() != frames[0].width() || frames[k].height() != frames[0].height()) {
      throw IoError("mixed frame sizes: " + entries[0].path.filename().string() + " is " +
                    size_string(frames[0]) + " but " + entries[k].path.filename().string() + " is " +
                    size_string(frames[k]));
    }
    if (frames[k].channels() != frames[0].channels()) {
      throw IoError("mixed channel counts: " + entries[0].path.filename().string() + " has " +
                    std::to_string(frames[0].channels()) + " but " +
                    entries[k].path.filename().string() + " has " + std::to_string(frames[k].channels()));
    }
  }
  return frames;
}

void save_sequence(const fs::path& path, const std::vector<Frame>& frames, ImageFormat format) {
  if (lower(path.extension().string()) == ".y4m") {
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    write_y4m(path, frames);
    return;
  }
  std::error_code ec;
  fs::create_directories(path, ec);
  if (ec) throw IoError("cannot create " + path.string() + ": " + ec.message());
  parallel_for(frames.size(), [&](std::size_t k) {
    char name[32];
    std::snprintf(name, sizeof(name), "%06zu", k);
    const auto& f = frames[k];
    if (format == ImageFormat::png) {
      write_png(path / (std::string(name) + ".png"), f);
    } else {
      write_pnm(path / (std::string(name) + (f.channels() == 3 ? ".ppm" : ".pgm")), f);
    }
  });
}

nlohmann::json to_json(const LrManifest& m) {
  return {{"kernel", m.kernel},         {"cubic_a", m.cubic_a},     {"scale", m.scale},
          {"frame_count", m.frame_count}, {"gt_width", m.gt_width}, {"gt_height", m.gt_height},
          {"lr_width", m.lr_width},     {"lr_height", m.lr_height}};
}

LrManifest manifest_from_json(const nlohmann::json& j) {
  LrManifest m;
  try {
    m.kernel = j.at("kernel").get<std::string>();
    m.cubic_a = j.at("cubic_a").get<double>();
    m.scale = j.at("scale").get<int>();
    m.frame_count = j.at("frame_count").get<std::size_t>();
    m.gt_width = j.at("gt_width").get<int>();
    m.gt_height = j.at("gt_height").get<int>();
    m.lr_width = j.at("lr_width").get<int>();
    m.lr_height = j.at("lr_height").get<int>();
  } catch (const nlohmann::json::exception& e) {
    throw IoError(std::string("bad manifest: ") + e.what());
  }
  return m;
}

PreparedSet prepare_lr(const std::vector<Frame>& gt, int scale) {
  if (scale < 1) throw InvalidArgument("scale must be positive");
  if (gt.empty()) throw InvalidArgument("no frames to prepare");
  PreparedSet set;
  for (const auto& f : gt) {
    if (f.width() % scale != 0 || f.height() % scale != 0) {
      throw InvalidArgument("frame " + std::to_string(f.index()) + " is " + size_string(f) +
                            ", not divisible by scale " + std::to_string(scale));
    }
  }
  set.lr.resize(gt.size());
  parallel_for(gt.size(), [&](std::size_t k) {
    set.lr[k] = Frame(resample_bicubic(gt[k], Scale::down(scale)), gt[k].index());
  });
  set.manifest.scale = scale;
  set.manifest.frame_count = gt.size();
  set.manifest.gt_width = gt.front().width();
  set.manifest.gt_height = gt.front().height();
  set.manifest.lr_width = set.lr.front().width();
  set.manifest.lr_height = set.lr.front().height();
  return set;
}

LrManifest prepare_dataset(const fs::path& in, const fs::path& out, int scale, ImageFormat format) {
  const auto set = prepare_lr(load_sequence(in), scale);
  save_sequence(out, set.lr, format);
  write_text(out / "manifest.json", to_json(set.manifest).dump(2) + "\n");
  return set.manifest;
}

LrManifest load_manifest(const fs::path& path) {
  const fs::path file = fs::is_directory(path) ? path / "manifest.json" : path;
  try {
    return manifest_from_json(nlohmann::json::parse(read_text(file)));
  } catch (const nlohmann::json::parse_error& e) {
    throw IoError(file.string() + ": " + e.what());
  }
}

std::string read_text(const fs::path& path) {
  const auto bytes = read_bytes(path);
  return {bytes.begin(), bytes.end()};
}

void write_text(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) {
    std::error_code ec;
    fs::create_directories(path.parent_path(), ec);
  }
  auto out = open_out(path);
  out << text;
  if (!out) throw IoError("cannot write " + path.string());
}

}  // namespace vsrboost
