#include "vsrboost/trdm.hpp"

#include <tuple>

#include "vsrboost/metrics.hpp"
#include "vsrboost/parallel.hpp"

namespace vsrboost {

std::string to_string(MovementLabel label) {
  switch (label) {
    case MovementLabel::L1: return "L1";
    case MovementLabel::L3: return "L3";
    case MovementLabel::L5: return "L5";
  }
  return "L?";
}

MovementLabel label_from_string(const std::string& text) {
  if (text == "L1") return MovementLabel::L1;
  if (text == "L3") return MovementLabel::L3;
  if (text == "L5") return MovementLabel::L5;
  throw InvalidArgument("unknown movement label '" + text + "'");
}

void DetectionConfig::validate() const {
  if (!(gamma > 0)) throw InvalidArgument("detection gamma must be positive");
  if (sequence_length < 1 || sequence_length % 2 == 0) {
    throw InvalidArgument("sequence length must be odd");
  }
}

MovementLabel classify_label(const MotionProfile& p, double gamma) {
  if (p.m_minus1 < gamma && p.m_plus1 < gamma) return MovementLabel::L1;
  if (p.m_minus2 < gamma && p.m_plus2 < gamma) return MovementLabel::L3;
  return MovementLabel::L5;
}

Detection detect_patch_sequence(std::span<const ByteImage> seq, const DetectionConfig& config,
                                const FlowParams& flow_params) {
  config.validate();
  if (seq.size() != 5) {
    throw InvalidArgument("patch sequence must hold 5 patches, got " + std::to_string(seq.size()));
  }
  for (const auto& p : seq) {
    if (!p.same_shape(seq[2])) throw InvalidArgument("patch sequence size mismatch");
  }
  auto motion = [&](const ByteImage& reference, const ByteImage& neighbor) {
    return mean_abs_flow(estimate_flow(reference, neighbor, flow_params));
  };
  Detection d;
  d.profile.m_minus2 = motion(seq[1], seq[0]);
  d.profile.m_minus1 = motion(seq[2], seq[1]);
  d.profile.m_plus1 = motion(seq[2], seq[3]);
  d.profile.m_plus2 = motion(seq[3], seq[4]);
  d.label = classify_label(d.profile, config.gamma);
  return d;
}

StationaryReport stationary_statistics(std::span<const Frame> video, const PatchGrid& grid,
                                       int window, double psnr_threshold,
                                       StationaryReference reference) {
  if (window < 1 || window % 2 == 0) throw InvalidArgument("window must be odd");
  if (static_cast<int>(video.size()) < window) {
    throw InvalidArgument("video of " + std::to_string(video.size()) +
                          " frames is shorter than window " + std::to_string(window));
  }
  std::vector<std::vector<Patch>> patches(video.size());
  parallel_for(video.size(), [&](std::size_t t) { patches[t] = decompose(video[t], grid); });

  StationaryReport report;
  report.window = window;
  report.threshold = psnr_threshold;
  report.reference = reference;
  report.per_position.resize(grid.size());

  const int half = window / 2;
  const int frames = static_cast<int>(video.size());
  parallel_for(grid.size(), [&](std::size_t i) {
    auto& pos = report.per_position[i];
    pos.grid_index = i;
    std::tie(pos.x, pos.y) = grid.origin(i);
    for (int center = half; center + half < frames; ++center) {
      bool stationary = true;
      for (int j = center - half; j <= center + half && stationary; ++j) {
        if (reference == StationaryReference::center) {
          if (j != center) stationary = psnr(patches[j][i].image, patches[center][i].image) > psnr_threshold;
        } else if (j > center - half) {
          stationary = psnr(patches[j][i].image, patches[j - 1][i].image) > psnr_threshold;
        }
      }
      ++pos.windows;
      if (stationary) ++pos.stationary;
    }
  });
  for (const auto& pos : report.per_position) {
    report.windows += pos.windows;
    report.stationary += pos.stationary;
  }
  report.ratio = report.windows == 0
                     ? 0.0
                     : static_cast<double>(report.stationary) / static_cast<double>(report.windows);
  return report;
}

nlohmann::json to_json(const StationaryReport& report) {
  nlohmann::json positions = nlohmann::json::array();
  for (const auto& p : report.per_position) {
    positions.push_back({{"grid_index", p.grid_index},
                         {"x", p.x},
                         {"y", p.y},
                         {"stationary", p.stationary},
                         {"windows", p.windows}});
  }
  return {{"window", report.window},
          {"threshold", report.threshold},
          {"reference", report.reference == StationaryReference::center ? "center" : "consecutive"},
          {"windows", report.windows},
          {"stationary", report.stationary},
          {"ratio", report.ratio},
          {"per_position", positions}};
}

}  // namespace vsrboost
