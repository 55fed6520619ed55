#pragma once

#include <span>
#include <string>
#include <vector>

#include "json.hpp"
#include "vsrboost/flow.hpp"
#include "vsrboost/grid.hpp"

namespace vsrboost {

/// Number of frames of a 5-frame window that carry useful dynamics.
enum class MovementLabel { L1 = 1, L3 = 3, L5 = 5 };

inline constexpr MovementLabel kAllLabels[] = {MovementLabel::L1, MovementLabel::L3,
                                               MovementLabel::L5};

inline int frames_consumed(MovementLabel label) noexcept { return static_cast<int>(label); }
std::string to_string(MovementLabel label);
MovementLabel label_from_string(const std::string& text);

/// Motion states between neighbors of a 5-patch sequence [t-2 .. t+2].
struct MotionProfile {
  double m_minus2 = 0;  // t-2 vs t-1
  double m_minus1 = 0;  // t-1 vs t (reference t)
  double m_plus1 = 0;   // t+1 vs t (reference t)
  double m_plus2 = 0;   // t+2 vs t+1

  bool operator==(const MotionProfile&) const = default;
};

struct DetectionConfig {
  double gamma = 1.0;
  int sequence_length = 5;
  double psnr_threshold = 35.0;

  void validate() const;
};

/// L1 when both inner motions are below gamma, else L3 when both outer ones
/// are, else L5. Comparisons are strict: a motion equal to gamma is dynamic.
MovementLabel classify_label(const MotionProfile& profile, double gamma);

struct Detection {
  MovementLabel label = MovementLabel::L5;
  MotionProfile profile;
};

/// Computes the four pairwise motion states of five aligned patches (each
/// pair estimated independently) and classifies them.
Detection detect_patch_sequence(std::span<const ByteImage> sequence, const DetectionConfig& config,
                                const FlowParams& flow_params = {});

/// Which patch each window member is compared against.
enum class StationaryReference {
  center,       // every neighbor vs the window's center patch
  consecutive,  // each adjacent pair
};

struct PositionCount {
  std::size_t grid_index = 0;
  int x = 0;
  int y = 0;
  std::size_t stationary = 0;
  std::size_t windows = 0;
};

struct StationaryReport {
  int window = 5;
  double threshold = 35.0;
  StationaryReference reference = StationaryReference::center;
  std::size_t windows = 0;
  std::size_t stationary = 0;
  double ratio = 0;
  std::vector<PositionCount> per_position;
};

/// Fraction of (position, center frame) windows whose compared patch pairs
/// all exceed `psnr_threshold`. Only windows fully inside the video count.
StationaryReport stationary_statistics(std::span<const Frame> video, const PatchGrid& grid,
                                       int window, double psnr_threshold,
                                       StationaryReference reference = StationaryReference::center);

nlohmann::json to_json(const StationaryReport& report);

}  // namespace vsrboost
