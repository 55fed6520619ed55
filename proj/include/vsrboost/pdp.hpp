#pragma once

#include <functional>
#include <span>
#include <vector>

#include "json.hpp"
#include "vsrboost/backend.hpp"
#include "vsrboost/flow.hpp"
#include "vsrboost/grid.hpp"

namespace vsrboost {

enum class Direction { forward, backward };

std::string to_string(Direction direction);

/// Per-position store of the last informative patch and its hidden state.
///
/// Exactly one (rgb, hidden) pair per grid position; both share origin and
/// size. `source_frame[i]` is the sequence index the pair was taken from.
struct PatchPool {
  Direction direction = Direction::forward;
  std::vector<Patch> rgb;
  std::vector<HiddenPatch> hidden;
  std::vector<int> source_frame;

  std::size_t size() const noexcept { return rgb.size(); }
  bool operator==(const PatchPool&) const = default;
};

/// Replicates the image channels cyclically into `hidden_channels` feature
/// channels scaled to [0, 1]: feature k = sample (k mod channels) / 255.
FloatImage lift(const ByteImage& image, int hidden_channels);

/// Inverse of lift: averages the replicas of each image channel.
FloatImage unlift(const FloatImage& hidden, int image_channels);

/// Combines warped pool features with the lifted current patch.
class Refiner {
 public:
  virtual ~Refiner() = default;
  virtual FloatImage refine(const FloatImage& warped_hidden, const FloatImage& lifted) const = 0;
};

/// alpha * warped + (1 - alpha) * lifted.
class ToyLinearRefiner final : public Refiner {
 public:
  explicit ToyLinearRefiner(float alpha = 0.5f);
  FloatImage refine(const FloatImage& warped_hidden, const FloatImage& lifted) const override;
  float alpha() const noexcept { return alpha_; }

 private:
  float alpha_;
};

PatchPool init_pool(const Frame& frame, const PatchGrid& grid, Direction direction,
                    int hidden_channels = 4, int frame_index = 0);

struct Aggregation {
  std::vector<Patch> frame_patches;
  std::vector<HiddenPatch> features;  // x_phi per position
  std::vector<FlowField> flows;       // current patch -> pooled patch
  std::vector<double> motion;         // mean_abs_flow of each flow
};

/// Aligns every pooled hidden patch to the current frame's patch and refines
/// it together with the lifted current patch.
Aggregation aggregate_features(const Frame& frame, const PatchGrid& grid, const PatchPool& pool,
                               const Refiner& refiner, const FlowParams& flow_params = {});

/// Replaces position i with (frame_patches[i], features[i], frame_index)
/// iff motions[i] > gamma; every other position is left untouched.
PatchPool update_pool(PatchPool pool, std::span<const Patch> frame_patches,
                      std::span<const HiddenPatch> features, std::span<const double> motions,
                      double gamma, int frame_index);

enum class PropagationMode {
  dynamic_pool,      // conditional pool update, repeated frames reuse features
  naive_sequential,  // pool replaced on every frame
};

struct PropagationConfig {
  double gamma = 0.2;
  int hidden_channels = 4;
  FlowParams flow;
  PropagationMode mode = PropagationMode::dynamic_pool;
};

struct PoolTraceEntry {
  Direction direction = Direction::forward;
  int frame_index = 0;
  std::size_t position = 0;
  double motion = 0;
  bool replaced = false;
  int source_frame = 0;  // after the update
};

using PoolTrace = std::function<void(const PoolTraceEntry&)>;

nlohmann::json to_json(const PoolTraceEntry& entry);

/// One directional pass. Returns hidden features indexed by sequence
/// position (result[t][i] for frame t, grid position i) regardless of
/// direction.
///
/// The pool starts from the pass's first frame. Each frame is aggregated
/// against the pool and then used to update it. In dynamic_pool mode a frame
/// bitwise identical to the previously processed one reuses that frame's
/// features and leaves the pool alone.
std::vector<std::vector<HiddenPatch>> propagate(std::span<const Frame> video,
                                                const PatchGrid& grid,
                                                const PropagationConfig& config,
                                                const Refiner& refiner, Direction direction,
                                                const PoolTrace& trace = {});

/// Bicubic-style base from `upsampler` on each frame patch plus the
/// residual unlift(mean(forward, backward)) - frame / 255, nearest-upscaled
/// and scaled back to 8-bit, then overlap-averaged.
Frame reconstruct(std::span<const HiddenPatch> forward, std::span<const HiddenPatch> backward,
                  const Frame& frame, const PatchGrid& grid, Backend& upsampler, int scale = 4);

struct VideoPipelineConfig {
  PropagationConfig propagation;
  int scale = 4;
};

/// Forward and backward passes followed by per-frame reconstruction.
std::vector<Frame> boosted_video_pipeline(std::span<const Frame> video, const PatchGrid& grid,
                                          const VideoPipelineConfig& config,
                                          const Refiner& refiner, Backend& upsampler,
                                          const PoolTrace& trace = {});

}  // namespace vsrboost
