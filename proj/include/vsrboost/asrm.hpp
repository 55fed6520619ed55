#pragma once

#include <array>
#include <span>
#include <vector>

#include "json.hpp"
#include "vsrboost/backend.hpp"
#include "vsrboost/grid.hpp"
#include "vsrboost/trdm.hpp"

namespace vsrboost {

/// Same-label positions concatenated for one backend call.
struct RoutingBatch {
  MovementLabel label = MovementLabel::L5;
  std::vector<PatchSlice> slices;  // ascending grid_index

  std::vector<std::size_t> positions() const;
};

/// Every grid position lands in exactly one batch. Batches appear in the
/// order their label first occurs on the grid.
struct RoutingPlan {
  std::vector<RoutingBatch> batches;
  std::size_t positions = 0;
  int scale = 4;

  const RoutingBatch* batch_for(MovementLabel label) const noexcept;
};

/// Partitions positions by label, trimming each 5-frame slice to the
/// frames its label consumes (L1: t, L3: t-1..t+1, L5: t-2..t+2).
/// `sequences[i]` must be the 5-frame slice of grid position i.
RoutingPlan route(std::span<const MovementLabel> labels, std::span<const PatchSlice> sequences,
                  int scale = 4);

/// Runs every batch on its registered backend and returns the SR patches in
/// grid_index order, placed at scaled origins. Backend failures are rethrown
/// as BackendError naming the label and positions of the failed batch.
std::vector<Patch> execute(const RoutingPlan& plan, const BackendRegistry& registry);

struct CostReport {
  std::size_t positions = 0;
  std::array<std::size_t, 3> label_counts{};  // L1, L3, L5
  CostWeights weights;
  double total_cost = 0;
  double baseline_cost = 0;  // every position billed at the L5 weight
  double ratio = 0;

  std::size_t count(MovementLabel label) const noexcept;
  CostReport& operator+=(const CostReport& other);
};

/// total = sum count(label) * weight(label); ratio = total / baseline.
CostReport cost_report(const RoutingPlan& plan, const BackendRegistry& registry);

nlohmann::json to_json(const CostReport& report);

struct FramePipelineConfig {
  DetectionConfig detection;  // gamma 1.0
  FlowParams flow;
  int scale = 4;
};

struct FramePipelineResult {
  Frame output;
  std::vector<Detection> detections;  // per grid position
  RoutingPlan plan;
  CostReport cost;
};

/// decompose -> detect -> route -> execute -> recombine for the center of a
/// five-frame window.
FramePipelineResult boosted_frame_pipeline(std::span<const Frame> window, const PatchGrid& grid,
                                           const FramePipelineConfig& config,
                                           const BackendRegistry& registry);

/// Indices of the 5-frame window around `t`, replicate-padded at both ends.
std::array<std::size_t, 5> window_indices(std::size_t t, std::size_t frame_count);

struct SequenceResult {
  std::vector<Frame> outputs;
  std::vector<CostReport> per_frame;
  CostReport total;
};

/// Runs the frame pipeline on every frame of a sequence.
SequenceResult boosted_frame_sequence(std::span<const Frame> video, const PatchGrid& grid,
                                      const FramePipelineConfig& config,
                                      const BackendRegistry& registry);

}  // namespace vsrboost
