#include "vsrboost/asrm.hpp"

#include <algorithm>

#include "vsrboost/parallel.hpp"

namespace vsrboost {
namespace {

std::size_t label_slot(MovementLabel label) {
  switch (label) {
    case MovementLabel::L1: return 0;
    case MovementLabel::L3: return 1;
    case MovementLabel::L5: return 2;
  }
  return 2;
}

std::string describe(const RoutingBatch& batch) {
  std::string ids;
  for (auto i : batch.positions()) ids += (ids.empty() ? "" : ",") + std::to_string(i);
  return to_string(batch.label) + " batch [" + ids + "]";
}

}  // namespace

std::vector<std::size_t> RoutingBatch::positions() const {
  std::vector<std::size_t> out;
  out.reserve(slices.size());
  for (const auto& s : slices) out.push_back(s.grid_index);
  return out;
}

const RoutingBatch* RoutingPlan::batch_for(MovementLabel label) const noexcept {
  for (const auto& b : batches) {
    if (b.label == label) return &b;
  }
  return nullptr;
}

RoutingPlan route(std::span<const MovementLabel> labels, std::span<const PatchSlice> sequences,
                  int scale) {
  if (labels.size() != sequences.size()) {
    throw InvalidArgument("missing label for position " +
                          std::to_string(std::min(labels.size(), sequences.size())) + " (" +
                          std::to_string(labels.size()) + " labels, " +
                          std::to_string(sequences.size()) + " positions)");
  }
  RoutingPlan plan;
  plan.scale = scale;
  plan.positions = labels.size();
  for (std::size_t i = 0; i < labels.size(); ++i) {
    const auto& seq = sequences[i];
    if (seq.grid_index != i) throw InvalidArgument("sequences must be ordered by grid index");
    if (seq.frames.size() != 5) {
      throw InvalidArgument("position " + std::to_string(i) + " carries " +
                            std::to_string(seq.frames.size()) + " frames, expected 5");
    }
    const int keep = frames_consumed(labels[i]);
    const int first = 2 - keep / 2;
    PatchSlice slice{seq.grid_index, seq.x, seq.y,
                     {seq.frames.begin() + first, seq.frames.begin() + first + keep}};

    auto it = std::find_if(plan.batches.begin(), plan.batches.end(),
                           [&](const RoutingBatch& b) { return b.label == labels[i]; });
    if (it == plan.batches.end()) {
      plan.batches.push_back({labels[i], {}});
      it = plan.batches.end() - 1;
    }
    it->slices.push_back(std::move(slice));
  }
  return plan;
}

std::vector<Patch> execute(const RoutingPlan& plan, const BackendRegistry& registry) {
  for (const auto& batch : plan.batches) {
    if (!registry.find(batch.label)) {
      throw BackendError("no backend registered for label " + to_string(batch.label));
    }
  }
  std::vector<std::vector<ByteImage>> results(plan.batches.size());
  parallel_for(plan.batches.size(), [&](std::size_t b) {
    const auto& batch = plan.batches[b];
    const auto& entry = registry.at(batch.label);
    try {
      results[b] = entry.backend->super_resolve(batch.slices, plan.scale);
    } catch (const BackendError& e) {
      throw BackendError("backend '" + entry.descriptor.backend_id + "' failed on " +
                             describe(batch) + ": " + e.what(),
                         e.code());
    } catch (const std::exception& e) {
      throw BackendError("backend '" + entry.descriptor.backend_id + "' failed on " +
                         describe(batch) + ": " + e.what());
    }
    if (results[b].size() != batch.slices.size()) {
      throw BackendError("backend '" + entry.descriptor.backend_id + "' returned " +
                         std::to_string(results[b].size()) + " patches for " + describe(batch));
    }
  });

  std::vector<Patch> out(plan.positions);
  std::vector<bool> filled(plan.positions, false);
  for (std::size_t b = 0; b < plan.batches.size(); ++b) {
    const auto& batch = plan.batches[b];
    for (std::size_t k = 0; k < batch.slices.size(); ++k) {
      const auto& slice = batch.slices[k];
      const auto& lr = slice.center();
      auto& sr = results[b][k];
      if (sr.width() != lr.width() * plan.scale || sr.height() != lr.height() * plan.scale ||
          sr.channels() != lr.channels()) {
        throw BackendError("backend output for position " + std::to_string(slice.grid_index) +
                           " has wrong dimensions");
      }
      out[slice.grid_index] =
          Patch{std::move(sr), slice.x * plan.scale, slice.y * plan.scale, slice.grid_index};
      filled[slice.grid_index] = true;
    }
  }
  if (!std::all_of(filled.begin(), filled.end(), [](bool f) { return f; })) {
    throw InvalidArgument("routing plan does not cover every position");
  }
  return out;
}

std::size_t CostReport::count(MovementLabel label) const noexcept {
  return label_counts[label_slot(label)];
}

CostReport& CostReport::operator+=(const CostReport& other) {
  positions += other.positions;
  for (std::size_t k = 0; k < 3; ++k) label_counts[k] += other.label_counts[k];
  weights = other.weights;
  total_cost += other.total_cost;
  baseline_cost += other.baseline_cost;
  ratio = baseline_cost > 0 ? total_cost / baseline_cost : 0.0;
  return *this;
}

CostReport cost_report(const RoutingPlan& plan, const BackendRegistry& registry) {
  CostReport report;
  report.positions = plan.positions;
  for (const auto& batch : plan.batches) {
    report.label_counts[label_slot(batch.label)] += batch.slices.size();
  }
  const auto weight = [&](MovementLabel label) {
    const auto* entry = registry.find(label);
    return entry ? entry->descriptor.cost_weight : 0.0;
  };
  const double w5 = registry.at(MovementLabel::L5).descriptor.cost_weight;
  report.weights = {weight(MovementLabel::L1), weight(MovementLabel::L3), w5};

  report.baseline_cost = static_cast<double>(plan.positions) * w5;
  for (auto label : kAllLabels) {
    const auto n = report.count(label);
    if (n == 0) continue;
    if (!registry.find(label)) {
      throw BackendError("no backend registered for label " + to_string(label));
    }
    report.total_cost += static_cast<double>(n) * weight(label);
    // Summing per-label shares keeps single-label and dyadic mixes exact.
    report.ratio += (static_cast<double>(n) / static_cast<double>(plan.positions)) *
                    (weight(label) / w5);
  }
  return report;
}

nlohmann::json to_json(const CostReport& report) {
  return {{"positions", report.positions},
          {"label_counts",
           {{"L1", report.label_counts[0]}, {"L3", report.label_counts[1]}, {"L5", report.label_counts[2]}}},
          {"weights", {{"L1", report.weights.l1}, {"L3", report.weights.l3}, {"L5", report.weights.l5}}},
          {"total_cost", report.total_cost},
          {"baseline_cost", report.baseline_cost},
          {"ratio", report.ratio},
          {"note", "costs use the configured per-branch weights"}};
}

FramePipelineResult boosted_frame_pipeline(std::span<const Frame> window, const PatchGrid& grid,
                                           const FramePipelineConfig& config,
                                           const BackendRegistry& registry) {
  if (window.size() != 5) {
    throw InvalidArgument("frame pipeline needs 5 frames, got " + std::to_string(window.size()));
  }
  std::array<std::vector<Patch>, 5> patches;
  for (std::size_t k = 0; k < 5; ++k) {
    if (!window[k].same_shape(window[2])) throw InvalidArgument("window frames differ in size");
    patches[k] = decompose(window[k], grid);
  }

  std::vector<PatchSlice> sequences(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    auto& s = sequences[i];
    s.grid_index = i;
    s.x = patches[2][i].x;
    s.y = patches[2][i].y;
    for (std::size_t k = 0; k < 5; ++k) s.frames.push_back(patches[k][i].image);
  }

  FramePipelineResult result;
  result.detections.resize(grid.size());
  parallel_for(grid.size(), [&](std::size_t i) {
    result.detections[i] = detect_patch_sequence(sequences[i].frames, config.detection, config.flow);
  });
  std::vector<MovementLabel> labels;
  labels.reserve(grid.size());
  for (const auto& d : result.detections) labels.push_back(d.label);

  result.plan = route(labels, sequences, config.scale);
  result.cost = cost_report(result.plan, registry);
  const auto sr = execute(result.plan, registry);
  result.output = Frame(recombine(sr, grid, grid.width() * config.scale,
                                  grid.height() * config.scale),
                        window[2].index());
  return result;
}

std::array<std::size_t, 5> window_indices(std::size_t t, std::size_t frame_count) {
  if (frame_count == 0 || t >= frame_count) throw InvalidArgument("window center out of range");
  std::array<std::size_t, 5> out{};
  for (int k = -2; k <= 2; ++k) {
    const long long idx = std::clamp<long long>(static_cast<long long>(t) + k, 0,
                                                static_cast<long long>(frame_count) - 1);
    out[static_cast<std::size_t>(k + 2)] = static_cast<std::size_t>(idx);
  }
  return out;
}

SequenceResult boosted_frame_sequence(std::span<const Frame> video, const PatchGrid& grid,
                                      const FramePipelineConfig& config,
                                      const BackendRegistry& registry) {
  if (video.empty()) throw InvalidArgument("empty video");
  SequenceResult result;
  for (std::size_t t = 0; t < video.size(); ++t) {
    std::vector<Frame> window;
    for (auto idx : window_indices(t, video.size())) window.push_back(video[idx]);
    auto frame = boosted_frame_pipeline(window, grid, config, registry);
    result.total += frame.cost;
    result.per_frame.push_back(frame.cost);
    result.outputs.push_back(std::move(frame.output));
  }
  return result;
}

}  // namespace vsrboost
