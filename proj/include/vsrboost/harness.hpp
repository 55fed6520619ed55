#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "vsrboost/asrm.hpp"
#include "vsrboost/pdp.hpp"

namespace vsrboost {

struct InjectionSpec {
  std::uint32_t seed = 0;
  int n_anchor_frames = 10;
  int replication = 0;

  void validate() const;
};

struct InjectedVideo {
  std::vector<Frame> frames;
  std::vector<std::size_t> mapping;  // original index -> extended index
  std::vector<std::size_t> anchors;  // original indices, ascending
};

/// Picks anchors uniformly without replacement and follows each with
/// `replication` copies. Frame indices are renumbered in extended order.
InjectedVideo inject_redundancy(std::span<const Frame> video, const InjectionSpec& spec);

enum class PipelineKind { bicubic, boosted_frame, boosted_video, naive_sequential };
std::string to_string(PipelineKind kind);
PipelineKind pipeline_kind_from_string(const std::string& text);

enum class Metric { psnr, ssim };
std::string to_string(Metric metric);
Metric metric_from_string(const std::string& text);

/// Everything needed to run one pipeline over an LR sequence.
struct PipelineSpec {
  PipelineKind kind = PipelineKind::boosted_video;
  int patch_size = 64;
  int stride = 56;
  int scale = 4;
  DetectionConfig detection;      // boosted-frame
  PropagationConfig propagation;  // boosted-video and naive-sequential; mode is set from kind
  FlowParams flow;
  CostWeights weights;
  float alpha = 0.5f;
  /// Serves every label and the PDP upsampler. Null means builtin bicubic.
  std::shared_ptr<Backend> backend;
};

nlohmann::json to_json(const PipelineSpec& spec);

std::vector<Frame> run_pipeline(const PipelineSpec& spec, std::span<const Frame> lr);

struct EvaluationReport {
  PipelineKind pipeline = PipelineKind::boosted_video;
  Metric metric = Metric::psnr;
  std::vector<std::size_t> frames;  // evaluated indices
  std::vector<double> scores;       // aligned with `frames`
  double mean = 0.0;
};

nlohmann::json to_json(const EvaluationReport& report);

/// Scores outputs[i] against gt[i] for every i in `mask` (all frames when
/// empty).
EvaluationReport evaluate_outputs(std::span<const Frame> outputs, std::span<const Frame> gt,
                                  Metric metric, std::span<const std::size_t> mask = {});

struct PipelineEvaluation {
  EvaluationReport report;
  std::vector<Frame> outputs;
};

/// gt must hold one frame per LR frame at `spec.scale` times the size.
PipelineEvaluation evaluate_pipeline(const PipelineSpec& spec, std::span<const Frame> lr,
                                     std::span<const Frame> gt, Metric metric,
                                     std::span<const std::size_t> mask = {});

struct LadderRow {
  int replication = 0;
  std::size_t frame_count = 0;
  double mean_score = 0.0;
  int max_abs_diff = 0;  // vs. level 0 on original frames
};

struct InjectionTable {
  PipelineKind pipeline = PipelineKind::boosted_video;
  Metric metric = Metric::psnr;
  std::uint32_t seed = 0;
  int n_anchor_frames = 10;
  std::vector<LadderRow> rows;

  bool invariant() const;       // every row's max_abs_diff == 0
  bool non_increasing() const;  // mean score never rises with replication
};

nlohmann::json to_json(const InjectionTable& table);
std::string to_csv(const InjectionTable& table);

/// Runs inject + evaluate for each replication level. LR and GT are injected
/// with the same anchors; scores cover the original frames only.
InjectionTable compare_injection(const PipelineSpec& spec, std::span<const Frame> lr,
                                 std::span<const Frame> gt, Metric metric, std::uint32_t seed,
                                 int n_anchor_frames, std::span<const int> levels);

}  // namespace vsrboost
