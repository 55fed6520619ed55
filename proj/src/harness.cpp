#include "vsrboost/harness.hpp"

#include <algorithm>
#include <cstdlib>
#include <numeric>
#include <random>
#include <sstream>

#include "vsrboost/metrics.hpp"
#include "vsrboost/parallel.hpp"

namespace vsrboost {

void InjectionSpec::validate() const {
  if (n_anchor_frames < 0) throw InvalidArgument("n_anchor_frames must be non-negative");
  if (replication < 0) throw InvalidArgument("replication must be non-negative");
}

InjectedVideo inject_redundancy(std::span<const Frame> video, const InjectionSpec& spec) {
  spec.validate();
  const auto anchors_wanted = static_cast<std::size_t>(spec.n_anchor_frames);
  if (video.size() < anchors_wanted) {
    throw InvalidArgument("video has " + std::to_string(video.size()) + " frames, fewer than " +
                          std::to_string(anchors_wanted) + " anchors");
  }
  InjectedVideo out;
  std::vector<std::size_t> order(video.size());
  std::iota(order.begin(), order.end(), 0);
  std::mt19937 rng(spec.seed);
  // Partial Fisher-Yates with our own index draw; std::shuffle and the
  // distributions are not reproducible across standard libraries.
  for (std::size_t k = 0; k < anchors_wanted; ++k) {
    const std::size_t span = order.size() - k;
    const std::size_t j = k + static_cast<std::size_t>(rng() % span);
    std::swap(order[k], order[j]);
  }
  out.anchors.assign(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(anchors_wanted));
  std::sort(out.anchors.begin(), out.anchors.end());

  std::vector<bool> is_anchor(video.size(), false);
  for (auto a : out.anchors) is_anchor[a] = true;
  out.frames.reserve(video.size() + anchors_wanted * static_cast<std::size_t>(spec.replication));
  for (std::size_t t = 0; t < video.size(); ++t) {
    out.mapping.push_back(out.frames.size());
    out.frames.push_back(video[t]);
    if (is_anchor[t]) {
      for (int r = 0; r < spec.replication; ++r) out.frames.push_back(video[t]);
    }
  }
  for (std::size_t i = 0; i < out.frames.size(); ++i) out.frames[i].set_index(static_cast<int>(i));
  return out;
}

std::string to_string(PipelineKind kind) {
  switch (kind) {
    case PipelineKind::bicubic: return "bicubic";
    case PipelineKind::boosted_frame: return "boosted-frame";
    case PipelineKind::boosted_video: return "boosted-video";
    case PipelineKind::naive_sequential: return "naive-sequential";
  }
  return "unknown";
}

PipelineKind pipeline_kind_from_string(const std::string& text) {
  for (auto k : {PipelineKind::bicubic, PipelineKind::boosted_frame, PipelineKind::boosted_video,
                 PipelineKind::naive_sequential}) {
    if (to_string(k) == text) return k;
  }
  throw InvalidArgument("unknown pipeline '" + text + "'");
}

std::string to_string(Metric metric) { return metric == Metric::psnr ? "psnr" : "ssim"; }

Metric metric_from_string(const std::string& text) {
  if (text == "psnr") return Metric::psnr;
  if (text == "ssim") return Metric::ssim;
  throw InvalidArgument("unknown metric '" + text + "'");
}

nlohmann::json to_json(const PipelineSpec& s) {
  return {{"pipeline", to_string(s.kind)},
          {"patch_size", s.patch_size},
          {"stride", s.stride},
          {"scale", s.scale},
          {"gamma_routing", s.detection.gamma},
          {"gamma_pdp", s.propagation.gamma},
          {"hidden_channels", s.propagation.hidden_channels},
          {"alpha", s.alpha},
          {"flow",
           {{"pyramid_levels", s.flow.pyramid_levels},
            {"block_size", s.flow.block_size},
            {"iterations_per_level", s.flow.iterations_per_level},
            {"search_radius_coarsest", s.flow.search_radius_coarsest}}},
          {"cost_weights", {{"L1", s.weights.l1}, {"L3", s.weights.l3}, {"L5", s.weights.l5}}},
          {"backend", s.backend ? "custom" : "builtin-bicubic"}};
}

std::vector<Frame> run_pipeline(const PipelineSpec& spec, std::span<const Frame> lr) {
  if (lr.empty()) throw InvalidArgument("cannot run a pipeline on an empty sequence");
  std::shared_ptr<Backend> backend =
      spec.backend ? spec.backend : make_builtin_backend(BackendKind::builtin_bicubic);

  if (spec.kind == PipelineKind::bicubic) {
    std::vector<Frame> out;
    for (const auto& f : lr) out.emplace_back(resample_bicubic(f, Scale::up(spec.scale)), f.index());
    return out;
  }

  const PatchGrid grid = build_grid(lr.front().width(), lr.front().height(), spec.patch_size, spec.stride);
  if (spec.kind == PipelineKind::boosted_frame) {
    const auto registry = BackendRegistry::uniform(
        backend, spec.backend ? BackendKind::remote : BackendKind::builtin_bicubic, spec.weights);
    FramePipelineConfig cfg{spec.detection, spec.flow, spec.scale};
    return boosted_frame_sequence(lr, grid, cfg, registry).outputs;
  }

  VideoPipelineConfig cfg{spec.propagation, spec.scale};
  cfg.propagation.flow = spec.flow;
  cfg.propagation.mode = spec.kind == PipelineKind::naive_sequential
                             ? PropagationMode::naive_sequential
                             : PropagationMode::dynamic_pool;
  const ToyLinearRefiner refiner(spec.alpha);
  return boosted_video_pipeline(lr, grid, cfg, refiner, *backend);
}

nlohmann::json to_json(const EvaluationReport& r) {
  nlohmann::json per_frame = nlohmann::json::array();
  for (std::size_t k = 0; k < r.frames.size(); ++k) {
    per_frame.push_back({{"frame", r.frames[k]}, {"score", r.scores[k]}});
  }
  return {{"pipeline", to_string(r.pipeline)},
          {"metric", to_string(r.metric)},
          {"frame_count", r.frames.size()},
          {"mean", r.mean},
          {"per_frame", per_frame}};
}

EvaluationReport evaluate_outputs(std::span<const Frame> outputs, std::span<const Frame> gt,
                                  Metric metric, std::span<const std::size_t> mask) {
  if (outputs.size() != gt.size()) {
    throw InvalidArgument("sequence lengths differ: " + std::to_string(outputs.size()) + " vs " +
                          std::to_string(gt.size()));
  }
  EvaluationReport r;
  r.metric = metric;
  if (mask.empty()) {
    r.frames.resize(outputs.size());
    std::iota(r.frames.begin(), r.frames.end(), 0);
  } else {
    r.frames.assign(mask.begin(), mask.end());
  }
  if (r.frames.empty()) throw InvalidArgument("nothing to evaluate");
  r.scores.resize(r.frames.size());
  for (std::size_t k = 0; k < r.frames.size(); ++k) {
    const std::size_t t = r.frames[k];
    if (t >= outputs.size()) throw InvalidArgument("mask index " + std::to_string(t) + " out of range");
    if (!outputs[t].same_shape(gt[t])) {
      throw InvalidArgument("frame " + std::to_string(t) + " is " + std::to_string(outputs[t].width()) +
                            "x" + std::to_string(outputs[t].height()) + " but ground truth is " +
                            std::to_string(gt[t].width()) + "x" + std::to_string(gt[t].height()));
    }
    r.scores[k] = metric == Metric::psnr ? psnr(outputs[t], gt[t]) : ssim(outputs[t], gt[t]);
  }
  r.mean = std::accumulate(r.scores.begin(), r.scores.end(), 0.0) / static_cast<double>(r.scores.size());
  return r;
}

PipelineEvaluation evaluate_pipeline(const PipelineSpec& spec, std::span<const Frame> lr,
                                     std::span<const Frame> gt, Metric metric,
                                     std::span<const std::size_t> mask) {
  if (lr.size() != gt.size()) throw InvalidArgument("LR and ground truth lengths differ");
  for (std::size_t t = 0; t < lr.size(); ++t) {
    if (gt[t].width() != lr[t].width() * spec.scale || gt[t].height() != lr[t].height() * spec.scale) {
      throw InvalidArgument("ground truth frame " + std::to_string(t) + " is not " +
                            std::to_string(spec.scale) + "x the LR frame");
    }
  }
  PipelineEvaluation ev;
  ev.outputs = run_pipeline(spec, lr);
  ev.report = evaluate_outputs(ev.outputs, gt, metric, mask);
  ev.report.pipeline = spec.kind;
  return ev;
}

bool InjectionTable::invariant() const {
  return std::all_of(rows.begin(), rows.end(), [](const LadderRow& r) { return r.max_abs_diff == 0; });
}

bool InjectionTable::non_increasing() const {
  for (std::size_t k = 1; k < rows.size(); ++k) {
    if (rows[k].mean_score > rows[k - 1].mean_score) return false;
  }
  return true;
}

nlohmann::json to_json(const InjectionTable& t) {
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& r : t.rows) {
    rows.push_back({{"replication", r.replication},
                    {"frame_count", r.frame_count},
                    {"mean_score", r.mean_score},
                    {"max_abs_diff", r.max_abs_diff}});
  }
  return {{"pipeline", to_string(t.pipeline)},
          {"metric", to_string(t.metric)},
          {"seed", t.seed},
          {"n_anchor_frames", t.n_anchor_frames},
          {"rows", rows},
          {"summary",
           {{"invariant", t.invariant()},
            {"non_increasing", t.non_increasing()},
            {"note", "scores are desk-scale proxies; the ladder shows the direction of the effect"}}}};
}

std::string to_csv(const InjectionTable& t) {
  std::ostringstream out;
  out.precision(17);
  out << "replication,frame_count,mean_score,max_abs_diff\n";
  for (const auto& r : t.rows) {
    out << r.replication << ',' << r.frame_count << ',' << r.mean_score << ',' << r.max_abs_diff << '\n';
  }
  return out.str();
}

InjectionTable compare_injection(const PipelineSpec& spec, std::span<const Frame> lr,
                                 std::span<const Frame> gt, Metric metric, std::uint32_t seed,
                                 int n_anchor_frames, std::span<const int> levels) {
  if (levels.empty()) throw InvalidArgument("no replication levels given");
  InjectionTable table;
  table.pipeline = spec.kind;
  table.metric = metric;
  table.seed = seed;
  table.n_anchor_frames = n_anchor_frames;

  std::vector<int> ladder(levels.begin(), levels.end());
  if (std::find(ladder.begin(), ladder.end(), 0) == ladder.end()) ladder.insert(ladder.begin(), 0);
  std::sort(ladder.begin(), ladder.end());
  ladder.erase(std::unique(ladder.begin(), ladder.end()), ladder.end());

  struct LevelRun {
    std::vector<Frame> outputs;  // original frames only
    LadderRow row;
  };
  std::vector<LevelRun> runs(ladder.size());
  parallel_for(ladder.size(), [&](std::size_t k) {
    const InjectionSpec ispec{seed, n_anchor_frames, ladder[k]};
    const auto lr_ext = inject_redundancy(lr, ispec);
    const auto gt_ext = inject_redundancy(gt, ispec);
    auto ev = evaluate_pipeline(spec, lr_ext.frames, gt_ext.frames, metric, lr_ext.mapping);
    for (auto idx : lr_ext.mapping) runs[k].outputs.push_back(std::move(ev.outputs[idx]));
    runs[k].row = {ladder[k], lr_ext.frames.size(), ev.report.mean, 0};
  });

  const auto& base = runs.front().outputs;
  for (auto& run : runs) {
    int diff = 0;
    for (std::size_t t = 0; t < base.size(); ++t) {
      auto a = base[t].samples();
      auto b = run.outputs[t].samples();
      for (std::size_t i = 0; i < a.size(); ++i) diff = std::max(diff, std::abs(int{a[i]} - int{b[i]}));
    }
    run.row.max_abs_diff = diff;
    table.rows.push_back(run.row);
  }
  return table;
}

}  // namespace vsrboost
