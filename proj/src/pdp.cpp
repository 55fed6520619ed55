#include "vsrboost/pdp.hpp"

#include <future>
#include <mutex>

#include "vsrboost/parallel.hpp"

namespace vsrboost {

std::string to_string(Direction direction) {
  return direction == Direction::forward ? "forward" : "backward";
}

FloatImage lift(const ByteImage& image, int hidden_channels) {
  if (hidden_channels < 1) throw InvalidArgument("hidden channels must be positive");
  FloatImage out(image.width(), image.height(), hidden_channels);
  const int channels = image.channels();
  for (int y = 0; y < image.height(); ++y) {
    for (int x = 0; x < image.width(); ++x) {
      for (int k = 0; k < hidden_channels; ++k) {
        out.at(x, y, k) = static_cast<float>(image.at(x, y, k % channels)) / 255.0f;
      }
    }
  }
  return out;
}

FloatImage unlift(const FloatImage& hidden, int image_channels) {
  if (hidden.channels() < image_channels) {
    throw InvalidArgument("hidden state has fewer channels than the image");
  }
  FloatImage out(hidden.width(), hidden.height(), image_channels);
  for (int y = 0; y < hidden.height(); ++y) {
    for (int x = 0; x < hidden.width(); ++x) {
      for (int c = 0; c < image_channels; ++c) {
        float sum = 0.0f;
        int n = 0;
        for (int k = c; k < hidden.channels(); k += image_channels) {
          sum += hidden.at(x, y, k);
          ++n;
        }
        out.at(x, y, c) = sum / static_cast<float>(n);
      }
    }
  }
  return out;
}

ToyLinearRefiner::ToyLinearRefiner(float alpha) : alpha_(alpha) {
  if (!(alpha >= 0.0f && alpha <= 1.0f)) throw InvalidArgument("refiner alpha must be in [0, 1]");
}

FloatImage ToyLinearRefiner::refine(const FloatImage& warped, const FloatImage& lifted) const {
  if (!warped.same_shape(lifted)) throw InvalidArgument("refiner inputs differ in shape");
  FloatImage out(warped.width(), warped.height(), warped.channels());
  auto dst = out.samples();
  auto a = warped.samples();
  auto b = lifted.samples();
  for (std::size_t i = 0; i < dst.size(); ++i) dst[i] = alpha_ * a[i] + (1.0f - alpha_) * b[i];
  return out;
}

PatchPool init_pool(const Frame& frame, const PatchGrid& grid, Direction direction,
                    int hidden_channels, int frame_index) {
  PatchPool pool;
  pool.direction = direction;
  pool.rgb = decompose(frame, grid);
  pool.hidden.reserve(pool.rgb.size());
  for (const auto& p : pool.rgb) {
    pool.hidden.push_back(HiddenPatch{lift(p.image, hidden_channels), p.x, p.y, p.grid_index});
  }
  pool.source_frame.assign(pool.rgb.size(), frame_index);
  return pool;
}

Aggregation aggregate_features(const Frame& frame, const PatchGrid& grid, const PatchPool& pool,
                               const Refiner& refiner, const FlowParams& flow_params) {
  if (pool.size() != grid.size() || pool.hidden.size() != grid.size()) {
    throw InvalidArgument("pool holds " + std::to_string(pool.size()) + " positions but grid has " +
                          std::to_string(grid.size()));
  }
  Aggregation agg;
  agg.frame_patches = decompose(frame, grid);
  const std::size_t n = grid.size();
  agg.features.resize(n);
  agg.flows.resize(n);
  agg.motion.resize(n);
  parallel_for(n, [&](std::size_t i) {
    const auto& current = agg.frame_patches[i];
    const auto& pooled = pool.rgb[i];
    if (pooled.x != current.x || pooled.y != current.y || !pooled.image.same_shape(current.image)) {
      throw InvalidArgument("pool position " + std::to_string(i) + " does not match the grid");
    }
    const auto& hidden = pool.hidden[i];
    agg.flows[i] = estimate_flow(current.image, pooled.image, flow_params);
    agg.motion[i] = mean_abs_flow(agg.flows[i]);
    const FloatImage lifted = lift(current.image, hidden.channels());
    agg.features[i] = HiddenPatch{refiner.refine(warp(hidden.features, agg.flows[i]), lifted),
                                  current.x, current.y, i};
  });
  return agg;
}

PatchPool update_pool(PatchPool pool, std::span<const Patch> frame_patches,
                      std::span<const HiddenPatch> features, std::span<const double> motions,
                      double gamma, int frame_index) {
  const std::size_t n = pool.size();
  if (frame_patches.size() != n || features.size() != n || motions.size() != n) {
    throw InvalidArgument("update_pool inputs are not aligned with the pool");
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (motions[i] > gamma) {
      pool.rgb[i] = frame_patches[i];
      pool.hidden[i] = features[i];
      pool.source_frame[i] = frame_index;
    }
  }
  return pool;
}

nlohmann::json to_json(const PoolTraceEntry& e) {
  return {{"direction", to_string(e.direction)}, {"frame_index", e.frame_index},
          {"position", e.position},              {"m", e.motion},
          {"replaced", e.replaced},              {"source_frame", e.source_frame}};
}

std::vector<std::vector<HiddenPatch>> propagate(std::span<const Frame> video,
                                                const PatchGrid& grid,
                                                const PropagationConfig& config,
                                                const Refiner& refiner, Direction direction,
                                                const PoolTrace& trace) {
  if (video.empty()) throw InvalidArgument("cannot propagate over an empty video");
  const int n = static_cast<int>(video.size());
  const bool forward = direction == Direction::forward;
  const int first = forward ? 0 : n - 1;
  const int step = forward ? 1 : -1;
  const bool naive = config.mode == PropagationMode::naive_sequential;

  std::vector<std::vector<HiddenPatch>> features(video.size());
  PatchPool pool = init_pool(video[first], grid, direction, config.hidden_channels, first);
  int previous = -1;
  for (int t = first; t >= 0 && t < n; t += step) {
    if (!naive && previous >= 0 && video[t] == video[previous]) {
      features[t] = features[previous];
      if (trace) {
        for (std::size_t i = 0; i < grid.size(); ++i) {
          trace({direction, t, i, 0.0, false, pool.source_frame[i]});
        }
      }
      previous = t;
      continue;
    }
    Aggregation agg = aggregate_features(video[t], grid, pool, refiner, config.flow);
    if (naive) {
      // Frame-by-frame recurrence: the pool always holds the last frame.
      pool.rgb = agg.frame_patches;
      pool.hidden = agg.features;
      pool.source_frame.assign(grid.size(), t);
    } else {
      pool = update_pool(std::move(pool), agg.frame_patches, agg.features, agg.motion,
                         config.gamma, t);
    }
    if (trace) {
      for (std::size_t i = 0; i < grid.size(); ++i) {
        trace({direction, t, i, agg.motion[i], naive || agg.motion[i] > config.gamma,
               pool.source_frame[i]});
      }
    }
    features[t] = std::move(agg.features);
    previous = t;
  }
  return features;
}

Frame reconstruct(std::span<const HiddenPatch> forward, std::span<const HiddenPatch> backward,
                  const Frame& frame, const PatchGrid& grid, Backend& upsampler, int scale) {
  if (forward.size() != grid.size() || backward.size() != grid.size()) {
    throw InvalidArgument("reconstruct needs forward and backward features for every position");
  }
  if (scale < 1) throw InvalidArgument("reconstruct scale must be positive");
  const auto patches = decompose(frame, grid);
  std::vector<PatchSlice> slices;
  slices.reserve(patches.size());
  for (const auto& p : patches) slices.push_back({p.grid_index, p.x, p.y, {p.image}});
  auto base = upsampler.super_resolve(slices, scale);
  if (base.size() != patches.size()) throw BackendError("upsampler returned the wrong patch count");

  const int channels = frame.channels();
  std::vector<Patch> sr(patches.size());
  parallel_for(patches.size(), [&](std::size_t i) {
    const auto& lr = patches[i].image;
    const auto& hf = forward[i].features;
    const auto& hb = backward[i].features;
    if (!hf.same_shape(hb) || hf.width() != lr.width() || hf.height() != lr.height()) {
      throw InvalidArgument("hidden features for position " + std::to_string(i) +
                            " do not match the patch");
    }
    FloatImage mean(hf.width(), hf.height(), hf.channels());
    for (std::size_t k = 0; k < mean.samples().size(); ++k) {
      mean.samples()[k] = 0.5f * (hf.samples()[k] + hb.samples()[k]);
    }
    const FloatImage hidden_rgb = unlift(mean, channels);
    const FloatImage frame_rgb = unlift(lift(lr, hf.channels()), channels);

    ByteImage& up = base[i];
    if (up.width() != lr.width() * scale || up.height() != lr.height() * scale ||
        up.channels() != channels) {
      throw BackendError("upsampler output for position " + std::to_string(i) +
                         " has wrong dimensions");
    }
    ByteImage out(up.width(), up.height(), channels);
    for (int y = 0; y < up.height(); ++y) {
      for (int x = 0; x < up.width(); ++x) {
        for (int c = 0; c < channels; ++c) {
          const double residual = 255.0 * (static_cast<double>(hidden_rgb.at(x / scale, y / scale, c)) -
                                           static_cast<double>(frame_rgb.at(x / scale, y / scale, c)));
          out.at(x, y, c) = to_byte(up.at(x, y, c) + residual);
        }
      }
    }
    sr[i] = Patch{std::move(out), patches[i].x * scale, patches[i].y * scale, i};
  });
  return Frame(recombine(sr, grid, grid.width() * scale, grid.height() * scale), frame.index());
}

std::vector<Frame> boosted_video_pipeline(std::span<const Frame> video, const PatchGrid& grid,
                                          const VideoPipelineConfig& config,
                                          const Refiner& refiner, Backend& upsampler,
                                          const PoolTrace& trace) {
  if (video.empty()) throw InvalidArgument("cannot run the video pipeline on an empty video");
  std::mutex trace_mutex;
  PoolTrace locked;
  if (trace) {
    locked = [&](const PoolTraceEntry& e) {
      std::lock_guard lock(trace_mutex);
      trace(e);
    };
  }
  auto backward_pass = std::async(std::launch::async, [&] {
    return propagate(video, grid, config.propagation, refiner, Direction::backward, locked);
  });
  const auto forward = propagate(video, grid, config.propagation, refiner, Direction::forward, locked);
  const auto backward = backward_pass.get();

  std::vector<Frame> out;
  out.reserve(video.size());
  for (std::size_t t = 0; t < video.size(); ++t) {
    out.push_back(reconstruct(forward[t], backward[t], video[t], grid, upsampler, config.scale));
  }
  return out;
}

}  // namespace vsrboost
