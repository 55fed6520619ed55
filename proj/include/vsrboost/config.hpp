#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>

#include <json.hpp>

#include "vsrboost/backend.hpp"
#include "vsrboost/flow.hpp"
#include "vsrboost/harness.hpp"
#include "vsrboost/remote.hpp"

namespace vsrboost {

struct RunConfig {
  double gamma_routing = 1.0;
  double gamma_pdp = 0.2;
  int patch_size = 64;
  int stride = 56;
  int scale = 4;
  FlowParams flow;
  CostWeights cost_weights;
  std::optional<Endpoint> backend;  // builtin bicubic when absent
  int hidden_channels = 4;
  double alpha = 0.5;
  std::uint32_t seed = 0;
  // Analysis and simulation knobs.
  int stationary_window = 5;
  double psnr_threshold = 35.0;
  int n_anchor_frames = 10;

  void validate() const;
};

/// Missing keys keep their defaults; unknown keys are an error.
RunConfig run_config_from_json(const nlohmann::json& j);
nlohmann::json to_json(const RunConfig& config);
RunConfig load_run_config(const std::filesystem::path& path);

/// Backend named by the config: remote when an endpoint is set.
std::shared_ptr<Backend> make_backend(const RunConfig& config);
PipelineSpec make_pipeline_spec(const RunConfig& config, PipelineKind kind);

}  // namespace vsrboost
