#include "vsrboost/config.hpp"

#include <set>

#include "vsrboost/errors.hpp"
#include "vsrboost/vio.hpp"

namespace vsrboost {
namespace {

void reject_unknown(const nlohmann::json& j, const std::set<std::string>& known, const std::string& where) {
  if (!j.is_object()) throw InvalidArgument(where + " must be a JSON object");
  for (const auto& [key, value] : j.items()) {
    if (!known.contains(key)) throw InvalidArgument("unknown config key '" + where + key + "'");
  }
}

template <typename T>
void take(const nlohmann::json& j, const char* key, T& out, const std::string& where) {
  if (!j.contains(key)) return;
  try {
    out = j.at(key).get<T>();
  } catch (const nlohmann::json::exception&) {
    throw InvalidArgument("config key '" + where + key + "' has the wrong type");
  }
}

}  // namespace

void RunConfig::validate() const {
  if (scale != 2 && scale != 4) throw InvalidArgument("scale must be 2 or 4");
  if (patch_size < 1) throw InvalidArgument("patch_size must be positive");
  if (stride < 1 || stride > patch_size) throw InvalidArgument("stride must be in [1, patch_size]");
  if (!(gamma_routing >= 0) || !(gamma_pdp >= 0)) throw InvalidArgument("thresholds must be non-negative");
  if (hidden_channels < 1) throw InvalidArgument("hidden_channels must be positive");
  if (!(alpha >= 0 && alpha <= 1)) throw InvalidArgument("alpha must be in [0, 1]");
  if (stationary_window < 1) throw InvalidArgument("stationary_window must be positive");
  if (n_anchor_frames < 0) throw InvalidArgument("n_anchor_frames must be non-negative");
  if (!(cost_weights.l1 > 0 && cost_weights.l3 > 0 && cost_weights.l5 > 0)) {
    throw InvalidArgument("cost weights must be positive");
  }
  flow.validate();
}

RunConfig run_config_from_json(const nlohmann::json& j) {
  reject_unknown(j,
                 {"gamma_routing", "gamma_pdp", "patch_size", "stride", "scale", "flow", "cost_weights",
                  "backend", "hidden_channels", "alpha", "seed", "stationary_window", "psnr_threshold",
                  "n_anchor_frames"},
                 "");
  RunConfig c;
  take(j, "gamma_routing", c.gamma_routing, "");
  take(j, "gamma_pdp", c.gamma_pdp, "");
  take(j, "patch_size", c.patch_size, "");
  take(j, "stride", c.stride, "");
  take(j, "scale", c.scale, "");
  take(j, "hidden_channels", c.hidden_channels, "");
  take(j, "alpha", c.alpha, "");
  take(j, "seed", c.seed, "");
  take(j, "stationary_window", c.stationary_window, "");
  take(j, "psnr_threshold", c.psnr_threshold, "");
  take(j, "n_anchor_frames", c.n_anchor_frames, "");
  if (j.contains("flow")) {
    const auto& f = j["flow"];
    reject_unknown(f, {"pyramid_levels", "block_size", "iterations_per_level", "search_radius_coarsest"},
                   "flow.");
    take(f, "pyramid_levels", c.flow.pyramid_levels, "flow.");
    take(f, "block_size", c.flow.block_size, "flow.");
    take(f, "iterations_per_level", c.flow.iterations_per_level, "flow.");
    take(f, "search_radius_coarsest", c.flow.search_radius_coarsest, "flow.");
  }
  if (j.contains("cost_weights")) {
    const auto& w = j["cost_weights"];
    reject_unknown(w, {"L1", "L3", "L5"}, "cost_weights.");
    take(w, "L1", c.cost_weights.l1, "cost_weights.");
    take(w, "L3", c.cost_weights.l3, "cost_weights.");
    take(w, "L5", c.cost_weights.l5, "cost_weights.");
  }
  if (j.contains("backend") && !j["backend"].is_null()) {
    std::string text;
    take(j, "backend", text, "");
    if (!text.empty() && text != "builtin-bicubic") c.backend = parse_endpoint(text);
  }
  c.validate();
  return c;
}

nlohmann::json to_json(const RunConfig& c) {
  return {{"gamma_routing", c.gamma_routing},
          {"gamma_pdp", c.gamma_pdp},
          {"patch_size", c.patch_size},
          {"stride", c.stride},
          {"scale", c.scale},
          {"flow",
           {{"pyramid_levels", c.flow.pyramid_levels},
            {"block_size", c.flow.block_size},
            {"iterations_per_level", c.flow.iterations_per_level},
            {"search_radius_coarsest", c.flow.search_radius_coarsest}}},
          {"cost_weights", {{"L1", c.cost_weights.l1}, {"L3", c.cost_weights.l3}, {"L5", c.cost_weights.l5}}},
          {"backend", c.backend ? nlohmann::json(c.backend->to_string()) : nlohmann::json(nullptr)},
          {"hidden_channels", c.hidden_channels},
          {"alpha", c.alpha},
          {"seed", c.seed},
          {"stationary_window", c.stationary_window},
          {"psnr_threshold", c.psnr_threshold},
          {"n_anchor_frames", c.n_anchor_frames}};
}

RunConfig load_run_config(const std::filesystem::path& path) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(read_text(path));
  } catch (const nlohmann::json::parse_error& e) {
    throw InvalidArgument(path.string() + ": " + e.what());
  }
  return run_config_from_json(j);
}

std::shared_ptr<Backend> make_backend(const RunConfig& config) {
  if (config.backend) return std::make_shared<RemoteBackend>(*config.backend);
  return make_builtin_backend(BackendKind::builtin_bicubic);
}

PipelineSpec make_pipeline_spec(const RunConfig& c, PipelineKind kind) {
  PipelineSpec s;
  s.kind = kind;
  s.patch_size = c.patch_size;
  s.stride = c.stride;
  s.scale = c.scale;
  s.detection.gamma = c.gamma_routing;
  s.detection.psnr_threshold = c.psnr_threshold;
  s.propagation.gamma = c.gamma_pdp;
  s.propagation.hidden_channels = c.hidden_channels;
  s.flow = c.flow;
  s.weights = c.cost_weights;
  s.alpha = static_cast<float>(c.alpha);
  if (c.backend) s.backend = std::make_shared<RemoteBackend>(*c.backend);
  return s;
}

}  // namespace vsrboost
