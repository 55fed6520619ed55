#include "cli.hpp"

#include <CLI11.hpp>

#include <atomic>
#include <chrono>
#include <csignal>
#include <fstream>
#include <iostream>
#include <thread>

#include "vsrboost/config.hpp"
#include "vsrboost/errors.hpp"
#include "vsrboost/harness.hpp"
#include "vsrboost/metrics.hpp"
#include "vsrboost/pdp.hpp"
#include "vsrboost/remote.hpp"
#include "vsrboost/trdm.hpp"
#include "vsrboost/vio.hpp"

namespace vsrboost::cli {
namespace {

std::atomic<bool> g_stop{false};

void on_signal(int) { g_stop = true; }

struct Common {
  std::string config;
  std::string in;
  std::string gt;
  std::string out;
  std::string report;
  std::string backend;
  std::optional<std::uint32_t> seed;
};

void add_common(CLI::App* cmd, Common& c, bool in_required) {
  cmd->add_option("--config", c.config, "JSON run configuration")->check(CLI::ExistingFile);
  auto* in = cmd->add_option("--in", c.in, "input sequence (directory or .y4m)");
  if (in_required) in->required();
  cmd->add_option("--report", c.report, "write a JSON report here");
  cmd->add_option("--seed", c.seed, "override the configured seed");
}

RunConfig resolve_config(const Common& c) {
  RunConfig cfg = c.config.empty() ? RunConfig{} : load_run_config(c.config);
  if (!c.backend.empty()) cfg.backend = parse_endpoint(c.backend);
  if (c.seed) cfg.seed = *c.seed;
  return cfg;
}

void emit_report(const Common& c, const nlohmann::json& report) {
  if (!c.report.empty()) write_text(c.report, report.dump(2) + "\n");
}

PatchGrid grid_for(const std::vector<Frame>& video, const RunConfig& cfg) {
  if (video.empty()) throw IoError("input sequence is empty");
  return build_grid(video.front().width(), video.front().height(), cfg.patch_size, cfg.stride);
}

int cmd_analyze(const Common& c, int window, std::optional<double> threshold, const std::string& reference) {
  const RunConfig cfg = resolve_config(c);
  const auto video = load_sequence(c.in);
  const auto report =
      stationary_statistics(video, grid_for(video, cfg), window > 0 ? window : cfg.stationary_window,
                            threshold.value_or(cfg.psnr_threshold),
                            reference == "consecutive" ? StationaryReference::consecutive
                                                       : StationaryReference::center);
  std::cout << "stationary ratio " << report.ratio << " (" << report.stationary << "/" << report.windows
            << " windows)\n";
  emit_report(c, {{"config", to_json(cfg)}, {"input", c.in}, {"stationary", to_json(report)}});
  return kOk;
}

int cmd_route(const Common& c) {
  const RunConfig cfg = resolve_config(c);
  const auto video = load_sequence(c.in);
  const auto grid = grid_for(video, cfg);
  const auto registry = cfg.backend
                            ? BackendRegistry::uniform(make_backend(cfg), BackendKind::remote, cfg.cost_weights)
                            : BackendRegistry::builtin(BackendKind::builtin_bicubic, cfg.cost_weights);
  FramePipelineConfig fcfg;
  fcfg.detection.gamma = cfg.gamma_routing;
  fcfg.detection.psnr_threshold = cfg.psnr_threshold;
  fcfg.flow = cfg.flow;
  fcfg.scale = cfg.scale;
  const auto result = boosted_frame_sequence(video, grid, fcfg, registry);
  if (!c.out.empty()) save_sequence(c.out, result.outputs);
  std::cout << "cost ratio " << result.total.ratio << " over " << result.total.positions
            << " patch decisions\n";
  nlohmann::json per_frame = nlohmann::json::array();
  for (const auto& r : result.per_frame) per_frame.push_back(to_json(r));
  emit_report(c, {{"config", to_json(cfg)}, {"input", c.in}, {"total", to_json(result.total)},
                  {"per_frame", per_frame}});
  return kOk;
}

int cmd_propagate(const Common& c, const std::string& mode, const std::string& trace_path) {
  const RunConfig cfg = resolve_config(c);
  const auto video = load_sequence(c.in);
  const auto grid = grid_for(video, cfg);
  VideoPipelineConfig vcfg;
  vcfg.scale = cfg.scale;
  vcfg.propagation.gamma = cfg.gamma_pdp;
  vcfg.propagation.hidden_channels = cfg.hidden_channels;
  vcfg.propagation.flow = cfg.flow;
  vcfg.propagation.mode = mode == "naive" ? PropagationMode::naive_sequential : PropagationMode::dynamic_pool;
  const ToyLinearRefiner refiner(static_cast<float>(cfg.alpha));
  auto upsampler = make_backend(cfg);

  std::ofstream trace_out;
  std::size_t replaced = 0;
  std::size_t entries = 0;
  if (!trace_path.empty()) {
    trace_out.open(trace_path);
    if (!trace_out) throw IoError("cannot write " + trace_path);
  }
  // boosted_video_pipeline serializes trace calls.
  const PoolTrace trace = [&](const PoolTraceEntry& e) {
    ++entries;
    replaced += e.replaced ? 1 : 0;
    if (trace_out.is_open()) trace_out << to_json(e).dump() << '\n';
  };
  const auto outputs = boosted_video_pipeline(video, grid, vcfg, refiner, *upsampler, trace);
  if (!c.out.empty()) save_sequence(c.out, outputs);
  std::cout << "propagated " << outputs.size() << " frames; pool replaced " << replaced << " of " << entries
            << " patch visits\n";
  emit_report(c, {{"config", to_json(cfg)},
                  {"input", c.in},
                  {"mode", mode},
                  {"frames", outputs.size()},
                  {"pool_visits", entries},
                  {"pool_replacements", replaced}});
  return kOk;
}

int cmd_simulate(const Common& c, const std::string& pipeline, const std::string& metric,
                 std::vector<int> levels, std::optional<int> anchors, const std::string& csv) {
  const RunConfig cfg = resolve_config(c);
  const auto gt = load_sequence(c.gt);
  const auto lr = c.in.empty() ? prepare_lr(gt, cfg.scale).lr : load_sequence(c.in);
  const auto spec = make_pipeline_spec(cfg, pipeline_kind_from_string(pipeline));
  const auto table = compare_injection(spec, lr, gt, metric_from_string(metric), cfg.seed,
                                       anchors.value_or(cfg.n_anchor_frames), levels);
  std::cout << to_csv(table);
  std::cout << "invariant: " << (table.invariant() ? "yes" : "no") << "\n";
  if (!csv.empty()) write_text(csv, to_csv(table));
  emit_report(c, {{"config", to_json(cfg)}, {"pipeline", to_json(spec)}, {"ladder", to_json(table)}});
  return kOk;
}

int cmd_metrics(const Common& c, const std::string& metric) {
  const auto a = load_sequence(c.in);
  const auto b = load_sequence(c.gt);
  nlohmann::json report{{"input", c.in}, {"gt", c.gt}};
  for (const auto m : {Metric::psnr, Metric::ssim}) {
    if (metric != "both" && metric != to_string(m)) continue;
    const auto r = evaluate_outputs(a, b, m);
    std::cout << "mean " << to_string(m) << " " << r.mean << "\n";
    report[to_string(m)] = to_json(r);
  }
  emit_report(c, report);
  return kOk;
}

int cmd_prepare(const Common& c, std::optional<int> scale) {
  const RunConfig cfg = resolve_config(c);
  const auto manifest = prepare_dataset(c.in, c.out, scale.value_or(cfg.scale));
  std::cout << "wrote " << manifest.frame_count << " frames at " << manifest.lr_width << "x"
            << manifest.lr_height << "\n";
  emit_report(c, to_json(manifest));
  return kOk;
}

int cmd_serve_mock(int port, const std::string& behavior, unsigned error_code) {
  MockConfig mc;
  if (behavior == "nearest") mc.behavior = MockBehavior::nearest;
  if (behavior == "error") mc.behavior = MockBehavior::error;
  mc.error_code = error_code;
  MockServer server(static_cast<std::uint16_t>(port), mc);
  std::cout << "listening on " << server.endpoint().to_string() << std::endl;
  g_stop = false;
  std::signal(SIGINT, on_signal);
  std::signal(SIGTERM, on_signal);
  while (!g_stop) std::this_thread::sleep_for(std::chrono::milliseconds(50));
  server.stop();
  std::cerr << "served " << server.requests_served() << " requests\n";
  return kOk;
}

}  // namespace

int run(const std::vector<std::string>& args) {
  CLI::App app{"Patch-level redundancy-aware video super-resolution toolkit", "vsrboost"};
  app.require_subcommand(1);
  app.failure_message(CLI::FailureMessage::help);

  Common c;
  std::function<int()> action;

  auto* analyze = app.add_subcommand("analyze", "stationary patch statistics of a sequence");
  add_common(analyze, c, true);
  int window = 0;
  std::optional<double> threshold;
  std::string reference = "center";
  analyze->add_option("--window", window, "temporal window length");
  analyze->add_option("--threshold", threshold, "PSNR threshold in dB");
  analyze->add_option("--reference", reference, "center or consecutive")
      ->check(CLI::IsMember({"center", "consecutive"}));
  analyze->callback([&] { action = [&] { return cmd_analyze(c, window, threshold, reference); }; });

  auto* route = app.add_subcommand("route", "redundancy-routed super-resolution of every frame");
  add_common(route, c, true);
  route->add_option("--out", c.out, "output directory or .y4m");
  route->add_option("--backend", c.backend, "remote backend host:port");
  route->callback([&] { action = [&] { return cmd_route(c); }; });

  auto* propagate = app.add_subcommand("propagate", "bidirectional pool propagation and reconstruction");
  add_common(propagate, c, true);
  std::string mode = "dynamic";
  std::string trace;
  propagate->add_option("--out", c.out, "output directory or .y4m");
  propagate->add_option("--backend", c.backend, "remote upsampler host:port");
  propagate->add_option("--mode", mode, "dynamic or naive")->check(CLI::IsMember({"dynamic", "naive"}));
  propagate->add_option("--trace", trace, "pool trace as JSON lines");
  propagate->callback([&] { action = [&] { return cmd_propagate(c, mode, trace); }; });

  auto* simulate = app.add_subcommand("simulate", "redundancy injection ladder");
  add_common(simulate, c, false);
  simulate->add_option("--gt", c.gt, "ground-truth sequence")->required();
  simulate->add_option("--backend", c.backend, "remote backend host:port");
  std::string pipeline = "boosted-video";
  std::string sim_metric = "psnr";
  std::vector<int> levels{0, 1, 2, 3, 4, 5};
  std::optional<int> anchors;
  std::string csv;
  simulate->add_option("--pipeline", pipeline, "bicubic, boosted-frame, boosted-video or naive-sequential")
      ->check(CLI::IsMember({"bicubic", "boosted-frame", "boosted-video", "naive-sequential"}));
  simulate->add_option("--metric", sim_metric)->check(CLI::IsMember({"psnr", "ssim"}));
  simulate->add_option("--levels", levels, "replication levels")->check(CLI::NonNegativeNumber);
  simulate->add_option("--anchors", anchors, "anchor frames per level")->check(CLI::NonNegativeNumber);
  simulate->add_option("--csv", csv, "write the ladder table as CSV");
  simulate->callback([&] { action = [&] { return cmd_simulate(c, pipeline, sim_metric, levels, anchors, csv); }; });

  auto* metrics = app.add_subcommand("metrics", "PSNR/SSIM between two sequences");
  add_common(metrics, c, true);
  metrics->add_option("--gt", c.gt, "reference sequence")->required();
  std::string metric = "psnr";
  metrics->add_option("--metric", metric)->check(CLI::IsMember({"psnr", "ssim", "both"}));
  metrics->callback([&] { action = [&] { return cmd_metrics(c, metric); }; });

  auto* prepare = app.add_subcommand("prepare", "bicubic LR set from ground truth");
  add_common(prepare, c, true);
  prepare->add_option("--out", c.out, "output directory")->required();
  std::optional<int> scale;
  prepare->add_option("--scale", scale)->check(CLI::IsMember({2, 4}));
  prepare->callback([&] { action = [&] { return cmd_prepare(c, scale); }; });

  auto* serve = app.add_subcommand("serve-mock", "serve the backend protocol locally");
  int port = 0;
  std::string behavior = "bicubic";
  unsigned error_code = 3;
  serve->add_option("--port", port, "0 picks a free port")->check(CLI::Range(0, 65535));
  serve->add_option("--behavior", behavior)->check(CLI::IsMember({"bicubic", "nearest", "error"}));
  serve->add_option("--error-code", error_code, "code sent by the error behavior");
  serve->callback([&] { action = [&] { return cmd_serve_mock(port, behavior, error_code); }; });

  std::vector<std::string> reversed(args.rbegin(), args.rend() - 1);
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    std::cout << app.help();
    return kOk;
  } catch (const CLI::CallForAllHelp& e) {
    std::cout << app.help("", CLI::AppFormatMode::All);
    return kOk;
  } catch (const CLI::ParseError& e) {
    app.exit(e, std::cerr, std::cerr);
    return kUsage;
  }

  try {
    return action();
  } catch (const InvalidArgument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const IoError& e) {
    std::cerr << "i/o error: " << e.what() << "\n";
    return kIo;
  } catch (const BackendError& e) {
    std::cerr << "backend error: " << e.what() << "\n";
    return kBackend;
  } catch (const ProtocolError& e) {
    std::cerr << "protocol error: " << e.what() << "\n";
    return kBackend;
  } catch (const std::filesystem::filesystem_error& e) {
    std::cerr << "i/o error: " << e.what() << "\n";
    return kIo;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kIo;
  }
}

}  // namespace vsrboost::cli
