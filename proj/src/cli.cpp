// fovtrace is licensed under the Apache License, Version 2.0.
// SPDX: Apache-2.0

#include "fovtrace/cli.h"

#include <CLI11.hpp>
#include <atomic>
#include <csignal>
#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <pthread.h>
#include <thread>

#include "fovtrace/benchmark.h"
#include "fovtrace/error.h"
#include "fovtrace/image_io.h"
#include "fovtrace/imaging.h"
#include "fovtrace/renderer.h"
#include "fovtrace/scene.h"
#include "fovtrace/service.h"

namespace fovtrace {

namespace fs = std::filesystem;

namespace {

struct CommonOptions {
  std::string config;
  std::string gaze;
  std::string mode;
  std::optional<uint64_t> seed;
  std::optional<int> width, height, spp, depth;
  int threads = 0;
};

void add_common(CLI::App* cmd, CommonOptions& o) {
  cmd->add_option("--config", o.config, "Render config JSON")->required();
  cmd->add_option("--gaze", o.gaze, "Gaze in image pixels, X,Y");
  cmd->add_option("--seed", o.seed, "Random seed");
  cmd->add_option("--width", o.width, "Override image width");
  cmd->add_option("--height", o.height, "Override image height");
  cmd->add_option("--spp", o.spp, "Override uniform samples per pixel");
  cmd->add_option("--depth", o.depth, "Override maximum path depth");
  cmd->add_option("--threads", o.threads, "Worker threads (0 = all cores)");
}

GazePoint parse_gaze(const std::string& text) {
  const auto comma = text.find(',');
  if (comma == std::string::npos) throw UsageError("--gaze expects X,Y");
  try {
    size_t a = 0, b = 0;
    const std::string xs = text.substr(0, comma), ys = text.substr(comma + 1);
    const double x = std::stod(xs, &a);
    const double y = std::stod(ys, &b);
    if (a != xs.size() || b != ys.size() || !std::isfinite(x) || !std::isfinite(y)) throw std::invalid_argument("");
    return {x, y};
  } catch (const std::exception&) {
    throw UsageError("--gaze expects X,Y, got '" + text + "'");
  }
}

RenderConfig load_config(const CommonOptions& o, std::ostream& err) {
  RenderConfig cfg = load_render_config(o.config);
  for (const auto& w : cfg.warnings) err << "warning: " << w << "\n";
  if (o.width) cfg.scene.camera.width = *o.width;
  if (o.height) cfg.scene.camera.height = *o.height;
  if (o.width || o.height) {
    cfg.scene.camera.validate();
    cfg.display.resolution_px = cfg.scene.camera.width;
    cfg.foveation.gaze = {0.5 * cfg.scene.camera.width, 0.5 * cfg.scene.camera.height};
  }
  if (o.spp) cfg.render.spp_uniform = *o.spp;
  if (o.depth) cfg.render.max_depth = *o.depth;
  if (o.seed) cfg.render.seed = *o.seed;
  if (cfg.render.spp_uniform < 1) throw UsageError("--spp must be >= 1");
  if (cfg.render.max_depth < 1) throw UsageError("--depth must be >= 1");
  if (!o.gaze.empty()) cfg.foveation.gaze = parse_gaze(o.gaze);
  const double w = cfg.scene.camera.width, h = cfg.scene.camera.height;
  const GazePoint g = cfg.foveation.gaze;
  const GazePoint clamped{std::clamp(g.x, 0.0, w - 1), std::clamp(g.y, 0.0, h - 1)};
  if (clamped.x != g.x || clamped.y != g.y) {
    err << "warning: gaze (" << g.x << "," << g.y << ") lies outside the " << int(w) << "x" << int(h)
        << " image; clamped to (" << clamped.x << "," << clamped.y << ")\n";
    cfg.foveation.gaze = clamped;
  }
  return cfg;
}

FrameRequest make_request(const RenderConfig& cfg, RenderMode mode, int threads) {
  FrameRequest r;
  r.mode = mode;
  r.foveation = cfg.foveation;
  r.display = cfg.display;
  r.spp_uniform = cfg.render.spp_uniform;
  r.max_depth = cfg.render.max_depth;
  r.seed = cfg.render.seed;
  r.workers = threads;
  return r;
}

fs::path with_suffix(const fs::path& out, const std::string& suffix) {
  fs::path p = out;
  p.replace_filename(out.stem().string() + suffix + (out.has_extension() ? out.extension().string() : ".png"));
  return p;
}

fs::path sidecar_path(const fs::path& image) { return fs::path(image.string() + ".regions.pgm"); }

void ensure_parent(const fs::path& p) {
  if (p.has_parent_path()) fs::create_directories(p.parent_path());
}

int cmd_render(const CommonOptions& o, const std::string& out_arg, bool overlay, bool hdr, std::ostream& out,
               std::ostream& err) {
  const std::string mode_text = o.mode.empty() ? "" : o.mode;
  RenderConfig cfg = load_config(o, err);
  std::vector<RenderMode> modes;
  bool both = false;
  if (mode_text.empty()) {
    modes = {cfg.render.mode};
  } else if (mode_text == "both") {
    modes = {RenderMode::Uniform, RenderMode::Foveated};
    both = true;
  } else {
    try {
      modes = {parse_render_mode(mode_text)};
    } catch (const ValidationError& e) {
      throw UsageError(e.what());
    }
  }
  const fs::path out_path = out_arg.empty() ? fs::path("render.png") : fs::path(out_arg);
  ensure_parent(out_path);

  const Renderer renderer(cfg.scene);
  for (RenderMode mode : modes) {
    const FrameResult result = renderer.render(make_request(cfg, mode, o.threads));
    const LdrImage image = postprocess(result.hdr);
    const fs::path image_path = both ? with_suffix(out_path, std::string("_") + render_mode_name(mode)) : out_path;
    write_ldr(image_path, image);
    out << "wrote " << image_path.string() << " (" << render_mode_name(mode) << ", "
        << result.tasks.total_samples() << " samples)\n";
    if (hdr) {
      fs::path pfm = image_path;
      pfm.replace_extension(".pfm");
      write_pfm(pfm, result.hdr.to_rgb());
      out << "wrote " << pfm.string() << "\n";
    }
    if (result.clamped > 0) err << "warning: " << result.clamped << " non-finite path contributions clamped\n";
    if (mode == RenderMode::Foveated) {
      write_pgm(sidecar_path(image_path), image.width, image.height, provenance_bytes(result.hdr.provenance));
      if (both || overlay) {
        const fs::path overlay_path = with_suffix(out_path, "_overlay");
        write_ldr(overlay_path, region_overlay(image, result.hdr.provenance, cfg.foveation.gaze, result.radii));
        out << "wrote " << overlay_path.string() << "\n";
      }
    }
  }
  return kExitOk;
}

int cmd_bench(const CommonOptions& o, const std::string& sweep, int frames, int warmup, const std::string& out_arg,
              std::ostream& out, std::ostream& err) {
  RenderConfig cfg = load_config(o, err);
  const auto entries = parse_sweep(sweep, cfg.foveation);
  const Renderer renderer(cfg.scene);
  BenchmarkOptions options;
  options.frames = frames;
  options.warmup = warmup;
  options.spp_uniform = cfg.render.spp_uniform;
  options.max_depth = cfg.render.max_depth;
  options.seed = cfg.render.seed;
  options.workers = o.threads;
  const auto reports =
      run_benchmark(renderer, cfg.display, entries, options, [&](const std::string& s) { err << "bench: " << s << "\n"; });
  const std::string table = format_benchmark_table(reports);
  out << table;
  if (!out_arg.empty()) {
    const fs::path json_path(out_arg);
    ensure_parent(json_path);
    std::ofstream json_file(json_path);
    json_file << benchmark_json(reports) << "\n";
    fs::path table_path = json_path;
    table_path.replace_extension(".txt");
    std::ofstream table_file(table_path);
    table_file << table;
    if (!json_file || !table_file) throw IoError("cannot write " + json_path.string());
    out << "wrote " << json_path.string() << " and " << table_path.string() << "\n";
  }
  return kExitOk;
}

int cmd_errmap(const std::string& test_path, const std::string& ref_path, const std::string& out_arg,
               const std::string& stats_arg, const std::string& regions_arg, std::ostream& out) {
  const LdrImage test = read_ldr(test_path);
  const LdrImage reference = read_ldr(ref_path);
  if (test.width != reference.width || test.height != reference.height) {
    throw ValidationError("image dimensions differ: " + std::to_string(test.width) + "x" +
                          std::to_string(test.height) + " vs " + std::to_string(reference.width) + "x" +
                          std::to_string(reference.height));
  }
  std::optional<std::vector<Region>> provenance;
  const fs::path sidecar = regions_arg.empty() ? sidecar_path(test_path) : fs::path(regions_arg);
  if (!regions_arg.empty() || fs::exists(sidecar)) {
    int w = 0, h = 0;
    const auto bytes = read_pgm(sidecar, w, h);
    if (w != test.width || h != test.height) throw ValidationError("provenance sidecar dimensions differ from the image");
    provenance = provenance_from_bytes(bytes);
  }
  const ErrorMap map = error_map(test, reference, provenance ? &*provenance : nullptr);

  const fs::path out_path = out_arg.empty() ? fs::path("errmap.png") : fs::path(out_arg);
  ensure_parent(out_path);
  write_ldr(out_path, error_heatmap(map));
  fs::path stats_path = stats_arg.empty() ? out_path : fs::path(stats_arg);
  if (stats_arg.empty()) stats_path.replace_extension(".json");

  nlohmann::ordered_json j;
  j["test"] = test_path;
  j["reference"] = ref_path;
  j["width"] = map.width;
  j["height"] = map.height;
  j["metric"] = "relative luminance difference |Yt-Yr|/(max(Yt,Yr)+0.01)";
  j["mean"] = map.mean;
  if (map.region_means) {
    j["region_means"] = {{"fovea", (*map.region_means)[0]},
                         {"intermediate", (*map.region_means)[1]},
                         {"periphery", (*map.region_means)[2]}};
    j["region_pixels"] = {{"fovea", map.region_pixels[0]},
                          {"intermediate", map.region_pixels[1]},
                          {"periphery", map.region_pixels[2]}};
  }
  std::ofstream stats(stats_path);
  stats << j.dump(2) << "\n";
  if (!stats) throw IoError("cannot write " + stats_path.string());

  out << "mean error " << map.mean << "\n";
  if (map.region_means) {
    out << "fovea " << (*map.region_means)[0] << " intermediate " << (*map.region_means)[1] << " periphery "
        << (*map.region_means)[2] << "\n";
  }
  out << "wrote " << out_path.string() << " and " << stats_path.string() << "\n";
  return kExitOk;
}

int cmd_serve(const CommonOptions& o, const std::string& bind, const std::string& static_dir, std::ostream& out,
              std::ostream& err) {
  RenderConfig cfg = load_config(o, err);
  ServiceOptions options;
  const auto colon = bind.rfind(':');
  if (colon == std::string::npos) throw UsageError("--bind expects HOST:PORT");
  options.host = bind.substr(0, colon);
  try {
    const int port = std::stoi(bind.substr(colon + 1));
    if (port < 0 || port > 65535) throw std::out_of_range("");
    options.port = uint16_t(port);
  } catch (const std::exception&) {
    throw UsageError("--bind expects HOST:PORT with a numeric port");
  }
  options.workers = o.threads;
  options.static_dir = static_dir;
  options.log = [&err](const std::string& s) { err << "serve: " << s << std::endl; };

  sigset_t signals;
  sigemptyset(&signals);
  sigaddset(&signals, SIGINT);
  sigaddset(&signals, SIGTERM);
  pthread_sigmask(SIG_BLOCK, &signals, nullptr);

  std::unique_ptr<FrameService> service;
  try {
    service = std::make_unique<FrameService>(cfg, options);
  } catch (const std::system_error& e) {
    throw IoError("cannot bind " + bind + ": " + e.what());
  }
  out << "listening on ws://" << options.host << ":" << service->port() << "/" << std::endl;

  std::atomic<bool> done{false};
  std::thread watcher([&] {
    timespec timeout{0, 200'000'000};
    while (!done) {
      if (sigtimedwait(&signals, nullptr, &timeout) > 0) {
        service->stop();
        return;
      }
    }
  });
  service->run();
  done = true;
  watcher.join();
  pthread_sigmask(SIG_UNBLOCK, &signals, nullptr);
  return kExitOk;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"fovtrace: gaze-contingent foveated path tracer"};
  app.require_subcommand(1);

  CommonOptions render_opts, bench_opts, serve_opts;
  std::string render_out, bench_out, bench_sweep = "uniform,32/16/8,32/8/4,32/2/1";
  bool overlay = false, hdr = false;
  int frames = 3, warmup = 1;

  CLI::App* render = app.add_subcommand("render", "Render uniform and/or foveated frames to PNG");
  add_common(render, render_opts);
  render->add_option("--mode", render_opts.mode, "uniform, foveated or both");
  render->add_option("--out", render_out, "Output PNG (both: <stem>_uniform, <stem>_foveated, <stem>_overlay)");
  render->add_flag("--overlay", overlay, "Also write the region overlay for a foveated render");
  render->add_flag("--hdr", hdr, "Also write linear radiance as PFM");

  CLI::App* bench = app.add_subcommand("bench", "Time a uniform baseline against a sweep of configurations");
  add_common(bench, bench_opts);
  bench->add_option("--sweep", bench_sweep, "Comma-separated entries: uniform | tau1/tau2/tau3[@n/m]");
  bench->add_option("--frames", frames, "Timed frames per configuration");
  bench->add_option("--warmup", warmup, "Untimed warm-up frames per configuration");
  bench->add_option("--out", bench_out, "Report JSON path (a .txt table is written next to it)");

  std::string test_path, ref_path, errmap_out, errmap_stats, errmap_regions;
  CLI::App* errmap = app.add_subcommand("errmap", "Per-pixel error heatmap of a test image against a reference");
  errmap->add_option("test", test_path, "Test image")->required();
  errmap->add_option("reference", ref_path, "Reference image")->required();
  errmap->add_option("--out", errmap_out, "Heatmap PNG");
  errmap->add_option("--stats", errmap_stats, "Stats JSON (default: heatmap path with .json)");
  errmap->add_option("--regions", errmap_regions, "Provenance sidecar (default: <test>.regions.pgm if present)");

  std::string bind = "127.0.0.1:8080", static_dir;
  CLI::App* serve = app.add_subcommand("serve", "Stream frames to one WebSocket client");
  add_common(serve, serve_opts);
  serve->add_option("--bind", bind, "HOST:PORT");
  serve->add_option("--static", static_dir, "Directory served for plain HTTP requests");

  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(int(argv.size()), argv.data());
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "usage error: " << e.what() << "\n";
    return kExitUsage;
  }

  try {
    if (render->parsed()) return cmd_render(render_opts, render_out, overlay, hdr, out, err);
    if (bench->parsed()) return cmd_bench(bench_opts, bench_sweep, frames, warmup, bench_out, out, err);
    if (errmap->parsed()) return cmd_errmap(test_path, ref_path, errmap_out, errmap_stats, errmap_regions, out);
    if (serve->parsed()) return cmd_serve(serve_opts, bind, static_dir, out, err);
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const IoError& e) {
    err << "error: " << e.what() << "\n";
    return kExitIo;
  } catch (const ValidationError& e) {
    err << "error: " << e.what() << "\n";
    return kExitIo;
  } catch (const fs::filesystem_error& e) {
    err << "error: " << e.what() << "\n";
    return kExitIo;
  } catch (const std::exception& e) {
    err << "runtime error: " << e.what() << "\n";
    return kExitRuntime;
  }
  return kExitUsage;
}

}  // namespace fovtrace
