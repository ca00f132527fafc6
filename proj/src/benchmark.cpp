// fovtrace is licensed under the Apache License, Version 2.0.
// SPDX: Apache-2.0

#include "fovtrace/benchmark.h"

#include <chrono>
#include <cstdio>
#include <json.hpp>
#include <numeric>
#include <sstream>

#include "fovtrace/error.h"
#include "fovtrace/imaging.h"

namespace fovtrace {

namespace {

std::vector<std::string> split(const std::string& text, char sep) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : text) {
    if (c == sep) {
      out.push_back(cur);
      cur.clear();
    } else if (!std::isspace(static_cast<unsigned char>(c))) {
      cur += c;
    }
  }
  out.push_back(cur);
  return out;
}

int parse_int(const std::string& s, const std::string& entry) {
  try {
    size_t used = 0;
    const int v = std::stoi(s, &used);
    if (used == s.size()) return v;
  } catch (const std::exception&) {
  }
  throw UsageError("malformed sweep entry '" + entry + "'");
}

double mean_fps(const std::vector<double>& times_ms) {
  if (times_ms.empty()) return 0.0;
  const double avg_ms = std::accumulate(times_ms.begin(), times_ms.end(), 0.0) / double(times_ms.size());
  return avg_ms > 0 ? 1000.0 / avg_ms : 0.0;
}

}  // namespace

std::vector<BenchmarkEntry> parse_sweep(const std::string& text, const FoveationConfig& base) {
  std::vector<BenchmarkEntry> entries;
  for (const std::string& item : split(text, ',')) {
    if (item.empty()) continue;
    BenchmarkEntry e;
    e.label = item;
    e.foveation = base;
    if (item == "uniform") {
      e.mode = RenderMode::Uniform;
      entries.push_back(e);
      continue;
    }
    const auto at = item.find('@');
    const auto taus = split(item.substr(0, at), '/');
    if (taus.size() != 3) throw UsageError("malformed sweep entry '" + item + "' (expected tau1/tau2/tau3)");
    e.foveation.tau1 = parse_int(taus[0], item);
    e.foveation.tau2 = parse_int(taus[1], item);
    e.foveation.tau3 = parse_int(taus[2], item);
    if (at != std::string::npos) {
      const auto blocks = split(item.substr(at + 1), '/');
      if (blocks.size() != 2) throw UsageError("malformed sweep entry '" + item + "' (expected @n/m)");
      e.foveation.n = parse_int(blocks[0], item);
      e.foveation.m = parse_int(blocks[1], item);
    }
    try {
      e.foveation.validate();
    } catch (const ValidationError& err) {
      throw UsageError("sweep entry '" + item + "': " + err.what());
    }
    entries.push_back(e);
  }
  if (entries.empty()) throw UsageError("sweep must list at least one configuration");
  return entries;
}

uint64_t fnv1a(const std::vector<uint8_t>& bytes) {
  uint64_t h = 0xcbf29ce484222325ull;
  for (uint8_t b : bytes) {
    h ^= b;
    h *= 0x100000001b3ull;
  }
  return h;
}

std::vector<BenchmarkReport> run_benchmark(const Renderer& renderer, const DisplayGeometry& display,
                                           const std::vector<BenchmarkEntry>& entries,
                                           const BenchmarkOptions& options, const BenchmarkProgress& progress) {
  if (options.frames < 1) throw UsageError("benchmark needs at least one timed frame");
  if (options.warmup < 0) throw UsageError("warmup frame count must be >= 0");

  struct Timing {
    std::vector<double> times_ms;
    std::vector<uint64_t> hashes;
    RayTaskList tasks;
    uint64_t clamped = 0;
  };
  auto time_config = [&](RenderMode mode, const FoveationConfig& foveation) {
    Timing timing;
    FrameRequest request;
    request.mode = mode;
    request.foveation = foveation;
    request.display = display;
    request.spp_uniform = options.spp_uniform;
    request.max_depth = options.max_depth;
    request.seed = options.seed;
    request.workers = options.workers;
    for (int f = 0; f < options.warmup + options.frames; ++f) {
      request.frame_index = uint32_t(f);
      const auto start = std::chrono::steady_clock::now();
      FrameResult result = renderer.render(request);
      const LdrImage image = postprocess(result.hdr);
      const auto stop = std::chrono::steady_clock::now();
      if (f < options.warmup) continue;
      timing.times_ms.push_back(std::chrono::duration<double, std::milli>(stop - start).count());
      timing.hashes.push_back(fnv1a(image.rgb));
      timing.clamped += result.clamped;
      timing.tasks = std::move(result.tasks);
    }
    return timing;
  };

  if (progress) progress("uniform baseline (" + std::to_string(options.spp_uniform) + " spp)");
  const Timing baseline = time_config(RenderMode::Uniform, entries.empty() ? FoveationConfig{} : entries.front().foveation);
  const double fps_uniform = mean_fps(baseline.times_ms);

  std::vector<BenchmarkReport> reports;
  for (const BenchmarkEntry& entry : entries) {
    if (progress) progress(entry.label);
    const Timing t = time_config(entry.mode, entry.foveation);
    BenchmarkReport r;
    r.scene = renderer.scene().name;
    r.triangles = renderer.scene().triangle_count();
    r.label = entry.label;
    r.mode = entry.mode;
    r.config = entry.foveation;
    r.width = renderer.width();
    r.height = renderer.height();
    r.frame_times_ms = t.times_ms;
    r.uniform_frame_times_ms = baseline.times_ms;
    r.avg_fps_uniform = fps_uniform;
    r.avg_fps_foveated = mean_fps(t.times_ms);
    r.speedup = fps_uniform > 0 ? r.avg_fps_foveated / fps_uniform : 0.0;
    for (Region region : kRegions) r.region_samples[size_t(region)] = t.tasks.count(region).samples;
    r.total_samples = t.tasks.total_samples();
    r.uniform_samples = int64_t(r.width) * r.height * options.spp_uniform;
    r.sample_ratio = r.total_samples > 0 ? double(r.uniform_samples) / double(r.total_samples) : 0.0;
    r.clamped = t.clamped;
    r.frame_hashes = t.hashes;
    reports.push_back(std::move(r));
  }
  return reports;
}

std::string format_benchmark_table(const std::vector<BenchmarkReport>& reports) {
  std::ostringstream out;
  char line[256];
  std::snprintf(line, sizeof(line), "%-14s %10s %-16s %12s %12s %10s %10s %8s\n", "Scene", "Triangles", "Config",
                "fps(unif)", "fps(fov)", "Speed-up", "SampleRat", "Clamped");
  out << line;
  for (const auto& r : reports) {
    std::snprintf(line, sizeof(line), "%-14s %10zu %-16s %12.4f %12.4f %9.2fx %9.2fx %8llu\n", r.scene.c_str(),
                  r.triangles, r.label.c_str(), r.avg_fps_uniform, r.avg_fps_foveated, r.speedup, r.sample_ratio,
                  static_cast<unsigned long long>(r.clamped));
    out << line;
  }
  return out.str();
}

std::string benchmark_json(const std::vector<BenchmarkReport>& reports) {
  nlohmann::ordered_json root;
  root["timing"] = "wall clock per frame: task generation, tracing, reconstruction, post-processing";
  root["reports"] = nlohmann::ordered_json::array();
  for (const auto& r : reports) {
    nlohmann::ordered_json j;
    j["scene"] = r.scene;
    j["triangles"] = r.triangles;
    j["label"] = r.label;
    j["mode"] = render_mode_name(r.mode);
    j["config"] = {{"tau1", r.config.tau1}, {"tau2", r.config.tau2}, {"tau3", r.config.tau3},
                   {"n", r.config.n},       {"m", r.config.m},       {"ef_deg", r.config.ef_deg},
                   {"ei_deg", r.config.ei_deg}, {"gaze_px", {r.config.gaze.x, r.config.gaze.y}}};
    j["width"] = r.width;
    j["height"] = r.height;
    j["frame_times_ms"] = r.frame_times_ms;
    j["uniform_frame_times_ms"] = r.uniform_frame_times_ms;
    j["avg_fps_uniform"] = r.avg_fps_uniform;
    j["avg_fps_foveated"] = r.avg_fps_foveated;
    j["speedup"] = r.speedup;
    j["samples"] = {{"fovea", r.region_samples[0]},
                    {"intermediate", r.region_samples[1]},
                    {"periphery", r.region_samples[2]},
                    {"total", r.total_samples},
                    {"uniform", r.uniform_samples}};
    j["sample_ratio"] = r.sample_ratio;
    j["clamped"] = r.clamped;
    j["frame_hashes"] = r.frame_hashes;
    root["reports"].push_back(j);
  }
  return root.dump(2);
}

}  // namespace fovtrace
