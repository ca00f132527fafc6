// fovtrace is licensed under the Apache License, Version 2.0.
// SPDX: Apache-2.0

#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "fovtrace/foveation.h"
#include "fovtrace/renderer.h"
#include "fovtrace/scene.h"

namespace fovtrace {

struct BenchmarkEntry {
  std::string label;
  RenderMode mode = RenderMode::Foveated;
  FoveationConfig foveation;
};

// Parses a sweep such as "uniform,32/16/8,32/8/4@2/4": comma-separated
// entries, each "uniform" or "tau1/tau2/tau3" with an optional "@n/m".
// Unlisted fields come from `base`. Throws UsageError on an empty or
// malformed sweep.
std::vector<BenchmarkEntry> parse_sweep(const std::string& text, const FoveationConfig& base);

struct BenchmarkOptions {
  int frames = 1;
  int warmup = 0;
  int spp_uniform = 32;
  int max_depth = 3;
  uint64_t seed = 0;
  int workers = 0;
};

struct BenchmarkReport {
  std::string scene;
  size_t triangles = 0;
  std::string label;
  RenderMode mode = RenderMode::Foveated;
  FoveationConfig config;
  int width = 0;
  int height = 0;
  std::vector<double> frame_times_ms;
  std::vector<double> uniform_frame_times_ms;
  double avg_fps_uniform = 0;
  double avg_fps_foveated = 0;  // fps of this entry
  double speedup = 0;           // avg_fps_foveated / avg_fps_uniform
  std::array<int64_t, 3> region_samples{};
  int64_t total_samples = 0;
  int64_t uniform_samples = 0;
  double sample_ratio = 0;
  uint64_t clamped = 0;
  std::vector<uint64_t> frame_hashes;  // FNV-1a of each timed frame's sRGB bytes
};

using BenchmarkProgress = std::function<void(const std::string&)>;

// Times `warmup` + `frames` renders of a uniform baseline and of every entry.
// A frame covers task generation, tracing, reconstruction and post-processing;
// scene loading and BVH construction are excluded.
std::vector<BenchmarkReport> run_benchmark(const Renderer& renderer, const DisplayGeometry& display,
                                           const std::vector<BenchmarkEntry>& entries,
                                           const BenchmarkOptions& options, const BenchmarkProgress& progress = {});

std::string format_benchmark_table(const std::vector<BenchmarkReport>& reports);
std::string benchmark_json(const std::vector<BenchmarkReport>& reports);

uint64_t fnv1a(const std::vector<uint8_t>& bytes);

}  // namespace fovtrace
