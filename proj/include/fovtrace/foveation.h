// fovtrace is licensed under the Apache License, Version 2.0.
// SPDX: Apache-2.0

#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

namespace fovtrace {

// Physical viewing setup. Radii are computed along the horizontal axis:
// width_cm pairs with resolution_px (the rendered image width).
struct DisplayGeometry {
  double width_cm = 70.848;
  double height_cm = 39.852;
  double distance_cm = 60.0;
  int resolution_px = 3840;

  void validate() const;
};

enum class Region : uint8_t { Fovea = 0, Intermediate = 1, Periphery = 2 };

inline constexpr std::array<Region, 3> kRegions = {Region::Fovea, Region::Intermediate, Region::Periphery};

const char* region_name(Region r);

struct GazePoint {
  double x = 0;
  double y = 0;
};

struct FoveationConfig {
  int tau1 = 32;  // samples per foveal pixel
  int tau2 = 16;  // samples per n x n intermediate block
  int tau3 = 8;   // samples per m x m peripheral block
  int n = 2;
  int m = 4;
  double ef_deg = 5.2;
  double ei_deg = 17.0;
  GazePoint gaze;

  // Throws ValidationError naming the offending field.
  void validate() const;
  bool operator==(const FoveationConfig&) const = default;
};

struct RegionRadii {
  double fovea_px = 0;
  double intermediate_px = 0;
};

// Screen-space radius in pixels for an eccentricity in degrees:
//   r = 2 * d_e * R * tan(e / 2) / S
// Throws ValidationError for e outside [0, 180).
double eccentricity_to_radius(double eccentricity_deg, const DisplayGeometry& display);

RegionRadii region_radii(const FoveationConfig& config, const DisplayGeometry& display);

// Region of a point given its distance from the gaze. Both bounds inclusive
// toward the finer region: d == r_f is foveal, d == r_i is intermediate.
Region classify_distance(double distance_px, const RegionRadii& radii);

Region classify_point(double x, double y, const GazePoint& gaze, const RegionRadii& radii);

Region classify_pixel(int x, int y, const FoveationConfig& config, const DisplayGeometry& display);

struct Schedule {
  int samples = 0;
  int block_edge = 1;
};

Schedule sample_schedule(Region region, const FoveationConfig& config);

// One unit of tracing work: a rectangular pixel footprint traced with
// `samples` paths jittered across the footprint.
struct RayTask {
  int x0 = 0;
  int y0 = 0;
  int width = 1;
  int height = 1;
  int samples = 0;
  Region region = Region::Fovea;

  // Anchor in pixel-index coordinates (pixel (x, y) sits at (x, y)).
  double anchor_x() const { return x0 + 0.5 * (width - 1); }
  double anchor_y() const { return y0 + 0.5 * (height - 1); }
  int64_t pixel_count() const { return int64_t(width) * height; }
};

struct RegionCounts {
  int64_t tasks = 0;
  int64_t samples = 0;
  int64_t pixels = 0;
};

struct RayTaskList {
  int width = 0;
  int height = 0;
  // Block edges the list was generated with; n_block == m_block == 1 for
  // per-pixel lists.
  int n_block = 1;
  int m_block = 1;
  std::vector<RayTask> tasks;
  std::array<RegionCounts, 3> counts{};

  const RegionCounts& count(Region r) const { return counts[size_t(r)]; }
  int64_t total_samples() const;
  int64_t total_tasks() const { return int64_t(tasks.size()); }

  // Every pixel its own foveal task with `spp` samples.
  static RayTaskList uniform(int width, int height, int spp);
};

// Tiles the image with an m x m grid anchored at (0, 0). Each m-block is
// classified by its center: peripheral blocks become one task; the others
// split into n x n blocks (anchored at the m-block origin) which become one
// intermediate task, or per-pixel foveal tasks when their center is foveal.
// Work is only ever generated for the region it belongs to.
RayTaskList build_task_list(int width, int height, const FoveationConfig& config,
                            const DisplayGeometry& display);

struct BudgetReport {
  int width = 0;
  int height = 0;
  RegionRadii radii;
  std::array<RegionCounts, 3> regions{};
  int64_t total_tasks = 0;
  int64_t total_samples = 0;
  int uniform_spp = 0;
  int64_t uniform_samples = 0;
  double ratio = 0;  // uniform_samples / total_samples
  double omitted_fraction = 0;
};

BudgetReport compute_budget(const RayTaskList& tasks, const RegionRadii& radii, int uniform_spp);
BudgetReport compute_budget(int width, int height, const FoveationConfig& config,
                            const DisplayGeometry& display, int uniform_spp);

std::string to_json(const BudgetReport& report);

}  // namespace fovtrace
