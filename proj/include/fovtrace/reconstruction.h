// fovtrace is licensed under the Apache License, Version 2.0.
// SPDX: Apache-2.0

#pragma once

#include <vector>

#include "fovtrace/foveation.h"
#include "fovtrace/image_io.h"
#include "fovtrace/math.h"

namespace fovtrace {

// Full-resolution linear radiance plus the region that produced each pixel.
struct HdrFrame {
  int width = 0;
  int height = 0;
  std::vector<Vec3> pixels;
  std::vector<Region> provenance;

  HdrFrame() = default;
  HdrFrame(int w, int h) : width(w), height(h), pixels(size_t(w) * h), provenance(size_t(w) * h, Region::Fovea) {}

  Vec3& at(int x, int y) { return pixels[size_t(y) * width + x]; }
  const Vec3& at(int x, int y) const { return pixels[size_t(y) * width + x]; }
  Region region_at(int x, int y) const { return provenance[size_t(y) * width + x]; }

  RgbImage to_rgb() const { return {width, height, pixels}; }
};

// One mean radiance per task, in task-list order.
struct SparseFrame {
  RayTaskList tasks;
  std::vector<Vec3> values;
};

// Rectilinear anchor grid: one anchor per cell at the cell's center.
// Evaluation is bilinear between the surrounding anchors and clamps to the
// nearest anchor outside the anchor hull.
class AnchorGrid {
 public:
  AnchorGrid() = default;
  // Cells along one axis: [starts[i], starts[i+1]) with starts.back() == extent.
  AnchorGrid(std::vector<int> x_starts, std::vector<int> y_starts);

  // Cells of edge `block` tiling [0, extent), optionally nested in cells of
  // edge `outer` (sub-cells never straddle an outer cell).
  static std::vector<int> cell_starts(int extent, int block, int outer);

  int columns() const { return int(x_centers_.size()); }
  int rows() const { return int(y_centers_.size()); }
  int column_of(int x) const { return x_cell_[size_t(x)]; }
  int row_of(int y) const { return y_cell_[size_t(y)]; }
  double center_x(int column) const { return x_centers_[size_t(column)]; }
  double center_y(int row) const { return y_centers_[size_t(row)]; }
  int cell_x0(int column) const { return x_starts_[size_t(column)]; }
  int cell_y0(int row) const { return y_starts_[size_t(row)]; }
  int cell_width(int column) const { return x_starts_[size_t(column) + 1] - x_starts_[size_t(column)]; }
  int cell_height(int row) const { return y_starts_[size_t(row) + 1] - y_starts_[size_t(row)]; }

  Vec3& value(int column, int row) { return values_[size_t(row) * x_centers_.size() + size_t(column)]; }
  const Vec3& value(int column, int row) const { return values_[size_t(row) * x_centers_.size() + size_t(column)]; }

  // Bilinear interpolation at a pixel-index position.
  Vec3 interpolate(double x, double y) const;

 private:
  std::vector<int> x_starts_, y_starts_;
  std::vector<double> x_centers_, y_centers_;
  std::vector<int> x_cell_, y_cell_;
  std::vector<Vec3> values_;
};

// Foveal pixels are copied; intermediate pixels interpolate the n-level
// anchor grid, peripheral pixels the m-level grid. Finer data feeds coarser
// anchors (block averages), and n-level anchors inside peripheral blocks are
// filled from the m-level grid, so interpolation is continuous across region
// seams. Runs in linear radiance.
HdrFrame reconstruct(const SparseFrame& sparse, int workers = 0);

struct Accumulation {
  HdrFrame frame;
  int count = 0;
};

// Running mean over frames; `reset` restarts from `current`.
// Throws ValidationError on dimension mismatch.
Accumulation accumulate(const Accumulation& history, const HdrFrame& current, bool reset);

}  // namespace fovtrace
