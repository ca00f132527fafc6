// fovtrace is licensed under the Apache License, Version 2.0.
// SPDX: Apache-2.0

#include "fovtrace/reconstruction.h"

#include <algorithm>

#include "fovtrace/error.h"
#include "fovtrace/parallel.h"

namespace fovtrace {

namespace {

struct Lerp {
  int i0 = 0;
  int i1 = 0;
  double t = 0;
};

Lerp locate(const std::vector<double>& centers, double p) {
  const int n = int(centers.size());
  if (n == 1 || p <= centers.front()) return {0, 0, 0};
  if (p >= centers.back()) return {n - 1, n - 1, 0};
  const auto it = std::upper_bound(centers.begin(), centers.end(), p);
  const int i1 = int(it - centers.begin());
  const int i0 = i1 - 1;
  return {i0, i1, (p - centers[size_t(i0)]) / (centers[size_t(i1)] - centers[size_t(i0)])};
}

}  // namespace

AnchorGrid::AnchorGrid(std::vector<int> x_starts, std::vector<int> y_starts)
    : x_starts_(std::move(x_starts)), y_starts_(std::move(y_starts)) {
  auto setup = [](const std::vector<int>& starts, std::vector<double>& centers, std::vector<int>& cell) {
    centers.clear();
    cell.assign(size_t(starts.back()), 0);
    for (size_t i = 0; i + 1 < starts.size(); ++i) {
      centers.push_back(starts[i] + 0.5 * (starts[i + 1] - starts[i] - 1));
      for (int p = starts[i]; p < starts[i + 1]; ++p) cell[size_t(p)] = int(i);
    }
  };
  setup(x_starts_, x_centers_, x_cell_);
  setup(y_starts_, y_centers_, y_cell_);
  values_.assign(x_centers_.size() * y_centers_.size(), Vec3{0.0f});
}

std::vector<int> AnchorGrid::cell_starts(int extent, int block, int outer) {
  std::vector<int> starts;
  for (int o = 0; o < extent; o += outer) {
    const int end = std::min(extent, o + outer);
    for (int s = o; s < end; s += block) starts.push_back(s);
  }
  starts.push_back(extent);
  return starts;
}

Vec3 AnchorGrid::interpolate(double x, double y) const {
  const Lerp lx = locate(x_centers_, x);
  const Lerp ly = locate(y_centers_, y);
  const float tx = float(lx.t), ty = float(ly.t);
  const Vec3 top = value(lx.i0, ly.i0) * (1.0f - tx) + value(lx.i1, ly.i0) * tx;
  const Vec3 bottom = value(lx.i0, ly.i1) * (1.0f - tx) + value(lx.i1, ly.i1) * tx;
  return top * (1.0f - ty) + bottom * ty;
}

HdrFrame reconstruct(const SparseFrame& sparse, int workers) {
  const RayTaskList& list = sparse.tasks;
  if (sparse.values.size() != list.tasks.size())
    throw ValidationError("sparse frame needs exactly one value per task");
  const int width = list.width;
  const int height = list.height;
  HdrFrame out(width, height);

  const int n = list.n_block;
  const int m = list.m_block;
  AnchorGrid fine_grid(AnchorGrid::cell_starts(width, n, m), AnchorGrid::cell_starts(height, n, m));
  AnchorGrid coarse_grid(AnchorGrid::cell_starts(width, m, m), AnchorGrid::cell_starts(height, m, m));
  std::vector<uint8_t> fine_known(size_t(fine_grid.columns()) * fine_grid.rows(), 0);
  std::vector<uint8_t> coarse_known(size_t(coarse_grid.columns()) * coarse_grid.rows(), 0);
  auto fine_index = [&](int c, int r) { return size_t(r) * fine_grid.columns() + size_t(c); };
  auto coarse_index = [&](int c, int r) { return size_t(r) * coarse_grid.columns() + size_t(c); };

  // Scatter task values: pixels and provenance first, anchors per level.
  std::vector<Vec3> fine_sum(fine_known.size(), Vec3{0.0f});
  std::vector<int> fine_pixels(fine_known.size(), 0);
  for (size_t i = 0; i < list.tasks.size(); ++i) {
    const RayTask& task = list.tasks[i];
    const Vec3 v = sparse.values[i];
    for (int y = task.y0; y < task.y0 + task.height; ++y)
      for (int x = task.x0; x < task.x0 + task.width; ++x) out.provenance[size_t(y) * width + x] = task.region;
    switch (task.region) {
      case Region::Fovea: {
        if (task.width != 1 || task.height != 1) throw ValidationError("foveal tasks must be single pixels");
        out.at(task.x0, task.y0) = v;
        const size_t fi = fine_index(fine_grid.column_of(task.x0), fine_grid.row_of(task.y0));
        fine_sum[fi] += v;
        fine_pixels[fi] += 1;
        break;
      }
      case Region::Intermediate: {
        const int c = fine_grid.column_of(task.x0), r = fine_grid.row_of(task.y0);
        if (fine_grid.cell_x0(c) != task.x0 || fine_grid.cell_y0(r) != task.y0 || fine_grid.cell_width(c) != task.width ||
            fine_grid.cell_height(r) != task.height)
          throw ValidationError("intermediate task does not match an n-block");
        fine_grid.value(c, r) = v;
        fine_known[fine_index(c, r)] = 1;
        break;
      }
      case Region::Periphery: {
        const int c = coarse_grid.column_of(task.x0), r = coarse_grid.row_of(task.y0);
        if (coarse_grid.cell_x0(c) != task.x0 || coarse_grid.cell_y0(r) != task.y0 ||
            coarse_grid.cell_width(c) != task.width || coarse_grid.cell_height(r) != task.height)
          throw ValidationError("peripheral task does not match an m-block");
        coarse_grid.value(c, r) = v;
        coarse_known[coarse_index(c, r)] = 1;
        break;
      }
    }
  }

  // n-level anchors of fully foveal n-blocks are their pixel means.
  for (int r = 0; r < fine_grid.rows(); ++r) {
    for (int c = 0; c < fine_grid.columns(); ++c) {
      const size_t fi = fine_index(c, r);
      if (fine_known[fi] || fine_pixels[fi] == 0) continue;
      if (fine_pixels[fi] != fine_grid.cell_width(c) * fine_grid.cell_height(r))
        throw ValidationError("n-block partially covered by foveal tasks");
      fine_grid.value(c, r) = fine_sum[fi] / float(fine_pixels[fi]);
      fine_known[fi] = 1;
    }
  }

  // m-level anchors of subdivided m-blocks are area-weighted n-anchor means.
  std::vector<Vec3> coarse_sum(coarse_known.size(), Vec3{0.0f});
  std::vector<int> coarse_area(coarse_known.size(), 0);
  for (int r = 0; r < fine_grid.rows(); ++r) {
    for (int c = 0; c < fine_grid.columns(); ++c) {
      if (!fine_known[fine_index(c, r)]) continue;
      const int area = fine_grid.cell_width(c) * fine_grid.cell_height(r);
      const size_t ci = coarse_index(coarse_grid.column_of(fine_grid.cell_x0(c)), coarse_grid.row_of(fine_grid.cell_y0(r)));
      coarse_sum[ci] += fine_grid.value(c, r) * float(area);
      coarse_area[ci] += area;
    }
  }
  for (int r = 0; r < coarse_grid.rows(); ++r) {
    for (int c = 0; c < coarse_grid.columns(); ++c) {
      const size_t ci = coarse_index(c, r);
      if (coarse_known[ci]) continue;
      if (coarse_area[ci] != coarse_grid.cell_width(c) * coarse_grid.cell_height(r))
        throw ValidationError("task list does not cover the image");
      coarse_grid.value(c, r) = coarse_sum[ci] / float(coarse_area[ci]);
    }
  }

  // n-level anchors inside peripheral m-blocks come from the m-level field.
  for (int r = 0; r < fine_grid.rows(); ++r)
    for (int c = 0; c < fine_grid.columns(); ++c)
      if (!fine_known[fine_index(c, r)])
        fine_grid.value(c, r) = coarse_grid.interpolate(fine_grid.center_x(c), fine_grid.center_y(r));

  parallel_for(size_t(height), workers, 8, [&](size_t y0, size_t y1) {
    for (int y = int(y0); y < int(y1); ++y) {
      for (int x = 0; x < width; ++x) {
        switch (out.region_at(x, y)) {
          case Region::Fovea:
            break;
          case Region::Intermediate:
            out.at(x, y) = fine_grid.interpolate(x, y);
            break;
          case Region::Periphery:
            out.at(x, y) = coarse_grid.interpolate(x, y);
            break;
        }
      }
    }
  });
  return out;
}

Accumulation accumulate(const Accumulation& history, const HdrFrame& current, bool reset) {
  if (reset || history.count == 0) return {current, 1};
  if (history.frame.width != current.width || history.frame.height != current.height)
    throw ValidationError("accumulation frame dimensions differ");
  Accumulation out{history.frame, history.count + 1};
  const float w = 1.0f / float(out.count);
  for (size_t i = 0; i < out.frame.pixels.size(); ++i) {
    Vec3& acc = out.frame.pixels[i];
    acc += (current.pixels[i] - acc) * w;
  }
  out.frame.provenance = current.provenance;
  return out;
}

}  // namespace fovtrace
