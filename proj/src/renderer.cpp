// fovtrace is licensed under the Apache License, Version 2.0.
// SPDX: Apache-2.0

#include "fovtrace/renderer.h"

#include "fovtrace/error.h"
#include "fovtrace/parallel.h"
#include "fovtrace/rng.h"

namespace fovtrace {

Renderer::Renderer(const Scene& scene) : scene_(scene), bvh_(Bvh::build(scene)) {}

RayTaskList Renderer::make_tasks(const FrameRequest& request) const {
  if (request.mode == RenderMode::Uniform) return RayTaskList::uniform(width(), height(), request.spp_uniform);
  DisplayGeometry display = request.display;
  display.resolution_px = width();
  return build_task_list(width(), height(), request.foveation, display);
}

SparseFrame Renderer::trace(RayTaskList tasks, const FrameRequest& request, PathStats* stats) const {
  if (tasks.width != width() || tasks.height != height())
    throw ValidationError("task list dimensions differ from the camera image");
  if (request.max_depth < 1) throw ValidationError("max_depth must be >= 1");
  SparseFrame sparse;
  sparse.values.assign(tasks.tasks.size(), Vec3{0.0f});
  const RenderContext ctx{scene_, bvh_};
  const Camera& camera = scene_.camera;

  parallel_for(tasks.tasks.size(), request.workers, 64, [&](size_t begin, size_t end) {
    for (size_t i = begin; i < end; ++i) {
      const RayTask& task = tasks.tasks[i];
      if (task.samples <= 0) continue;
      double sum[3] = {0, 0, 0};
      for (int s = 0; s < task.samples; ++s) {
        RngStream rng({request.seed, request.frame_index, uint32_t(task.x0), uint32_t(task.y0), uint32_t(s)});
        const float jx = rng.next_float();
        const float jy = rng.next_float();
        const Ray ray{camera.position,
                      camera.direction(float(task.x0) + float(task.width) * jx, float(task.y0) + float(task.height) * jy),
                      0.0f, INFINITY};
        const Vec3 l = estimate_radiance(ctx, ray, rng, request.max_depth, stats);
        sum[0] += l.x;
        sum[1] += l.y;
        sum[2] += l.z;
      }
      const double inv = 1.0 / task.samples;
      sparse.values[i] = {float(sum[0] * inv), float(sum[1] * inv), float(sum[2] * inv)};
    }
  });
  sparse.tasks = std::move(tasks);
  return sparse;
}

FrameResult Renderer::render(const FrameRequest& request) const {
  FrameResult result;
  DisplayGeometry display = request.display;
  display.resolution_px = width();
  result.radii = region_radii(request.foveation, display);
  PathStats stats;
  SparseFrame sparse = trace(make_tasks(request), request, &stats);
  result.hdr = reconstruct(sparse, request.workers);
  result.tasks = std::move(sparse.tasks);
  result.clamped = stats.clamped.load();
  return result;
}

}  // namespace fovtrace
