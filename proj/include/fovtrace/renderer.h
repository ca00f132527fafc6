// fovtrace is licensed under the Apache License, Version 2.0.
// SPDX: Apache-2.0

#pragma once

#include <cstdint>

#include "fovtrace/accel.h"
#include "fovtrace/foveation.h"
#include "fovtrace/pathtracer.h"
#include "fovtrace/reconstruction.h"
#include "fovtrace/scene.h"

namespace fovtrace {

struct FrameRequest {
  RenderMode mode = RenderMode::Foveated;
  FoveationConfig foveation;
  DisplayGeometry display;
  int spp_uniform = 32;
  int max_depth = 3;
  uint64_t seed = 0;
  uint32_t frame_index = 0;
  int workers = 0;  // 0 = hardware concurrency
};

struct FrameResult {
  HdrFrame hdr;
  RayTaskList tasks;
  RegionRadii radii;
  uint64_t clamped = 0;
};

// Owns the BVH for one immutable scene and renders frames from it.
class Renderer {
 public:
  explicit Renderer(const Scene& scene);

  const Scene& scene() const { return scene_; }
  const Bvh& bvh() const { return bvh_; }
  int width() const { return scene_.camera.width; }
  int height() const { return scene_.camera.height; }

  RayTaskList make_tasks(const FrameRequest& request) const;

  // Traces every task: `samples` paths jittered uniformly over the task's
  // footprint, averaged. Random streams are keyed by (seed, frame, task
  // origin, sample), so the result is independent of the worker count.
  SparseFrame trace(RayTaskList tasks, const FrameRequest& request, PathStats* stats = nullptr) const;

  // make_tasks -> trace -> reconstruct.
  FrameResult render(const FrameRequest& request) const;

 private:
  const Scene& scene_;
  Bvh bvh_;
};

}  // namespace fovtrace
