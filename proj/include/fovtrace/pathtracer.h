// fovtrace is licensed under the Apache License, Version 2.0.
// SPDX: Apache-2.0

#pragma once

#include <atomic>
#include <cstdint>
#include <optional>

#include "fovtrace/accel.h"
#include "fovtrace/math.h"
#include "fovtrace/rng.h"
#include "fovtrace/scene.h"

namespace fovtrace {

enum class Lobe : uint8_t { Diffuse, Specular };

struct BsdfSample {
  Vec3 wi;     // world space, unit
  float pdf;   // mixture pdf over both lobes, 1/sr
  Vec3 value;  // raw BRDF value (no cosine, no pdf division)
  Lobe lobe;
};

struct BsdfEval {
  Vec3 value;
  float pdf = 0;
};

// Mixture of a Lambert lobe weighted by (1 - metallic) and a GGX lobe
// (alpha = roughness^2, Schlick Fresnel with F0 = base_color) weighted by
// metallic. The specular lobe is chosen with probability `metallic`.
float specular_probability(const Material& material);

std::optional<BsdfSample> sample_bsdf(const Material& material, const Vec3& wo, const Vec3& normal,
                                      RngStream& rng);
BsdfEval eval_bsdf(const Material& material, const Vec3& wo, const Vec3& wi, const Vec3& normal);

struct EnvSample {
  Vec3 direction;
  float pdf = 0;  // 1/sr
  Vec3 radiance;
};

// Draws a direction with density proportional to luminance times solid angle.
// Returns pdf == 0 when the map carries no energy.
EnvSample sample_environment(const EnvironmentLight& env, RngStream& rng);

// Balance heuristic. The larger weight is formed as 1 - smaller, which makes
// mis_weight(a, b) + mis_weight(b, a) == 1 exactly in float.
inline float mis_weight(float pdf_this, float pdf_other) {
  if (!(pdf_this > 0)) return 0.0f;
  if (!(pdf_other > 0)) return 1.0f;
  const float sum = pdf_this + pdf_other;
  return pdf_this <= pdf_other ? pdf_this / sum : 1.0f - pdf_other / sum;
}

// Counts non-finite contributions that were clamped to zero.
struct PathStats {
  std::atomic<uint64_t> clamped{0};
};

struct RenderContext {
  const Scene& scene;
  const Bvh& bvh;
};

// Radiance along `ray`: emission, environment next-event estimation and
// BSDF continuation at every vertex, balance-heuristic MIS between the two
// environment strategies, no Russian roulette. `max_depth` counts surface
// interactions.
Vec3 estimate_radiance(const RenderContext& ctx, const Ray& ray, RngStream& rng, int max_depth,
                       PathStats* stats = nullptr);

}  // namespace fovtrace
