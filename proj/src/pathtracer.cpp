// fovtrace is licensed under the Apache License, Version 2.0.
// SPDX: Apache-2.0

#include "fovtrace/pathtracer.h"

#include <algorithm>
#include <cmath>

namespace fovtrace {

namespace {

constexpr float kMinAlpha = 1e-3f;

float ggx_alpha(const Material& m) { return std::max(m.roughness * m.roughness, kMinAlpha); }

float ggx_d(float cos_h, float alpha) {
  const float a2 = alpha * alpha;
  const float c2 = cos_h * cos_h;
  const float denom = c2 * (a2 - 1.0f) + 1.0f;
  return a2 / (kPi * denom * denom);
}

// Smith masking for GGX in terms of the local direction's cosine.
float smith_g1(float cos_w, float alpha) {
  const float c2 = cos_w * cos_w;
  const float tan2 = std::max(0.0f, 1.0f - c2) / std::max(c2, 1e-12f);
  return 2.0f / (1.0f + std::sqrt(1.0f + alpha * alpha * tan2));
}

Vec3 schlick(const Vec3& f0, float cos_d) {
  const float k = std::pow(std::clamp(1.0f - cos_d, 0.0f, 1.0f), 5.0f);
  return f0 + (Vec3{1.0f} - f0) * k;
}

// Local-frame evaluation; both directions have positive z.
BsdfEval eval_local(const Material& m, const Vec3& wo, const Vec3& wi) {
  BsdfEval out;
  if (wo.z <= 0 || wi.z <= 0) return out;
  const float ps = specular_probability(m);
  if (ps < 1.0f) {
    out.value += m.base_color * ((1.0f - m.metallic) * kInvPi);
    out.pdf += (1.0f - ps) * wi.z * kInvPi;
  }
  if (ps > 0.0f) {
    const Vec3 h = normalize(wo + wi);
    const float alpha = ggx_alpha(m);
    const float d = ggx_d(h.z, alpha);
    const float wo_h = dot(wo, h);
    if (wo_h > 0 && h.z > 0) {
      const float g = smith_g1(wo.z, alpha) * smith_g1(wi.z, alpha);
      const Vec3 f = schlick(m.base_color, dot(wi, h));
      out.value += f * (m.metallic * d * g / (4.0f * wo.z * wi.z));
      out.pdf += ps * d * h.z / (4.0f * wo_h);
    }
  }
  return out;
}

Vec3 reflect(const Vec3& w, const Vec3& h) { return h * (2.0f * dot(w, h)) - w; }

Vec3 face_forward(const Vec3& n, const Vec3& w) { return dot(n, w) < 0 ? -n : n; }

}  // namespace

float specular_probability(const Material& material) { return std::clamp(material.metallic, 0.0f, 1.0f); }

std::optional<BsdfSample> sample_bsdf(const Material& material, const Vec3& wo, const Vec3& normal,
                                      RngStream& rng) {
  const Frame frame = Frame::from_normal(normal);
  const Vec3 wo_l = frame.to_local(wo);
  const float u_lobe = rng.next_float();
  const float u1 = rng.next_float();
  const float u2 = rng.next_float();
  if (wo_l.z <= 0) return std::nullopt;

  const float ps = specular_probability(material);
  const Lobe lobe = u_lobe < ps ? Lobe::Specular : Lobe::Diffuse;
  Vec3 wi_l;
  if (lobe == Lobe::Diffuse) {
    const float r = std::sqrt(u1);
    const float phi = 2.0f * kPi * u2;
    wi_l = {r * std::cos(phi), r * std::sin(phi), std::sqrt(std::max(0.0f, 1.0f - u1))};
  } else {
    const float alpha = ggx_alpha(material);
    const float tan2 = alpha * alpha * u1 / std::max(1.0f - u1, 1e-12f);
    const float cos_h = 1.0f / std::sqrt(1.0f + tan2);
    const float sin_h = std::sqrt(std::max(0.0f, 1.0f - cos_h * cos_h));
    const float phi = 2.0f * kPi * u2;
    const Vec3 h{sin_h * std::cos(phi), sin_h * std::sin(phi), cos_h};
    // Back-facing microfacets reflect to a direction whose half vector is -h;
    // eval_local gives them no density, so they must not be produced.
    if (dot(wo_l, h) <= 0) return std::nullopt;
    wi_l = reflect(wo_l, h);
  }
  if (wi_l.z <= 0) return std::nullopt;
  const BsdfEval e = eval_local(material, wo_l, wi_l);
  if (!(e.pdf > 0) || !std::isfinite(e.pdf)) return std::nullopt;
  return BsdfSample{normalize(frame.to_world(wi_l)), e.pdf, e.value, lobe};
}

BsdfEval eval_bsdf(const Material& material, const Vec3& wo, const Vec3& wi, const Vec3& normal) {
  const Frame frame = Frame::from_normal(normal);
  return eval_local(material, frame.to_local(wo), frame.to_local(wi));
}

EnvSample sample_environment(const EnvironmentLight& env, RngStream& rng) {
  const double u_row = rng.next_double();
  const double u_col = rng.next_double();
  const float u_phi = rng.next_float();
  const float u_cos = rng.next_float();
  EnvSample s;
  if (env.total_weight <= 0) return s;

  const auto row_it = std::upper_bound(env.row_cdf.begin(), env.row_cdf.end(), u_row);
  const int y = std::clamp(int(row_it - env.row_cdf.begin()) - 1, 0, env.height - 1);
  const auto cdf_begin = env.column_cdf.begin() + std::ptrdiff_t(size_t(y) * size_t(env.width + 1));
  const auto col_it = std::upper_bound(cdf_begin, cdf_begin + env.width + 1, u_col);
  const int x = std::clamp(int(col_it - cdf_begin) - 1, 0, env.width - 1);

  const double cos0 = std::cos(kPiD * y / env.height);
  const double cos1 = std::cos(kPiD * (y + 1) / env.height);
  const double cos_theta = cos0 - double(u_cos) * (cos0 - cos1);
  const double sin_theta = std::sqrt(std::max(0.0, 1.0 - cos_theta * cos_theta));
  const double phi = 2.0 * kPiD * (x + double(u_phi)) / env.width;
  s.direction = normalize(Vec3{float(sin_theta * std::cos(phi)), float(cos_theta), float(sin_theta * std::sin(phi))});
  s.pdf = float(env.texel_probability(x, y) / env.texel_solid_angle(y));
  s.radiance = env.texel(x, y);
  return s;
}

Vec3 estimate_radiance(const RenderContext& ctx, const Ray& camera_ray, RngStream& rng, int max_depth,
                       PathStats* stats) {
  const Scene& scene = ctx.scene;
  const EnvironmentLight* env = scene.environment ? &*scene.environment : nullptr;
  const bool env_sampling = env && env->total_weight > 0;
  const float eps = ctx.bvh.ray_epsilon();

  Vec3 radiance{0.0f};
  auto add = [&](const Vec3& contribution) {
    if (is_finite(contribution)) {
      radiance += max(contribution, Vec3{0.0f});
    } else if (stats) {
      stats->clamped.fetch_add(1, std::memory_order_relaxed);
    }
  };
  auto background = [&](const Vec3& d) { return env ? env->lookup(d) : scene.background; };

  Ray ray = camera_ray;
  std::optional<Hit> hit = ctx.bvh.intersect(ray);
  if (!hit) {
    add(background(ray.direction));
    return radiance;
  }
  Vec3 throughput{1.0f};
  add(scene.materials[hit->material_id].emission);

  for (int depth = 1; depth <= max_depth; ++depth) {
    const Material& mat = scene.materials[hit->material_id];
    const Vec3 wo = -ray.direction;
    const Vec3 ng = face_forward(hit->geometric_normal, wo);
    Vec3 ns = face_forward(hit->shading_normal, ng);
    if (dot(ns, wo) <= 0) ns = ng;
    const Vec3 origin = hit->position + ng * eps;

    if (env_sampling) {
      const EnvSample ls = sample_environment(*env, rng);
      if (ls.pdf > 0 && dot(ls.direction, ng) > 0) {
        const BsdfEval f = eval_bsdf(mat, wo, ls.direction, ns);
        if (max_component(f.value) > 0 &&
            !ctx.bvh.occluded(Ray{origin, ls.direction, 0.0f, INFINITY}, INFINITY)) {
          const float cos_i = std::abs(dot(ls.direction, ns));
          add(throughput * f.value * ls.radiance * (cos_i / ls.pdf * mis_weight(ls.pdf, f.pdf)));
        }
      }
    }

    const std::optional<BsdfSample> bs = sample_bsdf(mat, wo, ns, rng);
    if (!bs || dot(bs->wi, ng) <= 0) break;
    throughput *= bs->value * (std::abs(dot(bs->wi, ns)) / bs->pdf);
    if (!is_finite(throughput)) {
      if (stats) stats->clamped.fetch_add(1, std::memory_order_relaxed);
      break;
    }
    if (max_component(throughput) <= 0) break;

    ray = Ray{origin, bs->wi, 0.0f, INFINITY};
    hit = ctx.bvh.intersect(ray);
    if (!hit) {
      const float w = env_sampling ? mis_weight(bs->pdf, float(env->pdf(bs->wi))) : 1.0f;
      add(throughput * background(bs->wi) * w);
      break;
    }
    add(throughput * scene.materials[hit->material_id].emission);
  }
  return radiance;
}

}  // namespace fovtrace
