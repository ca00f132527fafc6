// fovtrace is licensed under the Apache License, Version 2.0.
// SPDX: Apache-2.0

#include <doctest.h>

#include <cstring>
#include <random>

#include "fovtrace/accel.h"
#include "fovtrace/pathtracer.h"
#include "fovtrace/rng.h"
#include "support.h"

using namespace fovtrace;
using namespace fovtrace::test;

namespace {

RngStream stream(uint32_t sample, uint32_t px = 0, uint64_t seed = 11) {
  return RngStream({seed, 0, px, 0, sample});
}

Vec3 direction_from_angles(double theta, double phi) {
  return Vec3(float(std::sin(theta) * std::cos(phi)), float(std::cos(theta)), float(std::sin(theta) * std::sin(phi)));
}

// Interreflecting floor and box under a uniform sky; no emitters.
Scene sky_scene(float albedo) {
  Scene s;
  s.materials = {Material{"grey", Vec3{albedo}, 1.0f, 0.0f, Vec3{0.0f}},
                 Material{"metal", Vec3{0.9f}, 0.4f, 1.0f, Vec3{0.0f}}};
  s.meshes = {plane_mesh(0.0f, 20.0f, 0), box_mesh({-0.5f, 0.0f, -0.5f}, {0.5f, 1.0f, 0.5f}, 1)};
  s.environment = EnvironmentLight::constant(Vec3{1.0f});
  return s;
}

}  // namespace

TEST_CASE("mis_weight values and exact complementarity") {
  CHECK(mis_weight(0.7f, 0.7f) == 0.5f);
  CHECK(mis_weight(0.3f, 0.0f) == 1.0f);
  CHECK(mis_weight(1.0f, 3.0f) == 0.25f);
  CHECK(mis_weight(0.0f, 2.0f) == 0.0f);
  std::mt19937 rng(3);
  std::uniform_real_distribution<float> expo(-20.0f, 20.0f), mant(1.0f, 2.0f);
  for (int i = 0; i < 1000000; ++i) {
    const float a = mant(rng) * std::exp2(expo(rng));
    const float b = mant(rng) * std::exp2(expo(rng));
    const float wa = mis_weight(a, b), wb = mis_weight(b, a);
    REQUIRE(wa + wb == 1.0f);
    REQUIRE(wa >= 0.0f);
    REQUIRE(wa <= 1.0f);
  }
}

TEST_CASE("Lambert sampling and evaluation") {
  const Material m{"lambert", Vec3{0.6f, 0.5f, 0.4f}, 1.0f, 0.0f, Vec3{0.0f}};
  const Vec3 n{0, 0, 1};
  const Vec3 wo = normalize(Vec3{0.3f, -0.2f, 0.9f});
  for (uint32_t i = 0; i < 10000; ++i) {
    RngStream rng = stream(i);
    const auto s = sample_bsdf(m, wo, n, rng);
    REQUIRE(s);
    CHECK(s->lobe == Lobe::Diffuse);
    CHECK(s->pdf == doctest::Approx(dot(s->wi, n) * kInvPi).epsilon(1e-5));
    CHECK(s->value.x == doctest::Approx(0.6f * kInvPi));
  }
  const BsdfEval e = eval_bsdf(m, wo, normalize(Vec3{-0.5f, 0.1f, 0.4f}), n);
  CHECK(e.value.y == doctest::Approx(0.5f * kInvPi));
  const BsdfEval below = eval_bsdf(m, wo, normalize(Vec3{0.2f, 0.1f, -0.4f}), n);
  CHECK(below.value.x == 0.0f);
  CHECK(below.value.y == 0.0f);
  CHECK(below.value.z == 0.0f);
  CHECK(below.pdf == 0.0f);
}

TEST_CASE("metallic one always picks the specular lobe") {
  const Material m{"metal", Vec3{0.9f}, 0.3f, 1.0f, Vec3{0.0f}};
  const Vec3 n{0, 1, 0};
  const Vec3 wo = normalize(Vec3{0.4f, 0.8f, 0.1f});
  for (uint32_t i = 0; i < 10000; ++i) {
    RngStream rng = stream(i);
    const auto s = sample_bsdf(m, wo, n, rng);
    if (s) CHECK(s->lobe == Lobe::Specular);
  }
}

TEST_CASE("white furnace: Lambert reflectance integrates to one") {
  const Material m{"white", Vec3{1.0f}, 1.0f, 0.0f, Vec3{0.0f}};
  const Vec3 n{0, 0, 1};
  const Vec3 wo = normalize(Vec3{0.2f, 0.5f, 0.8f});
  double sum = 0;
  const int count = 1000000;
  for (int i = 0; i < count; ++i) {
    RngStream rng = stream(uint32_t(i), 1);
    const auto s = sample_bsdf(m, wo, n, rng);
    if (s) sum += double(s->value.x) * dot(s->wi, n) / s->pdf;
  }
  const double integral = sum / count;
  CHECK(integral >= 0.99);
  CHECK(integral <= 1.01);
}

TEST_CASE("sampled density matches eval_bsdf pdf in dense regions") {
  const Material m{"mixed", Vec3{0.8f, 0.7f, 0.6f}, 0.5f, 0.5f, Vec3{0.0f}};
  const Vec3 n{0, 0, 1};
  constexpr int kTheta = 16, kPhi = 32;
  int checked = 0;
  for (int w = 0; w < 4; ++w) {
    const double wo_theta = 0.15 + 0.3 * w;
    const Vec3 wo(float(std::sin(wo_theta)), 0.0f, float(std::cos(wo_theta)));
    std::vector<int> hist(kTheta * kPhi, 0);
    const int count = 1000000;
    for (int i = 0; i < count; ++i) {
      RngStream rng({5, uint32_t(w), 0, 0, uint32_t(i)});
      const auto s = sample_bsdf(m, wo, n, rng);
      if (!s || !(s->wi.z > 0)) continue;
      const double cos_t = std::min(double(s->wi.z), 1.0);
      double phi = std::atan2(double(s->wi.y), double(s->wi.x));
      if (phi < 0) phi += 2 * kPiD;
      const int ti = std::min(kTheta - 1, int(cos_t * kTheta));
      const int pi = std::min(kPhi - 1, int(phi / (2 * kPiD) * kPhi));
      ++hist[size_t(ti) * kPhi + pi];
    }
    const double bin_solid_angle = (1.0 / kTheta) * (2 * kPiD / kPhi);
    for (int ti = 0; ti < kTheta; ++ti)
      for (int pi = 0; pi < kPhi; ++pi) {
        const int c = hist[size_t(ti) * kPhi + pi];
        if (c < 5000) continue;
        // Bin-averaged analytic pdf over an 8x8 grid of interior points.
        double avg = 0;
        for (int a = 0; a < 8; ++a)
          for (int b = 0; b < 8; ++b) {
            const double cos_t = (ti + (a + 0.5) / 8) / kTheta;
            const double phi = 2 * kPiD * (pi + (b + 0.5) / 8) / kPhi;
            const double sin_t = std::sqrt(std::max(0.0, 1 - cos_t * cos_t));
            const Vec3 wi(float(sin_t * std::cos(phi)), float(sin_t * std::sin(phi)), float(cos_t));
            avg += eval_bsdf(m, wo, wi, n).pdf / 64.0;
          }
        const double estimated = c / (double(count) * bin_solid_angle);
        CHECK(std::abs(estimated - avg) <= 0.05 * avg);
        ++checked;
      }
  }
  CHECK(checked > 100);
}

TEST_CASE("uniform environment sampling has pdf 1/(4 pi)") {
  RgbImage img{16, 8, std::vector<Vec3>(128, Vec3{1.0f})};
  const EnvironmentLight env = EnvironmentLight::from_image(img);
  const double expected = 1.0 / (4.0 * kPiD);
  for (uint32_t i = 0; i < 100000; ++i) {
    RngStream rng = stream(i, 2);
    const EnvSample s = sample_environment(env, rng);
    REQUIRE(std::abs(s.pdf - expected) <= 0.02 * expected);
    REQUIRE(std::abs(env.pdf(s.direction) - expected) <= 0.02 * expected);
    REQUIRE(std::abs(length(s.direction) - 1.0f) < 1e-5f);
  }
  const EnvironmentLight c = EnvironmentLight::constant(Vec3{2.0f});
  RngStream rng = stream(0, 3);
  CHECK(sample_environment(c, rng).pdf == doctest::Approx(expected).epsilon(1e-5));
}

TEST_CASE("single bright texel: every draw lands inside it") {
  RgbImage img{32, 16, std::vector<Vec3>(512, Vec3{0.0f})};
  img.at(9, 5) = Vec3{10.0f};
  const EnvironmentLight env = EnvironmentLight::from_image(img);
  const double theta0 = kPiD * 5 / 16, theta1 = kPiD * 6 / 16;
  const double phi0 = 2 * kPiD * 9 / 32, phi1 = 2 * kPiD * 10 / 32;
  for (uint32_t i = 0; i < 100000; ++i) {
    RngStream rng = stream(i, 4);
    const EnvSample s = sample_environment(env, rng);
    const double theta = std::acos(std::clamp(double(s.direction.y), -1.0, 1.0));
    double phi = std::atan2(double(s.direction.z), double(s.direction.x));
    if (phi < 0) phi += 2 * kPiD;
    REQUIRE(theta >= theta0 - 1e-5);
    REQUIRE(theta <= theta1 + 1e-5);
    REQUIRE(phi >= phi0 - 1e-5);
    REQUIRE(phi <= phi1 + 1e-5);
  }
}

TEST_CASE("environment estimator matches texel quadrature") {
  std::mt19937 gen(17);
  std::uniform_real_distribution<float> u(0.0f, 1.0f);
  RgbImage img{24, 12, {}};
  for (int y = 0; y < 12; ++y)
    for (int x = 0; x < 24; ++x) {
      const float base = u(gen);
      img.pixels.push_back(Vec3{base * base * 4.0f, base, 0.5f * u(gen)});
    }
  const EnvironmentLight env = EnvironmentLight::from_image(img);
  // Direct quadrature: sum of radiance times exact texel solid angle.
  double quad[3] = {0, 0, 0};
  for (int y = 0; y < 12; ++y) {
    const double omega = 2 * kPiD / 24 * (std::cos(kPiD * y / 12) - std::cos(kPiD * (y + 1) / 12));
    for (int x = 0; x < 24; ++x)
      for (int c = 0; c < 3; ++c) quad[c] += img.at(x, y)[c] * omega;
  }
  double est[3] = {0, 0, 0};
  const int count = 1000000;
  for (int i = 0; i < count; ++i) {
    RngStream rng = stream(uint32_t(i), 5);
    const EnvSample s = sample_environment(env, rng);
    for (int c = 0; c < 3; ++c) est[c] += s.radiance[c] / s.pdf;
  }
  for (int c = 0; c < 3; ++c) CHECK(std::abs(est[c] / count - quad[c]) <= 0.01 * quad[c]);
}

TEST_CASE("escaping ray returns the environment exactly") {
  Scene s;
  s.materials = {Material{}};
  s.meshes = {plane_mesh(-5.0f, 1.0f)};
  s.environment = EnvironmentLight::constant(Vec3{1.0f});
  const Bvh bvh = Bvh::build(s);
  RngStream rng = stream(0);
  const Vec3 L = estimate_radiance({s, bvh}, Ray{Vec3{0, 0, 0}, Vec3{0, 1, 0}}, rng, 3);
  CHECK(L.x == 1.0f);
  CHECK(L.y == 1.0f);
  CHECK(L.z == 1.0f);
}

TEST_CASE("emissive enclosure with a black BRDF returns the emission") {
  Scene s;
  const Vec3 E{2.5f, 1.5f, 0.5f};
  s.materials = {Material{"glow", Vec3{0.0f}, 1.0f, 0.0f, E}};
  s.meshes = {box_mesh({-1, -1, -1}, {1, 1, 1})};
  const Bvh bvh = Bvh::build(s);
  for (uint32_t i = 0; i < 64; ++i) {
    RngStream rng = stream(i);
    const Vec3 d = direction_from_angles(0.1 + 0.04 * i, 0.3 * i);
    const Vec3 L = estimate_radiance({s, bvh}, Ray{Vec3{0.1f, 0.2f, -0.1f}, normalize(d)}, rng, 3);
    CHECK(L.x == E.x);
    CHECK(L.y == E.y);
    CHECK(L.z == E.z);
  }
}

TEST_CASE("Lambertian plane under a uniform sky reflects rho times L") {
  Scene s;
  const float rho = 0.5f;
  s.materials = {Material{"lambert", Vec3{rho}, 1.0f, 0.0f, Vec3{0.0f}}};
  s.meshes = {plane_mesh(0.0f, 50.0f)};
  s.environment = EnvironmentLight::constant(Vec3{1.0f});
  const Bvh bvh = Bvh::build(s);
  const int n = 4096;
  double sum = 0, sum2 = 0;
  for (int i = 0; i < n; ++i) {
    RngStream rng = stream(uint32_t(i), 6);
    const float v = estimate_radiance({s, bvh}, Ray{Vec3{0.0f, 1.0f, 0.0f}, normalize(Vec3{0.1f, -1.0f, 0.05f})}, rng, 1).y;
    sum += v;
    sum2 += double(v) * v;
  }
  const double mean = sum / n;
  const double sigma = std::sqrt(std::max(0.0, sum2 / n - mean * mean) / n);
  CHECK(std::abs(mean - rho) <= 3.0 * std::max(sigma, 1e-6));
}

TEST_CASE("estimate_radiance is deterministic, finite and non-negative") {
  const Scene s = sky_scene(0.7f);
  const Bvh bvh = Bvh::build(s);
  std::mt19937 gen(8);
  std::uniform_real_distribution<float> u(-1.0f, 1.0f);
  for (uint32_t i = 0; i < 2000; ++i) {
    const Ray r{Vec3{u(gen) * 2.0f, 1.5f + u(gen), 3.0f}, normalize(Vec3{u(gen) * 0.5f, -0.4f + 0.3f * u(gen), -1.0f})};
    RngStream a = stream(i, 7), b = stream(i, 7);
    PathStats stats;
    const Vec3 la = estimate_radiance({s, bvh}, r, a, 3, &stats);
    const Vec3 lb = estimate_radiance({s, bvh}, r, b, 3);
    CHECK(std::memcmp(&la, &lb, sizeof(Vec3)) == 0);
    CHECK(is_finite(la));
    CHECK(la.x >= 0.0f);
    CHECK(la.y >= 0.0f);
    CHECK(la.z >= 0.0f);
    CHECK(stats.clamped.load() == 0);
  }
}

TEST_CASE("deeper paths gather at least as much energy") {
  const Scene s = sky_scene(0.8f);
  const Bvh bvh = Bvh::build(s);
  Camera cam;
  cam.position = {1.5f, 1.2f, 2.5f};
  cam.look_at = {0.0f, 0.3f, 0.0f};
  cam.width = 16;
  cam.height = 16;
  double lum[2] = {0, 0};
  const int depths[2] = {1, 3};
  for (int k = 0; k < 2; ++k)
    for (int y = 0; y < 16; ++y)
      for (int x = 0; x < 16; ++x)
        for (uint32_t i = 0; i < 1024; ++i) {
          RngStream rng({21, 0, uint32_t(x), uint32_t(y), i});
          const Ray r{cam.position, cam.direction(x + rng.next_float(), y + rng.next_float())};
          lum[k] += luminance(estimate_radiance({s, bvh}, r, rng, depths[k]));
        }
  CHECK(lum[1] >= lum[0]);
}
