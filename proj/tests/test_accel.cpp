// fovtrace is licensed under the Apache License, Version 2.0.
// SPDX: Apache-2.0

#include <doctest.h>

#include <random>

#include "fovtrace/accel.h"
#include "support.h"

using namespace fovtrace;

namespace {

Mesh triangles(const std::vector<std::array<Vec3, 3>>& tris) {
  Mesh m;
  m.name = "tris";
  for (const auto& t : tris) {
    const uint32_t base = uint32_t(m.positions.size());
    m.positions.insert(m.positions.end(), t.begin(), t.end());
    m.triangles.push_back({base, base + 1, base + 2});
    m.material_ids.push_back(0);
  }
  return m;
}

Mesh random_soup(int count, uint32_t seed) {
  std::mt19937 rng(seed);
  std::uniform_real_distribution<float> center(-10.0f, 10.0f), offset(-0.6f, 0.6f);
  std::vector<std::array<Vec3, 3>> tris;
  for (int i = 0; i < count; ++i) {
    const Vec3 c{center(rng), center(rng), center(rng)};
    tris.push_back({c + Vec3{offset(rng), offset(rng), offset(rng)}, c + Vec3{offset(rng), offset(rng), offset(rng)},
                    c + Vec3{offset(rng), offset(rng), offset(rng)}});
  }
  return triangles(tris);
}

// Independent Moller-Trumbore in double precision over every triangle.
std::optional<std::pair<double, uint32_t>> oracle_hit(const Mesh& m, const Ray& r) {
  std::optional<std::pair<double, uint32_t>> best;
  for (uint32_t i = 0; i < m.triangles.size(); ++i) {
    const auto& t = m.triangles[i];
    const double p0[3] = {m.positions[t[0]].x, m.positions[t[0]].y, m.positions[t[0]].z};
    const double p1[3] = {m.positions[t[1]].x, m.positions[t[1]].y, m.positions[t[1]].z};
    const double p2[3] = {m.positions[t[2]].x, m.positions[t[2]].y, m.positions[t[2]].z};
    const double o[3] = {r.origin.x, r.origin.y, r.origin.z};
    const double d[3] = {r.direction.x, r.direction.y, r.direction.z};
    double e1[3], e2[3], s[3], p[3], q[3];
    for (int k = 0; k < 3; ++k) {
      e1[k] = p1[k] - p0[k];
      e2[k] = p2[k] - p0[k];
      s[k] = o[k] - p0[k];
    }
    p[0] = d[1] * e2[2] - d[2] * e2[1];
    p[1] = d[2] * e2[0] - d[0] * e2[2];
    p[2] = d[0] * e2[1] - d[1] * e2[0];
    const double det = e1[0] * p[0] + e1[1] * p[1] + e1[2] * p[2];
    if (std::abs(det) < 1e-14) continue;
    const double inv = 1.0 / det;
    const double u = (s[0] * p[0] + s[1] * p[1] + s[2] * p[2]) * inv;
    if (u < 0 || u > 1) continue;
    q[0] = s[1] * e1[2] - s[2] * e1[1];
    q[1] = s[2] * e1[0] - s[0] * e1[2];
    q[2] = s[0] * e1[1] - s[1] * e1[0];
    const double v = (d[0] * q[0] + d[1] * q[1] + d[2] * q[2]) * inv;
    if (v < 0 || u + v > 1) continue;
    const double tt = (e2[0] * q[0] + e2[1] * q[1] + e2[2] * q[2]) * inv;
    if (tt <= r.t_min || tt >= r.t_max) continue;
    if (!best || tt < best->first) best = std::make_pair(tt, i);
  }
  return best;
}

void check_containment(const Bvh& bvh, uint32_t index, const Aabb& parent) {
  const Bvh::Node& n = bvh.nodes()[index];
  CHECK(parent.contains(n.bounds));
  if (n.is_leaf()) {
    for (uint32_t k = 0; k < n.count; ++k) CHECK(n.bounds.contains(bvh.triangle_bounds(bvh.triangle_order()[n.offset + k])));
    return;
  }
  check_containment(bvh, index + 1, n.bounds);
  check_containment(bvh, n.offset, n.bounds);
}

}  // namespace

TEST_CASE("one triangle builds a single leaf") {
  const Bvh bvh = Bvh::build({triangles({{Vec3{0, 0, 0}, Vec3{1, 0, 0}, Vec3{0, 1, 0}}})});
  REQUIRE(bvh.nodes().size() == 1);
  CHECK(bvh.nodes()[0].is_leaf());
  CHECK(bvh.nodes()[0].count == 1);
}

TEST_CASE("two disjoint triangles build a root with two leaves") {
  const Bvh bvh = Bvh::build({triangles({{Vec3{0, 0, 0}, Vec3{1, 0, 0}, Vec3{0, 1, 0}},
                                         {Vec3{10, 0, 0}, Vec3{11, 0, 0}, Vec3{10, 1, 0}}})});
  REQUIRE(bvh.nodes().size() == 3);
  const auto& root = bvh.nodes()[0];
  CHECK_FALSE(root.is_leaf());
  const auto& left = bvh.nodes()[1];
  const auto& right = bvh.nodes()[root.offset];
  CHECK(left.is_leaf());
  CHECK(right.is_leaf());
  CHECK(root.bounds.contains(left.bounds));
  CHECK(root.bounds.contains(right.bounds));
  const bool disjoint = left.bounds.hi.x < right.bounds.lo.x || right.bounds.hi.x < left.bounds.lo.x;
  CHECK(disjoint);
}

TEST_CASE("intersect and occluded on a unit triangle") {
  const Bvh bvh = Bvh::build({triangles({{Vec3{-1, -1, 0}, Vec3{1, -1, 0}, Vec3{0, 1, 0}}})});
  const Ray toward{Vec3{0, 0, -1}, Vec3{0, 0, 1}};
  const auto hit = bvh.intersect(toward);
  REQUIRE(hit);
  CHECK(hit->t == doctest::Approx(1.0f));
  CHECK(hit->triangle_id == 0);
  CHECK(std::abs(dot(hit->geometric_normal, Vec3{0, 0, 1})) == doctest::Approx(1.0f));

  const Ray away{Vec3{0, 0, -1}, Vec3{0, 0, -1}};
  CHECK_FALSE(bvh.intersect(away));

  CHECK(bvh.occluded(toward, 2.0f));
  CHECK_FALSE(bvh.occluded(toward, 0.5f));
  CHECK_FALSE(bvh.occluded(away, 100.0f));
  CHECK_FALSE(bvh.occluded(Ray{Vec3{5, 5, -1}, Vec3{0, 0, 1}}, 100.0f));
}

TEST_CASE("a ray through a shared edge reports exactly one hit") {
  // Two triangles sharing the edge x = 0 in the plane z = 0.
  const Mesh m = triangles({{Vec3{0, -1, 0}, Vec3{0, 1, 0}, Vec3{-1, 0, 0}}, {Vec3{0, -1, 0}, Vec3{1, 0, 0}, Vec3{0, 1, 0}}});
  const Bvh bvh = Bvh::build({m});
  const Ray r{Vec3{0, 0.25f, -1}, Vec3{0, 0, 1}};
  const auto hit = bvh.intersect(r);
  REQUIRE(hit);
  CHECK(hit->t == doctest::Approx(1.0f));
  // Equal distances resolve to the lower triangle id.
  CHECK(hit->triangle_id == 0);
  // The ray continues past the surface without a second hit.
  Ray beyond = r;
  beyond.t_min = hit->t + 1e-4f;
  CHECK_FALSE(bvh.intersect(beyond));
}

TEST_CASE("BVH traversal equals brute force on random rays") {
  const Mesh soup = random_soup(10000, 99);
  const Bvh bvh = Bvh::build({soup});
  check_containment(bvh, 0, bvh.bounds());

  std::mt19937 rng(5);
  std::uniform_real_distribution<float> pos(-12.0f, 12.0f), dir(-1.0f, 1.0f);
  int hits = 0;
  for (int i = 0; i < 10000; ++i) {
    Ray r{Vec3{pos(rng), pos(rng), pos(rng)}, normalize(Vec3{dir(rng), dir(rng), dir(rng)})};
    const auto a = bvh.intersect(r);
    const auto b = bvh.intersect_brute_force(r);
    REQUIRE(a.has_value() == b.has_value());
    if (a) {
      ++hits;
      CHECK(a->triangle_id == b->triangle_id);
      CHECK(std::abs(a->t - b->t) <= 1e-6f);
      const auto o = oracle_hit(soup, r);
      REQUIRE(o);
      CHECK(std::abs(double(a->t) - o->first) <= 1e-4 * std::max(1.0, o->first));
      CHECK(bvh.occluded(r, a->t + 1e-3f));
    } else {
      CHECK_FALSE(bvh.occluded(r, INFINITY));
    }
  }
  CHECK(hits > 1000);
}

TEST_CASE("ray epsilon scales with the scene diagonal") {
  const Bvh small = Bvh::build({triangles({{Vec3{0, 0, 0}, Vec3{1, 0, 0}, Vec3{0, 1, 0}}})});
  const Bvh big = Bvh::build({triangles({{Vec3{0, 0, 0}, Vec3{100, 0, 0}, Vec3{0, 100, 0}}})});
  CHECK(small.ray_epsilon() == doctest::Approx(1e-4f * std::sqrt(2.0f)));
  CHECK(big.ray_epsilon() == doctest::Approx(100.0f * small.ray_epsilon()));
}
