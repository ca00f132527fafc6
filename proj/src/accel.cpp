// fovtrace is licensed under the Apache License, Version 2.0.
// SPDX: Apache-2.0

#include "fovtrace/accel.h"

#include <algorithm>
#include <array>
#include <limits>
#include <numeric>

#include "fovtrace/error.h"

namespace fovtrace {

namespace {

constexpr int kBins = 16;
constexpr uint32_t kLocalStack = 128;
constexpr float kTraversalCost = 1.0f;

// Conservative growth for the slab test: 1 + 2 * gamma(3).
constexpr float kSlabScale = 1.0f + 2.0f * (3.0f * std::numeric_limits<float>::epsilon() * 0.5f) /
                                        (1.0f - 3.0f * std::numeric_limits<float>::epsilon() * 0.5f);

struct RayPrecomp {
  Vec3 origin;
  Vec3 inv_dir;
  std::array<int, 3> dir_negative;
};

RayPrecomp precompute(const Ray& ray) {
  RayPrecomp p;
  p.origin = ray.origin;
  p.inv_dir = {1.0f / ray.direction.x, 1.0f / ray.direction.y, 1.0f / ray.direction.z};
  p.dir_negative = {p.inv_dir.x < 0, p.inv_dir.y < 0, p.inv_dir.z < 0};
  return p;
}

inline bool slab_test(const Aabb& box, const RayPrecomp& r, float t_min, float t_max) {
  float t0 = t_min, t1 = t_max;
  for (int a = 0; a < 3; ++a) {
    const float lo = r.dir_negative[a] ? box.hi[a] : box.lo[a];
    const float hi = r.dir_negative[a] ? box.lo[a] : box.hi[a];
    float tnear = (lo - r.origin[a]) * r.inv_dir[a];
    float tfar = (hi - r.origin[a]) * r.inv_dir[a] * kSlabScale;
    // 0 * inf produces NaN for rays on a slab plane; treat as unbounded.
    if (tnear != tnear) tnear = -INFINITY;
    if (tfar != tfar) tfar = INFINITY;
    t0 = tnear > t0 ? tnear : t0;
    t1 = tfar < t1 ? tfar : t1;
    if (t0 > t1) return false;
  }
  return true;
}

// Möller-Trumbore; edges inclusive so shared edges never leak.
inline bool intersect_triangle(const Bvh::Triangle& tri, const Ray& ray, float& t, float& u, float& v) {
  const Vec3 p = cross(ray.direction, tri.e2);
  const float det = dot(tri.e1, p);
  if (det == 0.0f || det != det) return false;
  const float inv = 1.0f / det;
  const Vec3 s = ray.origin - tri.v0;
  u = dot(s, p) * inv;
  if (u < 0.0f || u > 1.0f) return false;
  const Vec3 q = cross(s, tri.e1);
  v = dot(ray.direction, q) * inv;
  if (v < 0.0f || u + v > 1.0f) return false;
  t = dot(tri.e2, q) * inv;
  return true;
}

// Nearest-hit candidate bookkeeping with the lower-id tie break.
struct Closest {
  float t;
  uint32_t id = std::numeric_limits<uint32_t>::max();
  const Bvh::Triangle* tri = nullptr;
  float u = 0, v = 0;

  void consider(const Bvh::Triangle& candidate, const Ray& ray) {
    float tc, uc, vc;
    if (!intersect_triangle(candidate, ray, tc, uc, vc)) return;
    if (!(tc > ray.t_min)) return;
    if (tc < t || (tc == t && candidate.id < id)) {
      t = tc;
      id = candidate.id;
      tri = &candidate;
      u = uc;
      v = vc;
    }
  }
};

}  // namespace

Bvh Bvh::build(const std::vector<Mesh>& meshes) {
  Bvh bvh;
  std::vector<Triangle> by_id;
  for (const Mesh& mesh : meshes) {
    for (size_t i = 0; i < mesh.triangles.size(); ++i) {
      const auto& tri = mesh.triangles[i];
      const Vec3 p0 = mesh.positions[tri[0]];
      const Vec3 p1 = mesh.positions[tri[1]];
      const Vec3 p2 = mesh.positions[tri[2]];
      const auto id = uint32_t(by_id.size());
      by_id.push_back({p0, p1 - p0, p2 - p0, id});
      Shading s;
      s.material_id = mesh.material_ids[i];
      if (!mesh.normals.empty()) {
        s.n0 = mesh.normals[tri[0]];
        s.n1 = mesh.normals[tri[1]];
        s.n2 = mesh.normals[tri[2]];
        s.has_normals = true;
      }
      bvh.shading_.push_back(s);
      Aabb box;
      box.expand(p0);
      box.expand(p1);
      box.expand(p2);
      bvh.boxes_.push_back(box);
    }
  }
  if (by_id.empty()) throw ValidationError("cannot build a BVH over empty geometry");

  std::vector<Vec3> centroids(by_id.size());
  for (size_t i = 0; i < by_id.size(); ++i) centroids[i] = bvh.boxes_[i].center();
  std::vector<uint32_t> ids(by_id.size());
  std::iota(ids.begin(), ids.end(), 0u);
  bvh.nodes_.reserve(2 * by_id.size());
  bvh.build_recursive(ids, centroids, bvh.boxes_, 0, ids.size(), 0);

  bvh.order_ = std::move(ids);
  bvh.ordered_.reserve(by_id.size());
  for (uint32_t id : bvh.order_) bvh.ordered_.push_back(by_id[id]);
  bvh.epsilon_ = 1e-4f * length(bvh.bounds().extent());
  if (!(bvh.epsilon_ > 0)) bvh.epsilon_ = 1e-6f;
  return bvh;
}

uint32_t Bvh::build_recursive(std::vector<uint32_t>& ids, const std::vector<Vec3>& centroids,
                              const std::vector<Aabb>& boxes, size_t begin, size_t end, uint32_t depth) {
  depth_ = std::max(depth_, depth + 1);
  const auto node_index = uint32_t(nodes_.size());
  nodes_.emplace_back();
  Aabb bounds, centroid_bounds;
  for (size_t i = begin; i < end; ++i) {
    bounds.expand(boxes[ids[i]]);
    centroid_bounds.expand(centroids[ids[i]]);
  }
  nodes_[node_index].bounds = bounds;
  const size_t count = end - begin;

  auto make_leaf = [&]() {
    nodes_[node_index].offset = uint32_t(begin);
    nodes_[node_index].count = uint16_t(count);
    return node_index;
  };
  if (count == 1) return make_leaf();

  // Binned SAH over all three axes.
  float best_cost = INFINITY;
  int best_axis = -1, best_split = -1;
  const Vec3 cext = centroid_bounds.extent();
  for (int axis = 0; axis < 3; ++axis) {
    if (!(cext[axis] > 0)) continue;
    std::array<Aabb, kBins> bin_bounds;
    std::array<size_t, kBins> bin_count{};
    const float scale = kBins / cext[axis];
    auto bin_of = [&](uint32_t id) {
      return std::min(kBins - 1, int((centroids[id][axis] - centroid_bounds.lo[axis]) * scale));
    };
    for (size_t i = begin; i < end; ++i) {
      const int b = bin_of(ids[i]);
      bin_count[size_t(b)]++;
      bin_bounds[size_t(b)].expand(boxes[ids[i]]);
    }
    std::array<float, kBins - 1> left_cost{};
    Aabb acc;
    size_t acc_count = 0;
    for (int b = 0; b < kBins - 1; ++b) {
      acc.expand(bin_bounds[size_t(b)]);
      acc_count += bin_count[size_t(b)];
      left_cost[size_t(b)] = acc_count ? acc.surface_area() * float(acc_count) : INFINITY;
    }
    acc = Aabb{};
    acc_count = 0;
    for (int b = kBins - 1; b >= 1; --b) {
      acc.expand(bin_bounds[size_t(b)]);
      acc_count += bin_count[size_t(b)];
      if (acc_count == 0 || acc_count == count) continue;
      const float cost = left_cost[size_t(b - 1)] + acc.surface_area() * float(acc_count);
      if (cost < best_cost) {
        best_cost = cost;
        best_axis = axis;
        best_split = b;
      }
    }
  }

  const float area = bounds.surface_area();
  const float split_cost = area > 0 ? kTraversalCost + best_cost / area : INFINITY;
  if (count <= size_t(kMaxLeafSize) && (best_axis < 0 || float(count) <= split_cost)) return make_leaf();

  size_t mid;
  if (best_axis >= 0) {
    const int axis = best_axis;
    const float scale = kBins / cext[axis];
    auto it = std::partition(ids.begin() + std::ptrdiff_t(begin), ids.begin() + std::ptrdiff_t(end), [&](uint32_t id) {
      return std::min(kBins - 1, int((centroids[id][axis] - centroid_bounds.lo[axis]) * scale)) < best_split;
    });
    mid = size_t(it - ids.begin());
  } else {
    // SAH has no usable split (coincident centroids): median by position, then id.
    const Vec3 ext = bounds.extent();
    const int axis = ext.x >= ext.y && ext.x >= ext.z ? 0 : (ext.y >= ext.z ? 1 : 2);
    mid = begin + count / 2;
    std::nth_element(ids.begin() + std::ptrdiff_t(begin), ids.begin() + std::ptrdiff_t(mid),
                     ids.begin() + std::ptrdiff_t(end), [&](uint32_t a, uint32_t b) {
                       if (centroids[a][axis] != centroids[b][axis]) return centroids[a][axis] < centroids[b][axis];
                       return a < b;
                     });
  }
  nodes_[node_index].axis = uint16_t(std::max(best_axis, 0));
  build_recursive(ids, centroids, boxes, begin, mid, depth + 1);
  const uint32_t right = build_recursive(ids, centroids, boxes, mid, end, depth + 1);
  nodes_[node_index].offset = right;
  return node_index;
}

Hit Bvh::make_hit(const Ray& ray, const Triangle& tri, float t, float u, float v) const {
  Hit hit;
  hit.t = t;
  hit.triangle_id = tri.id;
  hit.position = tri.v0 + tri.e1 * u + tri.e2 * v;
  hit.geometric_normal = normalize(cross(tri.e1, tri.e2));
  const Shading& s = shading_[tri.id];
  hit.material_id = s.material_id;
  hit.shading_normal = hit.geometric_normal;
  if (s.has_normals) {
    const Vec3 n = normalize(s.n0 * (1.0f - u - v) + s.n1 * u + s.n2 * v);
    if (is_finite(n) && length(n) > 0.5f) hit.shading_normal = n;
  }
  (void)ray;
  return hit;
}

std::optional<Hit> Bvh::intersect(const Ray& ray) const {
  const RayPrecomp pre = precompute(ray);
  Closest best{ray.t_max};
  uint32_t local[kLocalStack];
  std::vector<uint32_t> heap;
  uint32_t* stack = local;
  if (depth_ > kLocalStack) {
    heap.resize(depth_);
    stack = heap.data();
  }
  int sp = 0;
  uint32_t current = 0;
  for (;;) {
    const Node& node = nodes_[current];
    if (slab_test(node.bounds, pre, ray.t_min, best.t)) {
      if (node.is_leaf()) {
        for (uint32_t i = 0; i < node.count; ++i) best.consider(ordered_[node.offset + i], ray);
      } else if (pre.dir_negative[node.axis]) {
        stack[sp++] = current + 1;
        current = node.offset;
        continue;
      } else {
        stack[sp++] = node.offset;
        current = current + 1;
        continue;
      }
    }
    if (sp == 0) break;
    current = stack[--sp];
  }
  if (!best.tri || !(best.t < ray.t_max)) return std::nullopt;
  return make_hit(ray, *best.tri, best.t, best.u, best.v);
}

bool Bvh::occluded(const Ray& ray, float t_max) const {
  const float limit = std::min(t_max, ray.t_max);
  const RayPrecomp pre = precompute(ray);
  uint32_t local[kLocalStack];
  std::vector<uint32_t> heap;
  uint32_t* stack = local;
  if (depth_ > kLocalStack) {
    heap.resize(depth_);
    stack = heap.data();
  }
  int sp = 0;
  uint32_t current = 0;
  for (;;) {
    const Node& node = nodes_[current];
    if (slab_test(node.bounds, pre, ray.t_min, limit)) {
      if (node.is_leaf()) {
        for (uint32_t i = 0; i < node.count; ++i) {
          float t, u, v;
          if (intersect_triangle(ordered_[node.offset + i], ray, t, u, v) && t > ray.t_min && t < limit)
            return true;
        }
      } else {
        stack[sp++] = node.offset;
        current = current + 1;
        continue;
      }
    }
    if (sp == 0) return false;
    current = stack[--sp];
  }
}

std::optional<Hit> Bvh::intersect_brute_force(const Ray& ray) const {
  Closest best{ray.t_max};
  for (const Triangle& tri : ordered_) best.consider(tri, ray);
  if (!best.tri || !(best.t < ray.t_max)) return std::nullopt;
  return make_hit(ray, *best.tri, best.t, best.u, best.v);
}

}  // namespace fovtrace
