// fovtrace is licensed under the Apache License, Version 2.0.
// SPDX: Apache-2.0

#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "fovtrace/math.h"
#include "fovtrace/scene.h"

namespace fovtrace {

struct Ray {
  Vec3 origin;
  Vec3 direction;  // unit length
  float t_min = 0.0f;
  float t_max = INFINITY;
};

struct Hit {
  float t = 0;
  Vec3 position;
  Vec3 geometric_normal;
  Vec3 shading_normal;
  uint32_t material_id = 0;
  uint32_t triangle_id = 0;  // index into the scene's concatenated triangle list
};

// Flattened binary BVH over all scene triangles. Interior nodes store the
// left child right after themselves and the right child at `offset`; leaves
// store `count` (1..kMaxLeafSize) consecutive entries of the triangle order.
class Bvh {
 public:
  static constexpr int kMaxLeafSize = 4;

  struct Node {
    Aabb bounds;
    uint32_t offset = 0;  // leaf: first ordered triangle; interior: right child
    uint16_t count = 0;   // 0 for interior nodes
    uint16_t axis = 0;
    bool is_leaf() const { return count > 0; }
  };

  // Per-triangle data stored in traversal order.
  struct Triangle {
    Vec3 v0, e1, e2;
    uint32_t id;
  };

  static Bvh build(const std::vector<Mesh>& meshes);
  static Bvh build(const Scene& scene) { return build(scene.meshes); }

  std::optional<Hit> intersect(const Ray& ray) const;
  bool occluded(const Ray& ray, float t_max) const;

  // Exhaustive reference used by tests.
  std::optional<Hit> intersect_brute_force(const Ray& ray) const;

  std::span<const Node> nodes() const { return nodes_; }
  std::span<const uint32_t> triangle_order() const { return order_; }
  size_t triangle_count() const { return shading_.size(); }
  const Aabb& bounds() const { return nodes_.front().bounds; }
  const Aabb& triangle_bounds(uint32_t triangle_id) const { return boxes_[triangle_id]; }
  // Self-intersection offset: 1e-4 of the scene diagonal.
  float ray_epsilon() const { return epsilon_; }

 private:
  struct Shading {
    Vec3 n0, n1, n2;
    uint32_t material_id = 0;
    bool has_normals = false;
  };

  Hit make_hit(const Ray& ray, const Triangle& tri, float t, float u, float v) const;
  uint32_t build_recursive(std::vector<uint32_t>& ids, const std::vector<Vec3>& centroids,
                           const std::vector<Aabb>& boxes, size_t begin, size_t end, uint32_t depth);

  std::vector<Node> nodes_;
  std::vector<uint32_t> order_;
  std::vector<Triangle> ordered_;
  std::vector<Shading> shading_;  // by triangle id
  std::vector<Aabb> boxes_;       // by triangle id
  uint32_t depth_ = 0;
  float epsilon_ = 1e-4f;
};

}  // namespace fovtrace
