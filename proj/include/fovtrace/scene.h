// fovtrace is licensed under the Apache License, Version 2.0.
// SPDX: Apache-2.0

#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "fovtrace/foveation.h"
#include "fovtrace/image_io.h"
#include "fovtrace/math.h"

namespace fovtrace {

// Diffuse + GGX-metallic subset of a principled BRDF.
struct Material {
  std::string name = "default";
  Vec3 base_color{0.8f};
  float roughness = 1.0f;
  float metallic = 0.0f;
  Vec3 emission{0.0f};

  void validate() const;
  bool operator==(const Material&) const = default;
};

struct Mesh {
  std::string name;
  std::vector<Vec3> positions;
  std::vector<Vec3> normals;  // empty or one per position
  std::vector<std::array<float, 2>> uvs;  // empty or one per position
  std::vector<std::array<uint32_t, 3>> triangles;
  std::vector<uint32_t> material_ids;  // one per triangle

  size_t triangle_count() const { return triangles.size(); }
  // Checks index ranges, per-triangle material count and unit normals.
  void validate(size_t material_count) const;
  bool operator==(const Mesh&) const = default;
};

// Latitude-longitude environment: row 0 is the +y pole, u wraps around +y
// starting at +x. Direction for (u, v) in [0,1]^2:
//   theta = pi v, phi = 2 pi u, d = (sin theta cos phi, cos theta, sin theta sin phi)
struct EnvironmentLight {
  int width = 0;
  int height = 0;
  std::vector<Vec3> radiance;
  // Texel probabilities (sum 1 overall) proportional to luminance times the
  // texel's solid angle, stored as a row marginal and per-row conditionals.
  std::vector<double> row_pdf;        // height
  std::vector<double> row_cdf;        // height + 1
  std::vector<double> column_pdf;     // height * width, each row sums to 1
  std::vector<double> column_cdf;     // height * (width + 1)
  double total_weight = 0;            // 0 means nothing to sample

  static EnvironmentLight from_image(const RgbImage& image);
  static EnvironmentLight constant(const Vec3& radiance);

  const Vec3& texel(int x, int y) const { return radiance[size_t(y) * width + x]; }
  double texel_probability(int x, int y) const { return row_pdf[size_t(y)] * column_pdf[size_t(y) * width + x]; }
  double texel_solid_angle(int y) const;

  // Texel containing a direction.
  std::pair<int, int> texel_of(const Vec3& direction) const;
  Vec3 lookup(const Vec3& direction) const;
  // Density in 1/sr that sample_environment assigns to `direction`.
  double pdf(const Vec3& direction) const;
};

struct Camera {
  Vec3 position{0, 0, 1};
  Vec3 look_at{0, 0, 0};
  Vec3 up{0, 1, 0};
  float fov_deg = 60.0f;
  int width = 640;
  int height = 360;

  void validate() const;

  // Primary ray direction through continuous image coordinates (pixel (x, y)
  // covers [x, x+1) x [y, y+1); y grows downward).
  Vec3 direction(float image_x, float image_y) const;
};

struct Scene {
  std::string name;
  std::vector<Mesh> meshes;
  std::vector<Material> materials;
  std::optional<EnvironmentLight> environment;
  Camera camera;
  Vec3 background{0.0f};

  size_t triangle_count() const;
  void validate() const;
};

struct ObjLoadResult {
  std::vector<Mesh> meshes;
  std::vector<Material> materials;
  size_t degenerate_dropped = 0;
  std::vector<std::string> warnings;
};

// Wavefront OBJ with optional MTL libraries. Polygons are fan triangulated.
ObjLoadResult load_obj(const std::filesystem::path& path);

// Radiance .hdr or .pfm; rejects non-finite or negative texels.
EnvironmentLight load_env_map(const std::filesystem::path& path);

enum class RenderMode { Uniform, Foveated };

RenderMode parse_render_mode(const std::string& text);
const char* render_mode_name(RenderMode mode);

struct RenderSettings {
  int spp_uniform = 32;
  int max_depth = 3;
  uint64_t seed = 0;
  RenderMode mode = RenderMode::Foveated;
  bool temporal = false;  // running-mean accumulation across frames
};

struct RenderConfig {
  std::filesystem::path source;
  Scene scene;
  DisplayGeometry display;
  FoveationConfig foveation;
  RenderSettings render;
  size_t degenerate_dropped = 0;
  std::vector<std::string> warnings;
};

// Parses the JSON render config; relative asset paths resolve against the
// config file's directory. Throws ValidationError naming the offending key.
RenderConfig load_render_config(const std::filesystem::path& path);

// Applies only the settings part of a config document (no asset loading).
// Used by load_render_config and by tests.
RenderConfig parse_render_config_text(const std::string& json_text, const std::filesystem::path& base_dir,
                                      bool load_assets);

}  // namespace fovtrace
