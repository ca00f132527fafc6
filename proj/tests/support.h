// fovtrace is licensed under the Apache License, Version 2.0.
// SPDX: Apache-2.0

#pragma once

#include <atomic>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>
#include <string>
#include <unistd.h>

#include "fovtrace/foveation.h"
#include "fovtrace/scene.h"

namespace fovtrace::test {

inline std::filesystem::path assets_dir() { return FOVTRACE_ASSETS_DIR; }
inline std::filesystem::path desk_config() { return assets_dir() / "desk" / "desk.json"; }

// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag = "fovtrace") {
    static std::atomic<int> counter{0};
    path_ = std::filesystem::temp_directory_path() /
            (tag + "_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
    std::filesystem::remove_all(path_);
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

inline void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  out << text;
}

inline std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

// Large horizontal quad at height y, facing +y, with one material.
inline Mesh plane_mesh(float y, float half_extent, uint32_t material = 0) {
  Mesh m;
  m.name = "plane";
  m.positions = {{-half_extent, y, -half_extent},
                 {half_extent, y, -half_extent},
                 {half_extent, y, half_extent},
                 {-half_extent, y, half_extent}};
  m.triangles = {{0, 2, 1}, {0, 3, 2}};
  m.material_ids = {material, material};
  return m;
}

// Axis-aligned box with inward- and outward-usable faces.
inline Mesh box_mesh(const Vec3& lo, const Vec3& hi, uint32_t material = 0) {
  Mesh m;
  m.name = "box";
  m.positions = {{lo.x, lo.y, lo.z}, {hi.x, lo.y, lo.z}, {hi.x, hi.y, lo.z}, {lo.x, hi.y, lo.z},
                 {lo.x, lo.y, hi.z}, {hi.x, lo.y, hi.z}, {hi.x, hi.y, hi.z}, {lo.x, hi.y, hi.z}};
  const uint32_t quads[6][4] = {{0, 3, 2, 1}, {4, 5, 6, 7}, {0, 1, 5, 4}, {3, 7, 6, 2}, {0, 4, 7, 3}, {1, 2, 6, 5}};
  for (const auto& q : quads) {
    m.triangles.push_back({q[0], q[1], q[2]});
    m.triangles.push_back({q[0], q[2], q[3]});
  }
  m.material_ids.assign(m.triangles.size(), material);
  return m;
}

// Small render config text for a scene on disk; fields not listed use defaults.
inline std::string config_json(const std::string& obj, int width, int height, const std::string& extra = "") {
  return R"({"scene":{"obj":")" + obj + R"("},"camera":{"position":[0,1,3],"look_at":[0,0.5,0]},)" +
         R"("image":{"width":)" + std::to_string(width) + R"(,"height":)" + std::to_string(height) + "}" +
         (extra.empty() ? "" : "," + extra) + "}";
}

// Independent evaluation of the eccentricity-to-radius relation in long double.
inline long double oracle_radius(long double ecc_deg, long double width_cm, long double resolution_px,
                                 long double distance_cm) {
  const long double pi = 3.141592653589793238462643383279502884L;
  return 2.0L * distance_cm * resolution_px * std::tan(ecc_deg * pi / 360.0L) / width_cm;
}

}  // namespace fovtrace::test
