// fovtrace is licensed under the Apache License, Version 2.0.
// SPDX: Apache-2.0

#include "fovtrace/scene.h"

#include <charconv>
#include <cmath>
#include <fstream>
#include <json.hpp>
#include <map>
#include <numeric>
#include <set>
#include <sstream>
#include <tuple>
#include <unordered_map>

#include "fovtrace/error.h"

namespace fovtrace {

namespace fs = std::filesystem;
using json = nlohmann::json;

void Material::validate() const {
  auto in_unit = [](float v) { return v >= 0.0f && v <= 1.0f; };
  if (!in_unit(base_color.x) || !in_unit(base_color.y) || !in_unit(base_color.z))
    throw ValidationError("material '" + name + "': base_color outside [0,1]");
  if (!in_unit(roughness)) throw ValidationError("material '" + name + "': roughness outside [0,1]");
  if (!in_unit(metallic)) throw ValidationError("material '" + name + "': metallic outside [0,1]");
  if (!(emission.x >= 0 && emission.y >= 0 && emission.z >= 0) || !is_finite(emission))
    throw ValidationError("material '" + name + "': emission must be finite and >= 0");
}

void Mesh::validate(size_t material_count) const {
  if (material_ids.size() != triangles.size())
    throw ValidationError("mesh '" + name + "': material_ids size does not match triangle count");
  if (!normals.empty() && normals.size() != positions.size())
    throw ValidationError("mesh '" + name + "': normal count does not match vertex count");
  if (!uvs.empty() && uvs.size() != positions.size())
    throw ValidationError("mesh '" + name + "': uv count does not match vertex count");
  for (const auto& tri : triangles)
    for (uint32_t idx : tri)
      if (idx >= positions.size()) throw ValidationError("mesh '" + name + "': vertex index out of range");
  for (uint32_t id : material_ids)
    if (id >= material_count) throw ValidationError("mesh '" + name + "': material id out of range");
  for (const auto& n : normals)
    if (std::abs(length(n) - 1.0f) > 1e-4f) throw ValidationError("mesh '" + name + "': non-unit normal");
}

// ---------------------------------------------------------------------------
// Environment
// ---------------------------------------------------------------------------

double EnvironmentLight::texel_solid_angle(int y) const {
  const double theta0 = kPiD * y / height;
  const double theta1 = kPiD * (y + 1) / height;
  return 2.0 * kPiD / width * (std::cos(theta0) - std::cos(theta1));
}

EnvironmentLight EnvironmentLight::from_image(const RgbImage& image) {
  if (image.width < 1 || image.height < 1) throw ValidationError("environment map is empty");
  EnvironmentLight env;
  env.width = image.width;
  env.height = image.height;
  env.radiance = image.pixels;
  for (const Vec3& c : env.radiance)
    if (!is_finite(c) || c.x < 0 || c.y < 0 || c.z < 0)
      throw ValidationError("environment map contains non-finite or negative radiance");

  const size_t w = size_t(env.width);
  env.row_pdf.assign(size_t(env.height), 0.0);
  env.row_cdf.assign(size_t(env.height) + 1, 0.0);
  env.column_pdf.assign(w * size_t(env.height), 0.0);
  env.column_cdf.assign((w + 1) * size_t(env.height), 0.0);

  std::vector<double> row_weight(size_t(env.height), 0.0);
  for (int y = 0; y < env.height; ++y) {
    const double omega = env.texel_solid_angle(y);
    double* pdf = &env.column_pdf[size_t(y) * w];
    double sum = 0;
    for (int x = 0; x < env.width; ++x) {
      pdf[x] = double(luminance(env.texel(x, y))) * omega;
      sum += pdf[x];
    }
    row_weight[size_t(y)] = sum;
    double* cdf = &env.column_cdf[size_t(y) * (w + 1)];
    for (int x = 0; x < env.width; ++x) {
      pdf[x] = sum > 0 ? pdf[x] / sum : 1.0 / double(w);
      cdf[x + 1] = cdf[x] + pdf[x];
    }
    cdf[w] = 1.0;
  }
  env.total_weight = std::accumulate(row_weight.begin(), row_weight.end(), 0.0);
  for (int y = 0; y < env.height; ++y) {
    env.row_pdf[size_t(y)] =
        env.total_weight > 0 ? row_weight[size_t(y)] / env.total_weight : 1.0 / double(env.height);
    env.row_cdf[size_t(y) + 1] = env.row_cdf[size_t(y)] + env.row_pdf[size_t(y)];
  }
  env.row_cdf[size_t(env.height)] = 1.0;
  return env;
}

EnvironmentLight EnvironmentLight::constant(const Vec3& radiance) {
  RgbImage image;
  image.width = 1;
  image.height = 1;
  image.pixels = {radiance};
  return from_image(image);
}

std::pair<int, int> EnvironmentLight::texel_of(const Vec3& d) const {
  double phi = std::atan2(double(d.z), double(d.x));
  if (phi < 0) phi += 2.0 * kPiD;
  const double theta = std::acos(std::clamp(double(d.y), -1.0, 1.0));
  const int x = std::clamp(int(phi / (2.0 * kPiD) * width), 0, width - 1);
  const int y = std::clamp(int(theta / kPiD * height), 0, height - 1);
  return {x, y};
}

Vec3 EnvironmentLight::lookup(const Vec3& direction) const {
  const auto [x, y] = texel_of(direction);
  return texel(x, y);
}

double EnvironmentLight::pdf(const Vec3& direction) const {
  if (total_weight <= 0) return 0.0;
  const auto [x, y] = texel_of(direction);
  const double omega = texel_solid_angle(y);
  return omega > 0 ? texel_probability(x, y) / omega : 0.0;
}

EnvironmentLight load_env_map(const fs::path& path) {
  std::string ext = path.extension().string();
  for (auto& c : ext) c = char(std::tolower(static_cast<unsigned char>(c)));
  RgbImage image;
  if (ext == ".hdr") {
    image = read_hdr(path);
  } else if (ext == ".pfm") {
    image = read_pfm(path);
  } else {
    throw IoError(path.string() + ": unsupported environment format (expected .hdr or .pfm)");
  }
  try {
    return EnvironmentLight::from_image(image);
  } catch (const ValidationError& e) {
    throw ValidationError(path.string() + ": " + e.what());
  }
}

// ---------------------------------------------------------------------------
// Camera / Scene
// ---------------------------------------------------------------------------

void Camera::validate() const {
  if (!(fov_deg > 0 && fov_deg < 180)) throw ValidationError("camera.fov_deg must lie in (0, 180)");
  if (width < 1 || height < 1) throw ValidationError("image.width and image.height must be >= 1");
  const Vec3 forward = look_at - position;
  if (!(length(forward) > 0)) throw ValidationError("camera.look_at must differ from camera.position");
  if (!(length(cross(forward, up)) > 0)) throw ValidationError("camera.up must not be parallel to the view");
}

Vec3 Camera::direction(float image_x, float image_y) const {
  const Vec3 forward = normalize(look_at - position);
  const Vec3 right = normalize(cross(forward, up));
  const Vec3 true_up = cross(right, forward);
  const float tan_half = std::tan(fov_deg * kPi / 360.0f);
  const float aspect = float(width) / float(height);
  const float sx = (2.0f * image_x / float(width) - 1.0f) * tan_half * aspect;
  const float sy = (1.0f - 2.0f * image_y / float(height)) * tan_half;
  return normalize(forward + right * sx + true_up * sy);
}

size_t Scene::triangle_count() const {
  size_t count = 0;
  for (const auto& m : meshes) count += m.triangle_count();
  return count;
}

void Scene::validate() const {
  if (triangle_count() == 0) throw ValidationError("scene has no triangles");
  for (const auto& m : materials) m.validate();
  for (const auto& m : meshes) m.validate(materials.size());
  camera.validate();
}

// ---------------------------------------------------------------------------
// OBJ / MTL
// ---------------------------------------------------------------------------

namespace {

std::vector<std::string_view> split_ws(std::string_view line) {
  std::vector<std::string_view> out;
  size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i]))) ++i;
    const size_t start = i;
    while (i < line.size() && !std::isspace(static_cast<unsigned char>(line[i]))) ++i;
    if (i > start) out.push_back(line.substr(start, i - start));
  }
  return out;
}

float parse_float(std::string_view s, const fs::path& file, int line) {
  float v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size())
    throw ParseError(file.string(), line, "invalid number '" + std::string(s) + "'");
  return v;
}

Vec3 parse_vec3(const std::vector<std::string_view>& tok, size_t first, const fs::path& file, int line) {
  if (tok.size() < first + 3) throw ParseError(file.string(), line, "expected three numbers");
  return {parse_float(tok[first], file, line), parse_float(tok[first + 1], file, line),
          parse_float(tok[first + 2], file, line)};
}

// Resolves a 1-based (or negative, relative) OBJ index; 0 means absent.
int resolve_index(std::string_view s, size_t count, const fs::path& file, int line) {
  if (s.empty()) return -1;
  int v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || v == 0)
    throw ParseError(file.string(), line, "invalid index '" + std::string(s) + "'");
  const long idx = v > 0 ? long(v) - 1 : long(count) + v;
  if (idx < 0 || size_t(idx) >= count)
    throw ParseError(file.string(), line, "index " + std::string(s) + " out of range");
  return int(idx);
}

void load_mtl(const fs::path& path, std::vector<Material>& materials, std::map<std::string, uint32_t>& by_name,
              std::vector<std::string>& warnings) {
  std::ifstream in(path);
  if (!in) {
    warnings.push_back("material library not found: " + path.string());
    return;
  }
  std::string raw;
  int line_no = 0;
  Material* current = nullptr;
  std::set<std::string> warned;
  while (std::getline(in, raw)) {
    ++line_no;
    if (const auto hash = raw.find('#'); hash != std::string::npos) raw.resize(hash);
    const auto tok = split_ws(raw);
    if (tok.empty()) continue;
    const std::string key(tok[0]);
    if (key == "newmtl") {
      if (tok.size() < 2) throw ParseError(path.string(), line_no, "newmtl without name");
      Material m;
      m.name = std::string(tok[1]);
      by_name[m.name] = uint32_t(materials.size());
      materials.push_back(m);
      current = &materials.back();
      continue;
    }
    if (!current) continue;
    if (key == "Kd") {
      const Vec3 c = parse_vec3(tok, 1, path, line_no);
      current->base_color = {std::clamp(c.x, 0.0f, 1.0f), std::clamp(c.y, 0.0f, 1.0f), std::clamp(c.z, 0.0f, 1.0f)};
      if (!(current->base_color == c)) warnings.push_back("material '" + current->name + "': Kd clamped to [0,1]");
    } else if (key == "Ke") {
      const Vec3 e = parse_vec3(tok, 1, path, line_no);
      current->emission = max(e, Vec3{0.0f});
    } else if (key == "Pr" || key == "Pm") {
      if (tok.size() < 2) throw ParseError(path.string(), line_no, "expected a number");
      const float v = std::clamp(parse_float(tok[1], path, line_no), 0.0f, 1.0f);
      (key == "Pr" ? current->roughness : current->metallic) = v;
    } else if (key.rfind("map_", 0) == 0 || key == "bump" || key == "disp" || key == "refl" || key == "norm") {
      if (warned.insert(key).second) warnings.push_back("ignored texture map statement '" + key + "' in " + path.string());
    }
  }
}

struct VertexKey {
  int p, t, n;
  bool operator==(const VertexKey&) const = default;
};
struct VertexKeyHash {
  size_t operator()(const VertexKey& k) const {
    return (size_t(uint32_t(k.p)) * 73856093u) ^ (size_t(uint32_t(k.t)) * 19349663u) ^
           (size_t(uint32_t(k.n)) * 83492791u);
  }
};

struct MeshBuilder {
  Mesh mesh;
  std::unordered_map<VertexKey, uint32_t, VertexKeyHash> vertex_map;
  // Face corners waiting to be emitted, as (position, uv, normal) source indices.
  struct Corner {
    int p, t, n;
  };
  struct Face {
    std::array<Corner, 3> corners;
    uint32_t material;
  };
  std::vector<Face> faces;
  bool any_normals = false;
  bool any_uvs = false;
};

}  // namespace

ObjLoadResult load_obj(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("file not found: " + path.string());

  ObjLoadResult result;
  std::map<std::string, uint32_t> material_by_name;
  std::vector<Vec3> positions, normals;
  std::vector<std::array<float, 2>> uvs;
  std::vector<MeshBuilder> builders(1);
  builders.back().mesh.name = path.stem().string();
  std::optional<uint32_t> current_material;
  std::optional<uint32_t> default_material;
  auto material_for_face = [&]() -> uint32_t {
    if (current_material) return *current_material;
    if (!default_material) {
      default_material = uint32_t(result.materials.size());
      result.materials.push_back(Material{});
    }
    return *default_material;
  };

  std::string raw;
  int line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    if (const auto hash = raw.find('#'); hash != std::string::npos) raw.resize(hash);
    const auto tok = split_ws(raw);
    if (tok.empty()) continue;
    const std::string_view key = tok[0];
    if (key == "v") {
      positions.push_back(parse_vec3(tok, 1, path, line_no));
    } else if (key == "vn") {
      normals.push_back(parse_vec3(tok, 1, path, line_no));
    } else if (key == "vt") {
      if (tok.size() < 3) throw ParseError(path.string(), line_no, "expected two texture coordinates");
      uvs.push_back({parse_float(tok[1], path, line_no), parse_float(tok[2], path, line_no)});
    } else if (key == "f") {
      if (tok.size() < 4) throw ParseError(path.string(), line_no, "face needs at least three vertices");
      std::vector<MeshBuilder::Corner> corners;
      for (size_t i = 1; i < tok.size(); ++i) {
        const std::string_view c = tok[i];
        const size_t s1 = c.find('/');
        const size_t s2 = s1 == std::string_view::npos ? std::string_view::npos : c.find('/', s1 + 1);
        const std::string_view ps = c.substr(0, s1);
        const std::string_view ts =
            s1 == std::string_view::npos ? std::string_view{} : c.substr(s1 + 1, s2 == std::string_view::npos ? c.npos : s2 - s1 - 1);
        const std::string_view ns = s2 == std::string_view::npos ? std::string_view{} : c.substr(s2 + 1);
        if (ps.empty()) throw ParseError(path.string(), line_no, "face corner without position index");
        corners.push_back({resolve_index(ps, positions.size(), path, line_no),
                           resolve_index(ts, uvs.size(), path, line_no),
                           resolve_index(ns, normals.size(), path, line_no)});
      }
      auto& b = builders.back();
      const uint32_t mat = material_for_face();
      for (size_t i = 1; i + 1 < corners.size(); ++i) {
        b.faces.push_back({{corners[0], corners[i], corners[i + 1]}, mat});
        for (const auto& cc : b.faces.back().corners) {
          b.any_normals |= cc.n >= 0;
          b.any_uvs |= cc.t >= 0;
        }
      }
    } else if (key == "usemtl") {
      if (tok.size() < 2) throw ParseError(path.string(), line_no, "usemtl without name");
      const auto it = material_by_name.find(std::string(tok[1]));
      if (it == material_by_name.end()) {
        result.warnings.push_back("unknown material '" + std::string(tok[1]) + "', using default");
        current_material.reset();
      } else {
        current_material = it->second;
      }
    } else if (key == "mtllib") {
      for (size_t i = 1; i < tok.size(); ++i)
        load_mtl(path.parent_path() / std::string(tok[i]), result.materials, material_by_name, result.warnings);
    } else if (key == "o") {
      if (!builders.back().faces.empty()) builders.emplace_back();
      builders.back().mesh.name = tok.size() > 1 ? std::string(tok[1]) : "object";
    }
    // g, s, l, p and vendor statements carry nothing we render.
  }

  for (auto& b : builders) {
    if (b.faces.empty()) continue;
    Mesh& mesh = b.mesh;
    for (size_t fi = 0; fi < b.faces.size(); ++fi) {
      const auto& face = b.faces[fi];
      const Vec3 p0 = positions[size_t(face.corners[0].p)];
      const Vec3 p1 = positions[size_t(face.corners[1].p)];
      const Vec3 p2 = positions[size_t(face.corners[2].p)];
      const double e1[3] = {double(p1.x) - p0.x, double(p1.y) - p0.y, double(p1.z) - p0.z};
      const double e2[3] = {double(p2.x) - p0.x, double(p2.y) - p0.y, double(p2.z) - p0.z};
      const double cx = e1[1] * e2[2] - e1[2] * e2[1];
      const double cy = e1[2] * e2[0] - e1[0] * e2[2];
      const double cz = e1[0] * e2[1] - e1[1] * e2[0];
      const double area2 = std::sqrt(cx * cx + cy * cy + cz * cz);
      const double l1 = std::sqrt(e1[0] * e1[0] + e1[1] * e1[1] + e1[2] * e1[2]);
      const double l2 = std::sqrt(e2[0] * e2[0] + e2[1] * e2[1] + e2[2] * e2[2]);
      if (!(area2 > 1e-10 * l1 * l2) || !std::isfinite(area2)) {
        ++result.degenerate_dropped;
        continue;
      }
      const Vec3 face_normal{float(cx / area2), float(cy / area2), float(cz / area2)};
      std::array<uint32_t, 3> tri{};
      for (int k = 0; k < 3; ++k) {
        const auto& c = face.corners[size_t(k)];
        Vec3 n = face_normal;
        bool per_face = c.n < 0;
        if (!per_face) {
          const Vec3 vn = normals[size_t(c.n)];
          if (length(vn) > 0 && is_finite(vn)) {
            n = normalize(vn);
          } else {
            per_face = true;
          }
        }
        // Corners without a usable normal get the face normal on a private vertex.
        const VertexKey key{c.p, c.t, per_face ? -1 - int(fi) : c.n};
        auto [it, inserted] = b.vertex_map.try_emplace(key, uint32_t(mesh.positions.size()));
        if (inserted) {
          mesh.positions.push_back(positions[size_t(c.p)]);
          if (b.any_normals) mesh.normals.push_back(n);
          if (b.any_uvs) mesh.uvs.push_back(c.t >= 0 ? uvs[size_t(c.t)] : std::array<float, 2>{0, 0});
        }
        tri[size_t(k)] = it->second;
      }
      mesh.triangles.push_back(tri);
      mesh.material_ids.push_back(face.material);
    }
    if (!mesh.triangles.empty()) result.meshes.push_back(std::move(mesh));
  }

  if (result.degenerate_dropped > 0)
    result.warnings.push_back("dropped " + std::to_string(result.degenerate_dropped) + " degenerate triangle(s)");
  if (result.meshes.empty()) throw ValidationError(path.string() + ": no triangles after cleanup");
  for (const auto& m : result.meshes) m.validate(result.materials.size());
  return result;
}

// ---------------------------------------------------------------------------
// Render config
// ---------------------------------------------------------------------------

RenderMode parse_render_mode(const std::string& text) {
  if (text == "uniform") return RenderMode::Uniform;
  if (text == "foveated") return RenderMode::Foveated;
  throw ValidationError("render.mode must be \"uniform\" or \"foveated\", got \"" + text + "\"");
}

const char* render_mode_name(RenderMode mode) { return mode == RenderMode::Uniform ? "uniform" : "foveated"; }

namespace {

// Typed accessors that name the dotted key in every error.
class Section {
 public:
  Section(const json& root, std::string name, std::set<std::string> allowed)
      : name_(std::move(name)), allowed_(std::move(allowed)) {
    if (!root.contains(name_)) return;
    const json& s = root.at(name_);
    if (!s.is_object()) throw ValidationError("config key '" + name_ + "': expected an object");
    node_ = &s;
    for (const auto& [k, _] : s.items())
      if (!allowed_.count(k)) throw ValidationError("config key '" + name_ + "." + k + "': unknown key");
  }

  bool has(const std::string& key) const { return node_ && node_->contains(key); }
  std::string path(const std::string& key) const { return name_ + "." + key; }

  double number(const std::string& key, double fallback) const {
    if (!has(key)) return fallback;
    const json& v = node_->at(key);
    if (!v.is_number()) throw ValidationError("config key '" + path(key) + "': expected a number");
    return v.get<double>();
  }
  int integer(const std::string& key, int fallback) const {
    if (!has(key)) return fallback;
    const json& v = node_->at(key);
    if (!v.is_number_integer()) throw ValidationError("config key '" + path(key) + "': expected an integer");
    return v.get<int>();
  }
  bool boolean(const std::string& key, bool fallback) const {
    if (!has(key)) return fallback;
    const json& v = node_->at(key);
    if (!v.is_boolean()) throw ValidationError("config key '" + path(key) + "': expected true or false");
    return v.get<bool>();
  }
  std::string string(const std::string& key, const std::string& fallback) const {
    if (!has(key)) return fallback;
    const json& v = node_->at(key);
    if (!v.is_string()) throw ValidationError("config key '" + path(key) + "': expected a string");
    return v.get<std::string>();
  }
  std::vector<double> numbers(const std::string& key, size_t count) const {
    const json& v = node_->at(key);
    if (!v.is_array() || v.size() != count)
      throw ValidationError("config key '" + path(key) + "': expected an array of " + std::to_string(count) +
                            " numbers");
    std::vector<double> out;
    for (const auto& e : v) {
      if (!e.is_number())
        throw ValidationError("config key '" + path(key) + "': expected an array of numbers");
      out.push_back(e.get<double>());
    }
    return out;
  }
  Vec3 vec3(const std::string& key) const {
    const auto v = numbers(key, 3);
    return {float(v[0]), float(v[1]), float(v[2])};
  }
  void require(const std::string& key) const {
    if (!has(key)) throw ValidationError("config key '" + path(key) + "': required");
  }

 private:
  std::string name_;
  std::set<std::string> allowed_;
  const json* node_ = nullptr;
};

}  // namespace

RenderConfig parse_render_config_text(const std::string& json_text, const fs::path& base_dir, bool load_assets) {
  json root;
  try {
    root = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ValidationError(std::string("config is not valid JSON: ") + e.what());
  }
  if (!root.is_object()) throw ValidationError("config root must be an object");
  static const std::set<std::string> kSections = {"scene", "camera", "image", "display", "foveation", "render"};
  for (const auto& [k, _] : root.items())
    if (!kSections.count(k)) throw ValidationError("config key '" + k + "': unknown section");

  const Section scene(root, "scene", {"obj", "env", "name", "background"});
  const Section camera(root, "camera", {"position", "look_at", "up", "fov_deg"});
  const Section image(root, "image", {"width", "height"});
  const Section display(root, "display", {"width_cm", "height_cm", "distance_cm"});
  const Section foveation(root, "foveation", {"tau1", "tau2", "tau3", "n", "m", "ef_deg", "ei_deg", "gaze_px"});
  const Section render(root, "render", {"spp_uniform", "max_depth", "seed", "mode", "temporal"});

  RenderConfig cfg;

  camera.require("position");
  camera.require("look_at");
  image.require("width");
  image.require("height");
  cfg.scene.camera.position = camera.vec3("position");
  cfg.scene.camera.look_at = camera.vec3("look_at");
  if (camera.has("up")) cfg.scene.camera.up = camera.vec3("up");
  cfg.scene.camera.fov_deg = float(camera.number("fov_deg", 60.0));
  cfg.scene.camera.width = image.integer("width", 0);
  cfg.scene.camera.height = image.integer("height", 0);
  cfg.scene.camera.validate();

  cfg.display.width_cm = display.number("width_cm", cfg.display.width_cm);
  cfg.display.height_cm = display.number("height_cm", cfg.display.height_cm);
  cfg.display.distance_cm = display.number("distance_cm", cfg.display.distance_cm);
  cfg.display.resolution_px = cfg.scene.camera.width;
  cfg.display.validate();

  auto& f = cfg.foveation;
  f.tau1 = foveation.integer("tau1", f.tau1);
  f.tau2 = foveation.integer("tau2", f.tau2);
  f.tau3 = foveation.integer("tau3", f.tau3);
  f.n = foveation.integer("n", f.n);
  f.m = foveation.integer("m", f.m);
  f.ef_deg = foveation.number("ef_deg", f.ef_deg);
  f.ei_deg = foveation.number("ei_deg", f.ei_deg);
  if (foveation.has("gaze_px")) {
    const auto g = foveation.numbers("gaze_px", 2);
    f.gaze = {g[0], g[1]};
  } else {
    f.gaze = {0.5 * cfg.scene.camera.width, 0.5 * cfg.scene.camera.height};
  }
  f.validate();

  auto& r = cfg.render;
  r.spp_uniform = render.integer("spp_uniform", r.spp_uniform);
  r.max_depth = render.integer("max_depth", r.max_depth);
  r.seed = uint64_t(render.integer("seed", 0));
  r.mode = parse_render_mode(render.string("mode", "foveated"));
  r.temporal = render.boolean("temporal", false);
  if (r.spp_uniform < 1) throw ValidationError("config key 'render.spp_uniform': must be >= 1");
  if (r.max_depth < 1) throw ValidationError("config key 'render.max_depth': must be >= 1");

  if (scene.has("background")) cfg.scene.background = scene.vec3("background");
  if (!is_finite(cfg.scene.background) || cfg.scene.background.x < 0 || cfg.scene.background.y < 0 ||
      cfg.scene.background.z < 0)
    throw ValidationError("config key 'scene.background': must be finite and >= 0");
  scene.require("obj");
  const fs::path obj_path = base_dir / scene.string("obj", "");
  cfg.scene.name = scene.string("name", obj_path.stem().string());

  if (load_assets) {
    ObjLoadResult obj = load_obj(obj_path);
    cfg.scene.meshes = std::move(obj.meshes);
    cfg.scene.materials = std::move(obj.materials);
    cfg.degenerate_dropped = obj.degenerate_dropped;
    cfg.warnings = std::move(obj.warnings);
    if (scene.has("env")) cfg.scene.environment = load_env_map(base_dir / scene.string("env", ""));
    cfg.scene.validate();
  }
  return cfg;
}

RenderConfig load_render_config(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("file not found: " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  RenderConfig cfg = parse_render_config_text(ss.str(), path.parent_path(), true);
  cfg.source = path;
  return cfg;
}

}  // namespace fovtrace
