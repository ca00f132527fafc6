// fovtrace is licensed under the Apache License, Version 2.0.
// SPDX: Apache-2.0

#include "fovtrace/imaging.h"

#include <algorithm>
#include <cmath>

#include "fovtrace/error.h"

namespace fovtrace {

double log_average_luminance(const HdrFrame& frame) {
  if (frame.pixels.empty()) return 0.0;
  double sum = 0;
  for (const Vec3& p : frame.pixels) sum += std::log(double(std::max(luminance(p), 0.0f)) + kExposureEpsilon);
  return std::exp(sum / double(frame.pixels.size()));
}

HdrFrame exposure_compensate(const HdrFrame& frame) {
  HdrFrame out = frame;
  const double avg = log_average_luminance(frame);
  if (!(avg > 0)) return out;
  const float scale = float(kExposureKey / avg);
  for (Vec3& p : out.pixels) p *= scale;
  return out;
}

HdrFrame reinhard_tonemap(const HdrFrame& frame) {
  HdrFrame out = frame;
  for (Vec3& p : out.pixels) {
    const float l = luminance(p);
    if (!(l > 0)) {
      p = Vec3{0.0f};
      continue;
    }
    p *= (l / (1.0f + l)) / l;
  }
  return out;
}

float srgb_encode_channel(float v) {
  v = std::clamp(v, 0.0f, 1.0f);
  return v <= 0.0031308f ? 12.92f * v : 1.055f * std::pow(v, 1.0f / 2.4f) - 0.055f;
}

float srgb_decode_channel(float v) {
  v = std::clamp(v, 0.0f, 1.0f);
  return v <= 0.04045f ? v / 12.92f : std::pow((v + 0.055f) / 1.055f, 2.4f);
}

uint8_t srgb_to_byte(float linear) {
  return uint8_t(std::clamp(std::floor(srgb_encode_channel(linear) * 255.0f + 0.5f), 0.0f, 255.0f));
}

LdrImage encode_srgb(const HdrFrame& frame) {
  LdrImage out;
  out.width = frame.width;
  out.height = frame.height;
  out.rgb.resize(frame.pixels.size() * 3);
  for (size_t i = 0; i < frame.pixels.size(); ++i) {
    out.rgb[3 * i + 0] = srgb_to_byte(frame.pixels[i].x);
    out.rgb[3 * i + 1] = srgb_to_byte(frame.pixels[i].y);
    out.rgb[3 * i + 2] = srgb_to_byte(frame.pixels[i].z);
  }
  return out;
}

LdrImage postprocess(const HdrFrame& frame) { return encode_srgb(reinhard_tonemap(exposure_compensate(frame))); }

LdrImage region_overlay(const LdrImage& image, const std::vector<Region>& provenance, const GazePoint& gaze,
                        const RegionRadii& radii) {
  if (provenance.size() != size_t(image.width) * image.height)
    throw ValidationError("provenance size does not match image");
  LdrImage out = image;
  static constexpr std::array<std::array<float, 3>, 3> kTint = {{{1.0f, 1.0f, 1.0f}, {0.75f, 0.85f, 1.0f}, {0.55f, 0.55f, 0.7f}}};
  const double marker = std::max(3.0, image.width / 160.0);
  for (int y = 0; y < image.height; ++y) {
    for (int x = 0; x < image.width; ++x) {
      const size_t i = size_t(y) * image.width + x;
      uint8_t* px = &out.rgb[3 * i];
      const auto& tint = kTint[size_t(provenance[i])];
      for (int c = 0; c < 3; ++c) px[c] = uint8_t(std::lround(px[c] * tint[size_t(c)]));
      const double d = std::hypot(x - gaze.x, y - gaze.y);
      if (std::abs(d - radii.fovea_px) < 1.0 || std::abs(d - radii.intermediate_px) < 1.0) {
        px[0] = 255;
        px[1] = 255;
        px[2] = 255;
      }
      if (d <= marker) {
        px[0] = 255;
        px[1] = 0;
        px[2] = 0;
      }
    }
  }
  return out;
}

std::vector<uint8_t> provenance_bytes(const std::vector<Region>& provenance) {
  std::vector<uint8_t> bytes(provenance.size());
  std::transform(provenance.begin(), provenance.end(), bytes.begin(), [](Region r) { return uint8_t(r); });
  return bytes;
}

std::vector<Region> provenance_from_bytes(const std::vector<uint8_t>& bytes) {
  std::vector<Region> out(bytes.size());
  for (size_t i = 0; i < bytes.size(); ++i) {
    if (bytes[i] > 2) throw ValidationError("provenance values must be 0, 1 or 2");
    out[i] = Region(bytes[i]);
  }
  return out;
}

namespace {

ErrorMap error_map_from_luminance(int width, int height, const std::vector<float>& test,
                                  const std::vector<float>& reference, const std::vector<Region>* provenance) {
  if (provenance && provenance->size() != test.size())
    throw ValidationError("provenance size does not match image");
  ErrorMap map;
  map.width = width;
  map.height = height;
  map.values.resize(test.size());
  double total = 0;
  std::array<double, 3> region_sum{};
  for (size_t i = 0; i < test.size(); ++i) {
    const float a = test[i], b = reference[i];
    const float e = std::clamp(std::abs(a - b) / (std::max(a, b) + 0.01f), 0.0f, 1.0f);
    map.values[i] = e;
    total += e;
    if (provenance) {
      const auto r = size_t((*provenance)[i]);
      region_sum[r] += e;
      map.region_pixels[r] += 1;
    }
  }
  map.mean = test.empty() ? 0.0 : total / double(test.size());
  if (provenance) {
    std::array<double, 3> means{};
    for (size_t r = 0; r < 3; ++r) means[r] = map.region_pixels[r] ? region_sum[r] / double(map.region_pixels[r]) : 0.0;
    map.region_means = means;
  }
  return map;
}

std::vector<float> ldr_luminance(const LdrImage& image) {
  std::vector<float> out(size_t(image.width) * image.height);
  for (size_t i = 0; i < out.size(); ++i) {
    const Vec3 c{srgb_decode_channel(image.rgb[3 * i] / 255.0f), srgb_decode_channel(image.rgb[3 * i + 1] / 255.0f),
                 srgb_decode_channel(image.rgb[3 * i + 2] / 255.0f)};
    out[i] = luminance(c);
  }
  return out;
}

}  // namespace

ErrorMap error_map(const LdrImage& test, const LdrImage& reference, const std::vector<Region>* provenance) {
  if (test.width != reference.width || test.height != reference.height)
    throw ValidationError("error map inputs differ in size: " + std::to_string(test.width) + "x" +
                          std::to_string(test.height) + " vs " + std::to_string(reference.width) + "x" +
                          std::to_string(reference.height));
  return error_map_from_luminance(test.width, test.height, ldr_luminance(test), ldr_luminance(reference), provenance);
}

ErrorMap error_map(const HdrFrame& test, const HdrFrame& reference, const std::vector<Region>* provenance) {
  if (test.width != reference.width || test.height != reference.height)
    throw ValidationError("error map inputs differ in size");
  return error_map(postprocess(test), postprocess(reference), provenance);
}

LdrImage error_heatmap(const ErrorMap& map) {
  LdrImage out;
  out.width = map.width;
  out.height = map.height;
  out.rgb.assign(map.values.size() * 3, 0);
  for (size_t i = 0; i < map.values.size(); ++i) {
    const auto v = uint8_t(std::lround(std::clamp(map.values[i], 0.0f, 1.0f) * 255.0f));
    out.rgb[3 * i + 0] = v;
    out.rgb[3 * i + 1] = v;
  }
  return out;
}

}  // namespace fovtrace
