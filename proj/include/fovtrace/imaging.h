// fovtrace is licensed under the Apache License, Version 2.0.
// SPDX: Apache-2.0

#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <vector>

#include "fovtrace/foveation.h"
#include "fovtrace/image_io.h"
#include "fovtrace/reconstruction.h"

namespace fovtrace {

inline constexpr float kExposureKey = 0.18f;
inline constexpr float kExposureEpsilon = 1e-6f;

// Log-average luminance exp(mean(log(Y + eps))).
double log_average_luminance(const HdrFrame& frame);

// Scales the frame so its log-average luminance maps to the 0.18 key.
HdrFrame exposure_compensate(const HdrFrame& frame);

// L_out = L / (1 + L) on luminance; color rescaled by L_out / L.
HdrFrame reinhard_tonemap(const HdrFrame& frame);

float srgb_encode_channel(float linear);
float srgb_decode_channel(float encoded);
uint8_t srgb_to_byte(float linear);  // round half up after the transfer

LdrImage encode_srgb(const HdrFrame& frame);

// exposure -> Reinhard -> sRGB.
LdrImage postprocess(const HdrFrame& frame);

// Region visualization in the spirit of a fixation plot: regions tinted,
// region boundaries traced, fixation marked with a red dot.
LdrImage region_overlay(const LdrImage& image, const std::vector<Region>& provenance, const GazePoint& gaze,
                        const RegionRadii& radii);

std::vector<uint8_t> provenance_bytes(const std::vector<Region>& provenance);
std::vector<Region> provenance_from_bytes(const std::vector<uint8_t>& bytes);

// Per-pixel symmetric relative luminance error on display-referred values:
//   err = |Y_t - Y_r| / (max(Y_t, Y_r) + 0.01), clamped to [0, 1].
// This is a lightweight stand-in for a full perceptual metric; black means no
// difference and yellow means large deviation.
struct ErrorMap {
  int width = 0;
  int height = 0;
  std::vector<float> values;
  double mean = 0;
  std::optional<std::array<double, 3>> region_means;
  std::array<int64_t, 3> region_pixels{};
};

ErrorMap error_map(const LdrImage& test, const LdrImage& reference,
                   const std::vector<Region>* provenance = nullptr);
// HDR inputs go through postprocess() first.
ErrorMap error_map(const HdrFrame& test, const HdrFrame& reference,
                   const std::vector<Region>* provenance = nullptr);

// 0 -> black, 1 -> yellow, linear in between.
LdrImage error_heatmap(const ErrorMap& map);

}  // namespace fovtrace
