// fovtrace is licensed under the Apache License, Version 2.0.
// SPDX: Apache-2.0

#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "fovtrace/foveation.h"
#include "fovtrace/image_io.h"
#include "fovtrace/scene.h"

namespace fovtrace::wire {

// Text frames carry JSON objects with a "type" field; binary frames carry a
// 16-byte little-endian header followed by the payload:
//   0  char[4] magic "FOVF"
//   4  u16     width
//   6  u16     height
//   8  u32     frame index
//   12 u16     encoding (0 = raw RGBA8 rows, 1 = PNG)
//   14 u16     reserved (0)
inline constexpr std::array<char, 4> kFrameMagic = {'F', 'O', 'V', 'F'};
inline constexpr size_t kFrameHeaderSize = 16;

enum class FrameEncoding : uint16_t { RawRgba8 = 0, Png = 1 };

struct WireError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct GazeUpdate {
  double x = 0;
  double y = 0;
};

struct ConfigUpdate {
  std::optional<int> tau1, tau2, tau3, n, m;
  std::optional<double> ef_deg, ei_deg;
  std::optional<FrameEncoding> encoding;
};

struct ModeUpdate {
  RenderMode mode = RenderMode::Foveated;
};

using ClientMessage = std::variant<GazeUpdate, ConfigUpdate, ModeUpdate>;

// Throws WireError describing what is wrong; unknown fields are ignored.
ClientMessage parse_client_message(std::string_view text);

// Applies a partial update and validates the result (ValidationError).
FoveationConfig apply_update(const FoveationConfig& config, const ConfigUpdate& update);

struct FrameHeader {
  int width = 0;
  int height = 0;
  uint32_t frame_index = 0;
  FrameEncoding encoding = FrameEncoding::RawRgba8;
};

std::vector<uint8_t> encode_frame(const LdrImage& image, uint32_t frame_index, FrameEncoding encoding);
FrameHeader decode_frame_header(std::span<const uint8_t> message);

struct StatsMessage {
  uint32_t frame_index = 0;
  GazePoint gaze;
  RenderMode mode = RenderMode::Foveated;
  FoveationConfig config;
  RegionRadii radii;
  std::array<int64_t, 3> region_samples{};
  std::array<int64_t, 3> region_tasks{};
  int64_t total_samples = 0;
  int64_t uniform_samples = 0;
  double ratio = 0;
  double fps = 0;
  double frame_ms = 0;
  uint64_t clamped = 0;
  bool accumulated = false;
  int accumulation_count = 0;
};

std::string stats_json(const StatsMessage& stats);
std::string error_json(const std::string& text);

}  // namespace fovtrace::wire
