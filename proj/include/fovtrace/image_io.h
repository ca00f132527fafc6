// fovtrace is licensed under the Apache License, Version 2.0.
// SPDX: Apache-2.0

#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

#include "fovtrace/math.h"

namespace fovtrace {

// Linear float RGB raster, row-major, top row first.
struct RgbImage {
  int width = 0;
  int height = 0;
  std::vector<Vec3> pixels;

  Vec3& at(int x, int y) { return pixels[size_t(y) * width + x]; }
  const Vec3& at(int x, int y) const { return pixels[size_t(y) * width + x]; }
};

// 8-bit RGB raster, row-major, top row first.
struct LdrImage {
  int width = 0;
  int height = 0;
  std::vector<uint8_t> rgb;  // width * height * 3

  bool operator==(const LdrImage&) const = default;
};

RgbImage read_pfm(const std::filesystem::path& path);
void write_pfm(const std::filesystem::path& path, const RgbImage& image);

// Radiance RGBE; reads flat and new-style RLE scanlines, writes flat.
RgbImage read_hdr(const std::filesystem::path& path);
void write_hdr(const std::filesystem::path& path, const RgbImage& image);

LdrImage read_png(const std::filesystem::path& path);
void write_png(const std::filesystem::path& path, const LdrImage& image);
std::vector<uint8_t> encode_png(const LdrImage& image);

LdrImage read_ppm(const std::filesystem::path& path);
void write_ppm(const std::filesystem::path& path, const LdrImage& image);

// 8-bit single channel (binary PGM, P5).
std::vector<uint8_t> read_pgm(const std::filesystem::path& path, int& width, int& height);
void write_pgm(const std::filesystem::path& path, int width, int height, const std::vector<uint8_t>& values);

// Dispatches on extension (.png / .ppm).
LdrImage read_ldr(const std::filesystem::path& path);
void write_ldr(const std::filesystem::path& path, const LdrImage& image);

}  // namespace fovtrace
