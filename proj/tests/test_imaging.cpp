// fovtrace is licensed under the Apache License, Version 2.0.
// SPDX: Apache-2.0

#include <doctest.h>

#include <random>

#include "fovtrace/error.h"
#include "fovtrace/image_io.h"
#include "fovtrace/imaging.h"
#include "support.h"

using namespace fovtrace;
using namespace fovtrace::test;

namespace {

long double srgb_oracle(long double v) {
  v = std::clamp(v, 0.0L, 1.0L);
  return v <= 0.0031308L ? 12.92L * v : 1.055L * std::pow(v, 1.0L / 2.4L) - 0.055L;
}

HdrFrame random_frame(int w, int h, uint32_t seed, float scale) {
  std::mt19937 rng(seed);
  std::uniform_real_distribution<float> u(0.0f, scale);
  HdrFrame f(w, h);
  for (Vec3& p : f.pixels) p = Vec3{u(rng), u(rng), u(rng)};
  return f;
}

LdrImage solid(int w, int h, uint8_t v) { return {w, h, std::vector<uint8_t>(size_t(w) * h * 3, v)}; }

}  // namespace

TEST_CASE("exposure maps the log-average luminance to the key") {
  HdrFrame grey(8, 8);
  for (Vec3& p : grey.pixels) p = Vec3{2.0f};
  const HdrFrame g = exposure_compensate(grey);
  CHECK(luminance(g.pixels[0]) == doctest::Approx(0.18).epsilon(1e-5));

  const HdrFrame f = exposure_compensate(random_frame(32, 16, 3, 50.0f));
  double log_sum = 0;
  for (const Vec3& p : f.pixels) log_sum += std::log(double(luminance(p)) + 1e-6);
  CHECK(std::exp(log_sum / double(f.pixels.size())) == doctest::Approx(0.18).epsilon(1e-3));

  const HdrFrame black = exposure_compensate(HdrFrame(4, 4));
  for (const Vec3& p : black.pixels) CHECK(p == Vec3{0.0f});
}

TEST_CASE("Reinhard compresses luminance and keeps chromaticity") {
  HdrFrame f(3, 1);
  f.pixels = {Vec3{1.0f}, Vec3{4.0f, 1.0f, 0.5f}, Vec3{0.0f}};
  const HdrFrame t = reinhard_tonemap(f);
  CHECK(t.pixels[0].x == doctest::Approx(0.5f));
  const float l = luminance(f.pixels[1]);
  CHECK(luminance(t.pixels[1]) == doctest::Approx(l / (1 + l)));
  CHECK(t.pixels[1].x / t.pixels[1].y == doctest::Approx(4.0f));
  CHECK(t.pixels[1].z / t.pixels[1].y == doctest::Approx(0.5f));
  CHECK(t.pixels[2] == Vec3{0.0f});
}

TEST_CASE("sRGB transfer") {
  CHECK(srgb_to_byte(0.0f) == 0);
  CHECK(srgb_to_byte(1.0f) == 255);
  CHECK(srgb_to_byte(0.0031308f) == 10);
  CHECK(srgb_to_byte(-1.0f) == 0);
  CHECK(srgb_to_byte(7.0f) == 255);
  std::mt19937 rng(9);
  std::uniform_real_distribution<float> u(0.0f, 1.0f);
  for (int i = 0; i < 100000; ++i) {
    const float v = u(rng);
    REQUIRE(std::abs(srgb_encode_channel(v) - double(srgb_oracle(v))) <= 2e-6);
    REQUIRE(std::abs(srgb_decode_channel(srgb_encode_channel(v)) - v) <= 1.0f / 255.0f);
  }
  for (int b = 0; b < 256; ++b) REQUIRE(srgb_to_byte(srgb_decode_channel(b / 255.0f)) == b);
}

TEST_CASE("postprocess produces bytes and an image of the same size") {
  const HdrFrame f = random_frame(20, 10, 4, 3.0f);
  const LdrImage img = postprocess(f);
  CHECK(img.width == 20);
  CHECK(img.height == 10);
  CHECK(img.rgb.size() == 600);
  CHECK(img == postprocess(f));
}

TEST_CASE("error map: identical images are black") {
  const LdrImage a = postprocess(random_frame(16, 16, 5, 2.0f));
  const ErrorMap e = error_map(a, a);
  CHECK(e.mean == 0.0);
  for (float v : e.values) CHECK(v == 0.0f);
  const LdrImage heat = error_heatmap(e);
  for (uint8_t v : heat.rgb) CHECK(v == 0);
}

TEST_CASE("error map: black against white") {
  LdrImage test = solid(8, 4, 255), ref = solid(8, 4, 255);
  for (int y = 0; y < 4; ++y)
    for (int x = 4; x < 8; ++x)
      for (int c = 0; c < 3; ++c) test.rgb[(size_t(y) * 8 + x) * 3 + c] = 0;
  const ErrorMap e = error_map(test, ref);
  const float expected = 1.0f / 1.01f;
  for (int y = 0; y < 4; ++y)
    for (int x = 0; x < 8; ++x) {
      const float v = e.values[size_t(y) * 8 + x];
      if (x < 4)
        CHECK(v == 0.0f);
      else
        CHECK(v == doctest::Approx(expected).epsilon(1e-5));
    }
  CHECK(e.mean == doctest::Approx(expected / 2).epsilon(1e-5));
  const ErrorMap flipped = error_map(ref, test);
  CHECK(flipped.values == e.values);

  const LdrImage heat = error_heatmap(e);
  const uint8_t* px = &heat.rgb[(size_t(0) * 8 + 6) * 3];
  CHECK(px[0] == uint8_t(std::lround(expected * 255)));
  CHECK(px[1] == px[0]);
  CHECK(px[2] == 0);
}

TEST_CASE("error map: region means and validation") {
  const LdrImage a = solid(4, 1, 200), b = solid(4, 1, 100);
  const std::vector<Region> prov = {Region::Fovea, Region::Intermediate, Region::Periphery, Region::Periphery};
  const ErrorMap e = error_map(a, b, &prov);
  REQUIRE(e.region_means);
  CHECK(e.region_pixels == std::array<int64_t, 3>{1, 1, 2});
  for (double m : *e.region_means) CHECK(m == doctest::Approx(e.mean));
  CHECK_FALSE(error_map(a, b).region_means);
  CHECK_THROWS_AS(error_map(a, solid(3, 1, 0)), ValidationError);
  const std::vector<Region> short_prov(2, Region::Fovea);
  CHECK_THROWS_AS(error_map(a, b, &short_prov), ValidationError);
}

TEST_CASE("provenance bytes round trip") {
  const std::vector<Region> prov = {Region::Periphery, Region::Fovea, Region::Intermediate};
  CHECK(provenance_from_bytes(provenance_bytes(prov)) == prov);
  CHECK_THROWS_AS(provenance_from_bytes({0, 3}), ValidationError);
}

TEST_CASE("region overlay marks the fixation") {
  const LdrImage img = solid(64, 48, 128);
  const std::vector<Region> prov(64 * 48, Region::Periphery);
  const LdrImage o = region_overlay(img, prov, {20, 30}, {5, 12});
  REQUIRE(o.width == 64);
  const uint8_t* center = &o.rgb[(size_t(30) * 64 + 20) * 3];
  CHECK(center[0] == 255);
  CHECK(center[1] == 0);
  CHECK(center[2] == 0);
  CHECK_THROWS_AS(region_overlay(img, std::vector<Region>(3), {0, 0}, {1, 2}), ValidationError);
}

TEST_CASE("image files round trip") {
  TempDir dir;
  std::mt19937 rng(12);
  std::uniform_int_distribution<int> byte(0, 255);
  LdrImage ldr{13, 7, {}};
  for (int i = 0; i < 13 * 7 * 3; ++i) ldr.rgb.push_back(uint8_t(byte(rng)));
  write_png(dir / "a.png", ldr);
  CHECK(read_png(dir / "a.png") == ldr);
  CHECK(read_ldr(dir / "a.png") == ldr);
  write_ldr(dir / "a.ppm", ldr);
  CHECK(read_ppm(dir / "a.ppm") == ldr);

  std::vector<uint8_t> grey(13 * 7);
  for (auto& g : grey) g = uint8_t(byte(rng));
  write_pgm(dir / "a.pgm", 13, 7, grey);
  int w = 0, h = 0;
  CHECK(read_pgm(dir / "a.pgm", w, h) == grey);
  CHECK(w == 13);
  CHECK(h == 7);

  const RgbImage hdr = random_frame(9, 5, 13, 100.0f).to_rgb();
  write_pfm(dir / "a.pfm", hdr);
  const RgbImage pfm = read_pfm(dir / "a.pfm");
  CHECK(pfm.pixels == hdr.pixels);
  write_hdr(dir / "a.hdr", hdr);
  const RgbImage rgbe = read_hdr(dir / "a.hdr");
  REQUIRE(rgbe.pixels.size() == hdr.pixels.size());
  for (size_t i = 0; i < hdr.pixels.size(); ++i) {
    const float peak = max_component(hdr.pixels[i]);
    for (int c = 0; c < 3; ++c) CHECK(std::abs(rgbe.pixels[i][c] - hdr.pixels[i][c]) <= peak / 128.0f);
  }

  write_text(dir / "junk.png", "not an image");
  CHECK_THROWS_AS(read_png(dir / "junk.png"), IoError);
  CHECK_THROWS_AS(read_pfm(dir / "junk.png"), IoError);
  CHECK_THROWS_AS(read_png(dir / "missing.png"), IoError);
}
