// fovtrace is licensed under the Apache License, Version 2.0.
// SPDX: Apache-2.0

#include <doctest.h>
#include <json.hpp>

#include <sstream>

#include "fovtrace/cli.h"
#include "fovtrace/image_io.h"
#include "support.h"

using namespace fovtrace;
using namespace fovtrace::test;

namespace {

struct Run {
  int code = 0;
  std::string out, err;
};

Run cli(std::vector<std::string> args) {
  args.insert(args.begin(), "fovtrace");
  std::ostringstream out, err;
  Run r;
  r.code = run_cli(args, out, err);
  r.out = out.str();
  r.err = err.str();
  return r;
}

std::vector<std::string> small_render(const std::string& out_png, const std::string& mode) {
  return {"render", "--config", desk_config().string(), "--width", "96", "--height", "54", "--spp", "2",
          "--depth", "2", "--mode", mode, "--out", out_png};
}

}  // namespace

TEST_CASE("render both writes uniform, foveated, overlay and sidecar") {
  TempDir dir;
  const Run r = cli(small_render((dir / "frame.png").string(), "both"));
  INFO(r.err);
  REQUIRE(r.code == kExitOk);
  for (const char* name : {"frame_uniform.png", "frame_foveated.png", "frame_overlay.png", "frame_foveated.png.regions.pgm"})
    CHECK(std::filesystem::exists(dir / name));
  CHECK_FALSE(std::filesystem::exists(dir / "frame_uniform.png.regions.pgm"));
  const LdrImage img = read_png(dir / "frame_foveated.png");
  CHECK(img.width == 96);
  CHECK(img.height == 54);
  int w = 0, h = 0;
  const auto regions = read_pgm(dir / "frame_foveated.png.regions.pgm", w, h);
  CHECK(w == 96);
  CHECK(h == 54);
  for (uint8_t v : regions) CHECK(v <= 2);
}

TEST_CASE("render --hdr writes a PFM next to the PNG") {
  TempDir dir;
  auto args = small_render((dir / "u.png").string(), "uniform");
  args.push_back("--hdr");
  REQUIRE(cli(args).code == kExitOk);
  const RgbImage pfm = read_pfm(dir / "u.pfm");
  CHECK(pfm.width == 96);
}

TEST_CASE("gaze outside the image is clamped with a warning") {
  TempDir dir;
  const Run r = cli({"render", "--config", desk_config().string(), "--width", "64", "--height", "64", "--spp", "1",
                     "--depth", "1", "--gaze", "100,100", "--out", (dir / "g.png").string()});
  CHECK(r.code == kExitOk);
  CHECK(r.err.find("warning: gaze") != std::string::npos);
  CHECK(r.err.find("(63,63)") != std::string::npos);
}

TEST_CASE("seeded renders are bit-identical across thread counts") {
  TempDir dir;
  for (const std::string mode : {"uniform", "foveated"}) {
    auto a = small_render((dir / ("a_" + mode + ".png")).string(), mode);
    auto b = small_render((dir / ("b_" + mode + ".png")).string(), mode);
    a.insert(a.end(), {"--seed", "7", "--threads", "1"});
    b.insert(b.end(), {"--seed", "7", "--threads", "3"});
    REQUIRE(cli(a).code == kExitOk);
    REQUIRE(cli(b).code == kExitOk);
    CHECK(read_text(dir / ("a_" + mode + ".png")) == read_text(dir / ("b_" + mode + ".png")));
  }
  auto c = small_render((dir / "c.png").string(), "foveated");
  c.insert(c.end(), {"--seed", "8"});
  REQUIRE(cli(c).code == kExitOk);
  CHECK(read_text(dir / "c.png") != read_text(dir / "a_foveated.png"));
}

TEST_CASE("bench writes a JSON report with the timing fields") {
  TempDir dir;
  const Run r = cli({"bench", "--config", desk_config().string(), "--width", "64", "--height", "36", "--spp", "2",
                     "--depth", "1", "--frames", "1", "--warmup", "0", "--sweep", "uniform,32/2/1", "--out",
                     (dir / "b.json").string()});
  INFO(r.err);
  REQUIRE(r.code == kExitOk);
  const auto j = nlohmann::json::parse(read_text(dir / "b.json"));
  REQUIRE(j["reports"].size() == 2);
  for (const auto& rep : j["reports"])
    for (const char* key : {"triangles", "avg_fps_uniform", "avg_fps_foveated", "speedup"}) CHECK(rep.contains(key));
  CHECK(std::filesystem::exists(dir / "b.txt"));

  const Run empty = cli({"bench", "--config", desk_config().string(), "--sweep", "", "--out", (dir / "e.json").string()});
  CHECK(empty.code == kExitUsage);
}

TEST_CASE("errmap: identical images, region means and dimension mismatch") {
  TempDir dir;
  REQUIRE(cli(small_render((dir / "f.png").string(), "foveated")).code == kExitOk);

  const Run same = cli({"errmap", (dir / "f.png").string(), (dir / "f.png").string(), "--out",
                        (dir / "e.png").string(), "--stats", (dir / "e.json").string()});
  REQUIRE(same.code == kExitOk);
  const auto j = nlohmann::json::parse(read_text(dir / "e.json"));
  CHECK(j["mean"] == 0.0);
  // The sidecar next to the test image is picked up automatically.
  REQUIRE(j.contains("region_means"));
  CHECK(j["region_means"].size() == 3);
  const LdrImage heat = read_png(dir / "e.png");
  for (uint8_t v : heat.rgb) CHECK(v == 0);

  write_png(dir / "small.png", LdrImage{8, 8, std::vector<uint8_t>(192, 0)});
  const Run mismatch = cli({"errmap", (dir / "f.png").string(), (dir / "small.png").string(), "--out",
                            (dir / "x.png").string()});
  CHECK(mismatch.code == kExitIo);
  CHECK(mismatch.err.find("differ") != std::string::npos);
}

TEST_CASE("exit codes for usage and input errors") {
  CHECK(cli({}).code == kExitUsage);
  CHECK(cli({"render", "--config", desk_config().string(), "--bogus"}).code == kExitUsage);
  CHECK(cli({"render"}).code == kExitUsage);
  CHECK(cli({"render", "--config", desk_config().string(), "--mode", "sideways", "--width", "8", "--height", "8"}).code ==
        kExitUsage);
  CHECK(cli({"render", "--config", "/nonexistent/config.json"}).code == kExitIo);
  CHECK(cli({"errmap", "/nonexistent/a.png", "/nonexistent/b.png"}).code == kExitIo);

  TempDir dir;
  write_text(dir / "bad.json", "{ not json");
  CHECK(cli({"render", "--config", (dir / "bad.json").string()}).code == kExitIo);
  write_text(dir / "blocker", "");
  const Run blocked = cli({"render", "--config", desk_config().string(), "--width", "8", "--height", "8", "--spp", "1",
                           "--out", (dir / "blocker" / "x.png").string()});
  CHECK(blocked.code == kExitIo);
  CHECK(cli({"serve", "--config", desk_config().string(), "--bind", "nonsense"}).code == kExitUsage);
}
