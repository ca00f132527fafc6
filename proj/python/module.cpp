// fovtrace is licensed under the Apache License, Version 2.0.
// SPDX: Apache-2.0

#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <sstream>

#include "fovtrace/cli.h"
#include "fovtrace/error.h"
#include "fovtrace/foveation.h"
#include "fovtrace/imaging.h"
#include "fovtrace/renderer.h"
#include "fovtrace/scene.h"

namespace py = pybind11;
using namespace fovtrace;

namespace {

py::array_t<float> hdr_to_array(const HdrFrame& frame) {
  py::array_t<float> out({frame.height, frame.width, 3});
  auto view = out.mutable_unchecked<3>();
  for (int y = 0; y < frame.height; ++y)
    for (int x = 0; x < frame.width; ++x)
      for (int c = 0; c < 3; ++c) view(y, x, c) = frame.at(x, y)[c];
  return out;
}

HdrFrame array_to_hdr(const py::array_t<float, py::array::c_style | py::array::forcecast>& a) {
  if (a.ndim() != 3 || a.shape(2) != 3) throw py::value_error("expected an (H, W, 3) array");
  HdrFrame frame(int(a.shape(1)), int(a.shape(0)));
  auto view = a.unchecked<3>();
  for (int y = 0; y < frame.height; ++y)
    for (int x = 0; x < frame.width; ++x) frame.at(x, y) = Vec3(view(y, x, 0), view(y, x, 1), view(y, x, 2));
  return frame;
}

py::array_t<uint8_t> ldr_to_array(const LdrImage& image) {
  py::array_t<uint8_t> out({image.height, image.width, 3});
  std::memcpy(out.mutable_data(), image.rgb.data(), image.rgb.size());
  return out;
}

LdrImage array_to_ldr(const py::array_t<uint8_t, py::array::c_style | py::array::forcecast>& a) {
  if (a.ndim() != 3 || a.shape(2) != 3) throw py::value_error("expected an (H, W, 3) uint8 array");
  LdrImage image{int(a.shape(1)), int(a.shape(0)), {}};
  image.rgb.assign(a.data(), a.data() + a.size());
  return image;
}

py::dict counts_dict(const std::array<RegionCounts, 3>& counts) {
  py::dict d;
  for (Region r : kRegions) {
    py::dict c;
    c["tasks"] = counts[size_t(r)].tasks;
    c["samples"] = counts[size_t(r)].samples;
    c["pixels"] = counts[size_t(r)].pixels;
    d[region_name(r)] = c;
  }
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Gaze-contingent foveated path tracer";

  py::register_exception<ValidationError>(m, "ValidationError", PyExc_ValueError);
  py::register_exception<UsageError>(m, "UsageError", PyExc_ValueError);
  py::register_exception<IoError>(m, "IoError", PyExc_OSError);

  py::enum_<Region>(m, "Region")
      .value("FOVEA", Region::Fovea)
      .value("INTERMEDIATE", Region::Intermediate)
      .value("PERIPHERY", Region::Periphery);

  py::enum_<RenderMode>(m, "RenderMode").value("UNIFORM", RenderMode::Uniform).value("FOVEATED", RenderMode::Foveated);

  py::class_<DisplayGeometry>(m, "DisplayGeometry")
      .def(py::init<>())
      .def(py::init([](double width_cm, double height_cm, double distance_cm, int resolution_px) {
             DisplayGeometry d{width_cm, height_cm, distance_cm, resolution_px};
             d.validate();
             return d;
           }),
           py::arg("width_cm"), py::arg("height_cm"), py::arg("distance_cm"), py::arg("resolution_px"))
      .def_readwrite("width_cm", &DisplayGeometry::width_cm)
      .def_readwrite("height_cm", &DisplayGeometry::height_cm)
      .def_readwrite("distance_cm", &DisplayGeometry::distance_cm)
      .def_readwrite("resolution_px", &DisplayGeometry::resolution_px);

  py::class_<FoveationConfig>(m, "FoveationConfig")
      .def(py::init([](int tau1, int tau2, int tau3, int n, int mb, double ef, double ei,
                       std::optional<std::pair<double, double>> gaze) {
             FoveationConfig c;
             c.tau1 = tau1;
             c.tau2 = tau2;
             c.tau3 = tau3;
             c.n = n;
             c.m = mb;
             c.ef_deg = ef;
             c.ei_deg = ei;
             if (gaze) c.gaze = {gaze->first, gaze->second};
             c.validate();
             return c;
           }),
           py::arg("tau1") = 32, py::arg("tau2") = 16, py::arg("tau3") = 8, py::arg("n") = 2, py::arg("m") = 4,
           py::arg("ef_deg") = 5.2, py::arg("ei_deg") = 17.0, py::arg("gaze") = py::none())
      .def_readwrite("tau1", &FoveationConfig::tau1)
      .def_readwrite("tau2", &FoveationConfig::tau2)
      .def_readwrite("tau3", &FoveationConfig::tau3)
      .def_readwrite("n", &FoveationConfig::n)
      .def_readwrite("m", &FoveationConfig::m)
      .def_readwrite("ef_deg", &FoveationConfig::ef_deg)
      .def_readwrite("ei_deg", &FoveationConfig::ei_deg)
      .def_property(
          "gaze", [](const FoveationConfig& c) { return std::make_pair(c.gaze.x, c.gaze.y); },
          [](FoveationConfig& c, std::pair<double, double> g) { c.gaze = {g.first, g.second}; })
      .def("validate", &FoveationConfig::validate);

  m.def("eccentricity_to_radius", &eccentricity_to_radius, py::arg("eccentricity_deg"),
        py::arg("display") = DisplayGeometry{});
  m.def(
      "region_radii",
      [](const FoveationConfig& c, const DisplayGeometry& d) {
        const RegionRadii r = region_radii(c, d);
        return std::make_pair(r.fovea_px, r.intermediate_px);
      },
      py::arg("config"), py::arg("display") = DisplayGeometry{});
  m.def("classify_pixel", &classify_pixel, py::arg("x"), py::arg("y"), py::arg("config"),
        py::arg("display") = DisplayGeometry{});

  m.def(
      "build_task_list",
      [](int width, int height, const FoveationConfig& c, const DisplayGeometry& d) {
        const RayTaskList list = build_task_list(width, height, c, d);
        py::array_t<int32_t> out({py::ssize_t(list.tasks.size()), py::ssize_t(6)});
        auto v = out.mutable_unchecked<2>();
        for (size_t i = 0; i < list.tasks.size(); ++i) {
          const RayTask& t = list.tasks[i];
          v(i, 0) = t.x0;
          v(i, 1) = t.y0;
          v(i, 2) = t.width;
          v(i, 3) = t.height;
          v(i, 4) = t.samples;
          v(i, 5) = int32_t(t.region);
        }
        return out;
      },
      py::arg("width"), py::arg("height"), py::arg("config"), py::arg("display") = DisplayGeometry{},
      "Task list as an (N, 6) int array: x0, y0, width, height, samples, region.");

  m.def(
      "compute_budget",
      [](int width, int height, const FoveationConfig& c, const DisplayGeometry& d, int spp) {
        const BudgetReport b = compute_budget(width, height, c, d, spp);
        py::dict out;
        out["width"] = b.width;
        out["height"] = b.height;
        out["r_f_px"] = b.radii.fovea_px;
        out["r_i_px"] = b.radii.intermediate_px;
        out["regions"] = counts_dict(b.regions);
        out["total_tasks"] = b.total_tasks;
        out["total_samples"] = b.total_samples;
        out["uniform_samples"] = b.uniform_samples;
        out["ratio"] = b.ratio;
        out["omitted_fraction"] = b.omitted_fraction;
        return out;
      },
      py::arg("width"), py::arg("height"), py::arg("config") = FoveationConfig{},
      py::arg("display") = DisplayGeometry{}, py::arg("uniform_spp") = 32);

  py::class_<RenderConfig>(m, "RenderConfig")
      .def_property_readonly("width", [](const RenderConfig& c) { return c.scene.camera.width; })
      .def_property_readonly("height", [](const RenderConfig& c) { return c.scene.camera.height; })
      .def_property_readonly("triangles", [](const RenderConfig& c) { return c.scene.triangle_count(); })
      .def_readwrite("foveation", &RenderConfig::foveation)
      .def_readwrite("display", &RenderConfig::display)
      .def_property(
          "spp_uniform", [](const RenderConfig& c) { return c.render.spp_uniform; },
          [](RenderConfig& c, int v) { c.render.spp_uniform = v; })
      .def_property(
          "max_depth", [](const RenderConfig& c) { return c.render.max_depth; },
          [](RenderConfig& c, int v) { c.render.max_depth = v; })
      .def_property(
          "seed", [](const RenderConfig& c) { return c.render.seed; },
          [](RenderConfig& c, uint64_t v) { c.render.seed = v; })
      .def(
          "resize",
          [](RenderConfig& c, int width, int height) {
            if (width < 1 || height < 1) throw ValidationError("image size must be positive");
            c.scene.camera.width = width;
            c.scene.camera.height = height;
            c.display.resolution_px = width;
            c.foveation.gaze = {width / 2.0, height / 2.0};
          },
          py::arg("width"), py::arg("height"), "Changes the image size; the gaze moves to the new center.")
      .def_readonly("warnings", &RenderConfig::warnings);
  m.def("load_render_config", &load_render_config, py::arg("path"));

  m.def(
      "render",
      [](const RenderConfig& cfg, const std::string& mode, uint32_t frame_index, int workers) {
        FrameRequest r;
        r.mode = parse_render_mode(mode);
        r.foveation = cfg.foveation;
        r.display = cfg.display;
        r.spp_uniform = cfg.render.spp_uniform;
        r.max_depth = cfg.render.max_depth;
        r.seed = cfg.render.seed;
        r.frame_index = frame_index;
        r.workers = workers;
        FrameResult result;
        {
          py::gil_scoped_release release;
          const Renderer renderer(cfg.scene);
          result = renderer.render(r);
        }
        py::array_t<uint8_t> regions({result.hdr.height, result.hdr.width});
        const auto tags = provenance_bytes(result.hdr.provenance);
        std::memcpy(regions.mutable_data(), tags.data(), tags.size());
        return py::make_tuple(hdr_to_array(result.hdr), regions, result.tasks.total_samples());
      },
      py::arg("config"), py::arg("mode") = "foveated", py::arg("frame_index") = 0, py::arg("workers") = 0,
      "Returns (linear radiance HxWx3 float32, region tags HxW uint8, total samples).");

  m.def(
      "postprocess", [](const py::array_t<float>& hdr) { return ldr_to_array(postprocess(array_to_hdr(hdr))); },
      py::arg("hdr"), "Exposure, Reinhard tone mapping and sRGB encoding to uint8.");
  m.def("srgb_to_byte", &srgb_to_byte, py::arg("linear"));

  m.def(
      "error_map",
      [](const py::array_t<uint8_t>& test, const py::array_t<uint8_t>& reference, std::optional<py::array_t<uint8_t>> regions) {
        std::optional<std::vector<Region>> provenance;
        if (regions) {
          auto flat = regions->cast<py::array_t<uint8_t, py::array::c_style | py::array::forcecast>>();
          provenance = provenance_from_bytes(std::vector<uint8_t>(flat.data(), flat.data() + flat.size()));
        }
        const ErrorMap map = error_map(array_to_ldr(test), array_to_ldr(reference), provenance ? &*provenance : nullptr);
        py::array_t<float> values({map.height, map.width});
        std::memcpy(values.mutable_data(), map.values.data(), map.values.size() * sizeof(float));
        py::dict stats;
        stats["mean"] = map.mean;
        if (map.region_means) {
          stats["fovea"] = (*map.region_means)[0];
          stats["intermediate"] = (*map.region_means)[1];
          stats["periphery"] = (*map.region_means)[2];
        }
        return py::make_tuple(values, stats);
      },
      py::arg("test"), py::arg("reference"), py::arg("regions") = py::none());

  m.def(
      "run_cli",
      [](std::vector<std::string> args) {
        args.insert(args.begin(), "fovtrace");
        std::ostringstream out, err;
        int code;
        {
          py::gil_scoped_release release;
          code = run_cli(args, out, err);
        }
        return py::make_tuple(code, out.str(), err.str());
      },
      py::arg("args"), "Runs the command-line tool in-process; returns (exit code, stdout, stderr).");
}
