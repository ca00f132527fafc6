// fovtrace is licensed under the Apache License, Version 2.0.
// SPDX: Apache-2.0

#include "fovtrace/wire.h"

#include <cstring>
#include <json.hpp>

#include "fovtrace/error.h"

namespace fovtrace::wire {

using json = nlohmann::json;

namespace {

double number_field(const json& j, const char* key) {
  if (!j.contains(key)) throw WireError(std::string("missing field '") + key + "'");
  const json& v = j.at(key);
  if (!v.is_number()) throw WireError(std::string("field '") + key + "' must be a number");
  const double d = v.get<double>();
  if (!std::isfinite(d)) throw WireError(std::string("field '") + key + "' must be finite");
  return d;
}

std::optional<int> optional_int(const json& j, const char* key) {
  if (!j.contains(key)) return std::nullopt;
  const json& v = j.at(key);
  if (!v.is_number_integer()) throw WireError(std::string("field '") + key + "' must be an integer");
  return v.get<int>();
}

std::optional<double> optional_number(const json& j, const char* key) {
  if (!j.contains(key)) return std::nullopt;
  return number_field(j, key);
}

void put_u16(uint8_t* p, uint16_t v) {
  p[0] = uint8_t(v & 0xff);
  p[1] = uint8_t(v >> 8);
}
void put_u32(uint8_t* p, uint32_t v) {
  for (int i = 0; i < 4; ++i) p[i] = uint8_t((v >> (8 * i)) & 0xff);
}
uint16_t get_u16(const uint8_t* p) { return uint16_t(p[0] | (p[1] << 8)); }
uint32_t get_u32(const uint8_t* p) {
  return uint32_t(p[0]) | (uint32_t(p[1]) << 8) | (uint32_t(p[2]) << 16) | (uint32_t(p[3]) << 24);
}

}  // namespace

ClientMessage parse_client_message(std::string_view text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error&) {
    throw WireError("message is not valid JSON");
  }
  if (!j.is_object()) throw WireError("message must be a JSON object");
  if (!j.contains("type") || !j.at("type").is_string()) throw WireError("message needs a string 'type'");
  const std::string type = j.at("type").get<std::string>();

  if (type == "gaze_update") return GazeUpdate{number_field(j, "x"), number_field(j, "y")};
  if (type == "config_update") {
    ConfigUpdate u;
    u.tau1 = optional_int(j, "tau1");
    u.tau2 = optional_int(j, "tau2");
    u.tau3 = optional_int(j, "tau3");
    u.n = optional_int(j, "n");
    u.m = optional_int(j, "m");
    u.ef_deg = optional_number(j, "ef_deg");
    u.ei_deg = optional_number(j, "ei_deg");
    if (j.contains("encoding")) {
      const json& e = j.at("encoding");
      if (e == "raw") {
        u.encoding = FrameEncoding::RawRgba8;
      } else if (e == "png") {
        u.encoding = FrameEncoding::Png;
      } else {
        throw WireError("field 'encoding' must be \"raw\" or \"png\"");
      }
    }
    return u;
  }
  if (type == "mode") {
    if (!j.contains("mode") || !j.at("mode").is_string()) throw WireError("mode message needs a string 'mode'");
    try {
      return ModeUpdate{parse_render_mode(j.at("mode").get<std::string>())};
    } catch (const ValidationError& e) {
      throw WireError(e.what());
    }
  }
  throw WireError("unknown message type '" + type + "'");
}

FoveationConfig apply_update(const FoveationConfig& config, const ConfigUpdate& update) {
  FoveationConfig next = config;
  if (update.tau1) next.tau1 = *update.tau1;
  if (update.tau2) next.tau2 = *update.tau2;
  if (update.tau3) next.tau3 = *update.tau3;
  if (update.n) next.n = *update.n;
  if (update.m) next.m = *update.m;
  if (update.ef_deg) next.ef_deg = *update.ef_deg;
  if (update.ei_deg) next.ei_deg = *update.ei_deg;
  next.validate();
  return next;
}

std::vector<uint8_t> encode_frame(const LdrImage& image, uint32_t frame_index, FrameEncoding encoding) {
  if (image.width > 0xffff || image.height > 0xffff) throw WireError("frame too large for the wire header");
  std::vector<uint8_t> payload;
  if (encoding == FrameEncoding::Png) {
    payload = encode_png(image);
  } else {
    payload.resize(size_t(image.width) * image.height * 4);
    for (size_t i = 0; i < size_t(image.width) * image.height; ++i) {
      std::memcpy(&payload[4 * i], &image.rgb[3 * i], 3);
      payload[4 * i + 3] = 255;
    }
  }
  std::vector<uint8_t> out(kFrameHeaderSize + payload.size());
  std::memcpy(out.data(), kFrameMagic.data(), 4);
  put_u16(&out[4], uint16_t(image.width));
  put_u16(&out[6], uint16_t(image.height));
  put_u32(&out[8], frame_index);
  put_u16(&out[12], uint16_t(encoding));
  put_u16(&out[14], 0);
  std::memcpy(out.data() + kFrameHeaderSize, payload.data(), payload.size());
  return out;
}

FrameHeader decode_frame_header(std::span<const uint8_t> message) {
  if (message.size() < kFrameHeaderSize) throw WireError("frame shorter than its header");
  if (std::memcmp(message.data(), kFrameMagic.data(), 4) != 0) throw WireError("bad frame magic");
  FrameHeader h;
  h.width = get_u16(&message[4]);
  h.height = get_u16(&message[6]);
  h.frame_index = get_u32(&message[8]);
  const uint16_t enc = get_u16(&message[12]);
  if (enc > 1) throw WireError("unknown frame encoding");
  h.encoding = FrameEncoding(enc);
  if (h.encoding == FrameEncoding::RawRgba8 && message.size() != kFrameHeaderSize + size_t(h.width) * h.height * 4)
    throw WireError("raw frame payload size mismatch");
  return h;
}

std::string stats_json(const StatsMessage& s) {
  nlohmann::ordered_json j;
  j["type"] = "stats";
  j["frame_index"] = s.frame_index;
  j["x"] = s.gaze.x;
  j["y"] = s.gaze.y;
  j["mode"] = render_mode_name(s.mode);
  j["tau1"] = s.config.tau1;
  j["tau2"] = s.config.tau2;
  j["tau3"] = s.config.tau3;
  j["n"] = s.config.n;
  j["m"] = s.config.m;
  j["ef_deg"] = s.config.ef_deg;
  j["ei_deg"] = s.config.ei_deg;
  j["r_f_px"] = s.radii.fovea_px;
  j["r_i_px"] = s.radii.intermediate_px;
  j["samples"] = {{"fovea", s.region_samples[0]},
                  {"intermediate", s.region_samples[1]},
                  {"periphery", s.region_samples[2]},
                  {"total", s.total_samples},
                  {"uniform", s.uniform_samples}};
  j["tasks"] = {{"fovea", s.region_tasks[0]}, {"intermediate", s.region_tasks[1]}, {"periphery", s.region_tasks[2]}};
  j["ratio"] = s.ratio;
  j["fps"] = s.fps;
  j["frame_ms"] = s.frame_ms;
  j["clamped"] = s.clamped;
  j["accumulated"] = s.accumulated;
  j["accumulation_count"] = s.accumulation_count;
  return j.dump();
}

std::string error_json(const std::string& text) { return json{{"type", "error"}, {"text", text}}.dump(); }

}  // namespace fovtrace::wire
