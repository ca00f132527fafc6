// fovtrace is licensed under the Apache License, Version 2.0.
// SPDX: Apache-2.0

#include "fovtrace/image_io.h"

#include <png.h>

#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <memory>
#include <sstream>
#include <string>

#include "fovtrace/error.h"

namespace fovtrace {

namespace fs = std::filesystem;

namespace {

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return std::move(ss).str();
}

std::ofstream open_output(const fs::path& path) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  return out;
}

// Reads whitespace-separated header tokens of netpbm-style files, skipping
// '#' comments. Leaves `pos` just past the single whitespace byte that ends
// the last token.
std::string next_token(const std::string& data, size_t& pos) {
  while (pos < data.size()) {
    if (data[pos] == '#') {
      while (pos < data.size() && data[pos] != '\n') ++pos;
    } else if (std::isspace(static_cast<unsigned char>(data[pos]))) {
      ++pos;
    } else {
      break;
    }
  }
  const size_t start = pos;
  while (pos < data.size() && !std::isspace(static_cast<unsigned char>(data[pos]))) ++pos;
  std::string token = data.substr(start, pos - start);
  if (pos < data.size()) ++pos;
  return token;
}

int parse_dim(const std::string& token, const fs::path& path) {
  try {
    const int v = std::stoi(token);
    if (v > 0) return v;
  } catch (const std::exception&) {
  }
  throw IoError(path.string() + ": invalid image dimension '" + token + "'");
}

}  // namespace

RgbImage read_pfm(const fs::path& path) {
  const std::string data = read_file(path);
  size_t pos = 0;
  const std::string magic = next_token(data, pos);
  int channels = 0;
  if (magic == "PF") {
    channels = 3;
  } else if (magic == "Pf") {
    channels = 1;
  } else {
    throw IoError(path.string() + ": not a PFM file");
  }
  RgbImage image;
  image.width = parse_dim(next_token(data, pos), path);
  image.height = parse_dim(next_token(data, pos), path);
  double scale = 0;
  try {
    scale = std::stod(next_token(data, pos));
  } catch (const std::exception&) {
    throw IoError(path.string() + ": invalid PFM scale");
  }
  const bool little = scale < 0;
  const size_t count = size_t(image.width) * image.height * channels;
  if (data.size() - pos < count * 4) throw IoError(path.string() + ": truncated PFM data");

  std::vector<float> values(count);
  std::memcpy(values.data(), data.data() + pos, count * 4);
  if (little != (std::endian::native == std::endian::little)) {
    for (auto& v : values) {
      uint32_t bits;
      std::memcpy(&bits, &v, 4);
      bits = __builtin_bswap32(bits);
      std::memcpy(&v, &bits, 4);
    }
  }
  image.pixels.resize(size_t(image.width) * image.height);
  for (int y = 0; y < image.height; ++y) {
    // PFM stores the bottom row first.
    const size_t src_row = size_t(image.height - 1 - y) * image.width;
    for (int x = 0; x < image.width; ++x) {
      const float* p = &values[(src_row + x) * channels];
      image.at(x, y) = channels == 3 ? Vec3{p[0], p[1], p[2]} : Vec3{p[0]};
    }
  }
  return image;
}

void write_pfm(const fs::path& path, const RgbImage& image) {
  auto out = open_output(path);
  const bool little = std::endian::native == std::endian::little;
  out << "PF\n" << image.width << " " << image.height << "\n" << (little ? "-1.0" : "1.0") << "\n";
  for (int y = image.height - 1; y >= 0; --y) {
    for (int x = 0; x < image.width; ++x) {
      const Vec3& p = image.at(x, y);
      const float v[3] = {p.x, p.y, p.z};
      out.write(reinterpret_cast<const char*>(v), sizeof(v));
    }
  }
  if (!out) throw IoError("failed writing " + path.string());
}

namespace {

Vec3 rgbe_to_float(const uint8_t* rgbe) {
  if (rgbe[3] == 0) return {};
  const float f = std::ldexp(1.0f, int(rgbe[3]) - (128 + 8));
  return {rgbe[0] * f, rgbe[1] * f, rgbe[2] * f};
}

void float_to_rgbe(const Vec3& c, uint8_t* rgbe) {
  const float v = max_component(c);
  if (!(v > 1e-32f)) {
    rgbe[0] = rgbe[1] = rgbe[2] = rgbe[3] = 0;
    return;
  }
  int e = 0;
  const float scale = std::frexp(v, &e) * 256.0f / v;
  rgbe[0] = uint8_t(std::clamp(c.x * scale, 0.0f, 255.0f));
  rgbe[1] = uint8_t(std::clamp(c.y * scale, 0.0f, 255.0f));
  rgbe[2] = uint8_t(std::clamp(c.z * scale, 0.0f, 255.0f));
  rgbe[3] = uint8_t(e + 128);
}

}  // namespace

RgbImage read_hdr(const fs::path& path) {
  const std::string data = read_file(path);
  size_t pos = 0;
  auto next_line = [&]() {
    const size_t end = data.find('\n', pos);
    if (end == std::string::npos) throw IoError(path.string() + ": truncated HDR header");
    std::string line = data.substr(pos, end - pos);
    pos = end + 1;
    return line;
  };
  const std::string magic = next_line();
  if (magic.rfind("#?", 0) != 0) throw IoError(path.string() + ": not a Radiance HDR file");
  for (;;) {
    const std::string line = next_line();
    if (line.empty()) break;
    if (line.rfind("FORMAT=", 0) == 0 && line != "FORMAT=32-bit_rle_rgbe")
      throw IoError(path.string() + ": unsupported HDR format " + line);
  }
  std::istringstream res(next_line());
  std::string ya, xa;
  RgbImage image;
  res >> ya >> image.height >> xa >> image.width;
  if (ya != "-Y" || xa != "+X" || image.width <= 0 || image.height <= 0)
    throw IoError(path.string() + ": unsupported HDR orientation or size");

  image.pixels.resize(size_t(image.width) * image.height);
  const auto* bytes = reinterpret_cast<const uint8_t*>(data.data());
  const size_t size = data.size();
  std::vector<uint8_t> scan(size_t(image.width) * 4);
  for (int y = 0; y < image.height; ++y) {
    const bool rle = image.width >= 8 && image.width < 0x8000 && pos + 4 <= size && bytes[pos] == 2 &&
                     bytes[pos + 1] == 2 && ((bytes[pos + 2] << 8) | bytes[pos + 3]) == image.width &&
                     (bytes[pos + 2] & 0x80) == 0;
    if (rle) {
      pos += 4;
      for (int c = 0; c < 4; ++c) {
        int x = 0;
        while (x < image.width) {
          if (pos >= size) throw IoError(path.string() + ": truncated HDR scanline");
          int count = bytes[pos++];
          if (count > 128) {
            count -= 128;
            if (pos >= size || x + count > image.width) throw IoError(path.string() + ": bad HDR run");
            const uint8_t v = bytes[pos++];
            for (int i = 0; i < count; ++i) scan[size_t(x++) * 4 + c] = v;
          } else {
            if (count == 0 || pos + count > size || x + count > image.width)
              throw IoError(path.string() + ": bad HDR literal run");
            for (int i = 0; i < count; ++i) scan[size_t(x++) * 4 + c] = bytes[pos++];
          }
        }
      }
    } else {
      if (pos + scan.size() > size) throw IoError(path.string() + ": truncated HDR scanline");
      std::memcpy(scan.data(), bytes + pos, scan.size());
      pos += scan.size();
    }
    for (int x = 0; x < image.width; ++x) image.at(x, y) = rgbe_to_float(&scan[size_t(x) * 4]);
  }
  return image;
}

void write_hdr(const fs::path& path, const RgbImage& image) {
  auto out = open_output(path);
  out << "#?RADIANCE\nFORMAT=32-bit_rle_rgbe\n\n-Y " << image.height << " +X " << image.width << "\n";
  std::vector<uint8_t> row(size_t(image.width) * 4);
  for (int y = 0; y < image.height; ++y) {
    for (int x = 0; x < image.width; ++x) float_to_rgbe(image.at(x, y), &row[size_t(x) * 4]);
    out.write(reinterpret_cast<const char*>(row.data()), std::streamsize(row.size()));
  }
  if (!out) throw IoError("failed writing " + path.string());
}

LdrImage read_png(const fs::path& path) {
  const std::string data = read_file(path);
  png_image png;
  std::memset(&png, 0, sizeof(png));
  png.version = PNG_IMAGE_VERSION;
  if (!png_image_begin_read_from_memory(&png, data.data(), data.size()))
    throw IoError(path.string() + ": " + png.message);
  png.format = PNG_FORMAT_RGB;
  LdrImage image;
  image.width = int(png.width);
  image.height = int(png.height);
  image.rgb.resize(PNG_IMAGE_SIZE(png));
  if (!png_image_finish_read(&png, nullptr, image.rgb.data(), 0, nullptr)) {
    png_image_free(&png);
    throw IoError(path.string() + ": " + png.message);
  }
  return image;
}

std::vector<uint8_t> encode_png(const LdrImage& image) {
  png_image png;
  std::memset(&png, 0, sizeof(png));
  png.version = PNG_IMAGE_VERSION;
  png.width = png_uint_32(image.width);
  png.height = png_uint_32(image.height);
  png.format = PNG_FORMAT_RGB;
  png_alloc_size_t size = 0;
  if (!png_image_write_get_memory_size(png, size, 0, image.rgb.data(), 0, nullptr))
    throw IoError(std::string("png encode: ") + png.message);
  std::vector<uint8_t> buffer(size);
  if (!png_image_write_to_memory(&png, buffer.data(), &size, 0, image.rgb.data(), 0, nullptr))
    throw IoError(std::string("png encode: ") + png.message);
  buffer.resize(size);
  return buffer;
}

void write_png(const fs::path& path, const LdrImage& image) {
  const auto bytes = encode_png(image);
  auto out = open_output(path);
  out.write(reinterpret_cast<const char*>(bytes.data()), std::streamsize(bytes.size()));
  if (!out) throw IoError("failed writing " + path.string());
}

LdrImage read_ppm(const fs::path& path) {
  const std::string data = read_file(path);
  size_t pos = 0;
  if (next_token(data, pos) != "P6") throw IoError(path.string() + ": not a binary PPM (P6)");
  LdrImage image;
  image.width = parse_dim(next_token(data, pos), path);
  image.height = parse_dim(next_token(data, pos), path);
  if (next_token(data, pos) != "255") throw IoError(path.string() + ": only 8-bit PPM supported");
  const size_t count = size_t(image.width) * image.height * 3;
  if (data.size() - pos < count) throw IoError(path.string() + ": truncated PPM data");
  image.rgb.assign(data.begin() + std::ptrdiff_t(pos), data.begin() + std::ptrdiff_t(pos + count));
  return image;
}

void write_ppm(const fs::path& path, const LdrImage& image) {
  auto out = open_output(path);
  out << "P6\n" << image.width << " " << image.height << "\n255\n";
  out.write(reinterpret_cast<const char*>(image.rgb.data()), std::streamsize(image.rgb.size()));
  if (!out) throw IoError("failed writing " + path.string());
}

std::vector<uint8_t> read_pgm(const fs::path& path, int& width, int& height) {
  const std::string data = read_file(path);
  size_t pos = 0;
  if (next_token(data, pos) != "P5") throw IoError(path.string() + ": not a binary PGM (P5)");
  width = parse_dim(next_token(data, pos), path);
  height = parse_dim(next_token(data, pos), path);
  if (next_token(data, pos) != "255") throw IoError(path.string() + ": only 8-bit PGM supported");
  const size_t count = size_t(width) * height;
  if (data.size() - pos < count) throw IoError(path.string() + ": truncated PGM data");
  return {data.begin() + std::ptrdiff_t(pos), data.begin() + std::ptrdiff_t(pos + count)};
}

void write_pgm(const fs::path& path, int width, int height, const std::vector<uint8_t>& values) {
  auto out = open_output(path);
  out << "P5\n" << width << " " << height << "\n255\n";
  out.write(reinterpret_cast<const char*>(values.data()), std::streamsize(values.size()));
  if (!out) throw IoError("failed writing " + path.string());
}

namespace {

std::string lower_extension(const fs::path& path) {
  std::string ext = path.extension().string();
  for (auto& c : ext) c = char(std::tolower(static_cast<unsigned char>(c)));
  return ext;
}

}  // namespace

LdrImage read_ldr(const fs::path& path) {
  const std::string ext = lower_extension(path);
  if (ext == ".png") return read_png(path);
  if (ext == ".ppm") return read_ppm(path);
  throw IoError(path.string() + ": unsupported image format (expected .png or .ppm)");
}

void write_ldr(const fs::path& path, const LdrImage& image) {
  const std::string ext = lower_extension(path);
  if (ext == ".png") return write_png(path, image);
  if (ext == ".ppm") return write_ppm(path, image);
  throw IoError(path.string() + ": unsupported image format (expected .png or .ppm)");
}

}  // namespace fovtrace
