// fovtrace is licensed under the Apache License, Version 2.0.
// SPDX: Apache-2.0

#pragma once

#include <cstdint>

namespace fovtrace {

// Counter-based random stream. The state is a hash of the full key, so the
// sequence for one (frame, pixel, sample) is independent of scheduling order.
class RngStream {
 public:
  struct Key {
    uint64_t seed = 0;
    uint32_t frame = 0;
    uint32_t pixel_x = 0;
    uint32_t pixel_y = 0;
    uint32_t sample = 0;
  };

  RngStream() = default;
  explicit RngStream(const Key& key) {
    uint64_t h = mix(key.seed ^ 0x9e3779b97f4a7c15ull);
    h = mix(h ^ key.frame);
    h = mix(h ^ ((uint64_t(key.pixel_y) << 32) | key.pixel_x));
    h = mix(h ^ key.sample);
    state_ = h;
  }

  uint64_t next_u64() {
    // splitmix64
    state_ += 0x9e3779b97f4a7c15ull;
    return mix(state_);
  }

  // Uniform in [0, 1); 24 bits keeps the result strictly below 1 in float.
  float next_float() { return float(next_u64() >> 40) * 0x1.0p-24f; }
  double next_double() { return double(next_u64() >> 11) * 0x1.0p-53; }

 private:
  static uint64_t mix(uint64_t z) {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  }

  uint64_t state_ = 0x853c49e6748fea9bull;
};

}  // namespace fovtrace
