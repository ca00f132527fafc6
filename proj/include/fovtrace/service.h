// fovtrace is licensed under the Apache License, Version 2.0.
// SPDX: Apache-2.0

#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <memory>
#include <string>

#include "fovtrace/scene.h"

namespace fovtrace {

struct ServiceOptions {
  std::string host = "127.0.0.1";
  uint16_t port = 8080;  // 0 picks a free port
  int workers = 0;
  std::filesystem::path static_dir;  // plain HTTP GETs are served from here when set
  std::function<void(const std::string&)> log;
};

// Streams frames over a WebSocket to a single client. Gaze, configuration and
// mode messages land in a mailbox; each frame renders from a snapshot of it
// taken at the frame boundary, so the latest gaze wins. A second client gets
// an error message and is closed.
class FrameService {
 public:
  FrameService(const RenderConfig& config, ServiceOptions options);
  ~FrameService();
  FrameService(const FrameService&) = delete;
  FrameService& operator=(const FrameService&) = delete;

  uint16_t port() const;

  // Blocks until stop() is called.
  void run();
  void stop();

  uint64_t frames_sent() const;

  struct Impl;

 private:
  std::unique_ptr<Impl> impl_;
};

}  // namespace fovtrace
