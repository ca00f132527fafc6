// fovtrace is licensed under the Apache License, Version 2.0.
// SPDX: Apache-2.0

#include "fovtrace/service.h"

#include <algorithm>
#include <atomic>
#include <boost/asio.hpp>
#include <boost/beast/core.hpp>
#include <boost/beast/http.hpp>
#include <boost/beast/websocket.hpp>
#include <chrono>
#include <condition_variable>
#include <deque>
#include <fstream>
#include <mutex>
#include <sstream>
#include <thread>

#include "fovtrace/error.h"
#include "fovtrace/imaging.h"
#include "fovtrace/renderer.h"
#include "fovtrace/wire.h"

namespace fovtrace {

namespace net = boost::asio;
namespace beast = boost::beast;
namespace http = beast::http;
namespace websocket = beast::websocket;
using tcp = net::ip::tcp;

namespace {

// Frames queued for a client beyond this make the render loop wait.
constexpr int kMaxQueuedFrames = 2;

const char* content_type(const std::filesystem::path& path) {
  const std::string ext = path.extension().string();
  if (ext == ".html") return "text/html";
  if (ext == ".js" || ext == ".mjs") return "text/javascript";
  if (ext == ".css") return "text/css";
  if (ext == ".json") return "application/json";
  if (ext == ".png") return "image/png";
  if (ext == ".svg") return "image/svg+xml";
  return "application/octet-stream";
}

class Session;

}  // namespace

struct FrameService::Impl {
  RenderConfig config;
  ServiceOptions options;
  Renderer renderer;
  net::io_context ioc;
  tcp::acceptor acceptor;
  std::thread render_thread;
  std::atomic<bool> stopping{false};
  std::atomic<uint64_t> frames_sent{0};

  // Mailbox; guarded by `mutex`.
  std::mutex mutex;
  std::condition_variable wake;
  std::shared_ptr<Session> active;
  FoveationConfig foveation;
  RenderMode mode = RenderMode::Foveated;
  wire::FrameEncoding encoding = wire::FrameEncoding::RawRgba8;
  bool changed = true;

  Impl(const RenderConfig& c, ServiceOptions o)
      : config(c), options(std::move(o)), renderer(config.scene), acceptor(ioc) {
    const auto address = net::ip::make_address(options.host);
    tcp::endpoint endpoint(address, options.port);
    acceptor.open(endpoint.protocol());
    acceptor.set_option(net::socket_base::reuse_address(true));
    acceptor.bind(endpoint);
    acceptor.listen();
    reset_state();
  }

  void log(const std::string& text) const {
    if (options.log) options.log(text);
  }

  void reset_state() {
    foveation = config.foveation;
    mode = config.render.mode;
    encoding = wire::FrameEncoding::RawRgba8;
    changed = true;
  }

  GazePoint clamp_gaze(double x, double y) const {
    return {std::clamp(x, 0.0, double(renderer.width() - 1)), std::clamp(y, 0.0, double(renderer.height() - 1))};
  }

  void do_accept();
  void handle_text(const std::shared_ptr<Session>& session, const std::string& text);
  void attach(const std::shared_ptr<Session>& session);
  void detach(const Session* session);
  void render_loop();
};

namespace {

class Session : public std::enable_shared_from_this<Session> {
 public:
  Session(FrameService::Impl& owner, tcp::socket socket) : owner_(owner), ws_(std::move(socket)) {}

  void start(http::request<http::string_body> request) {
    ws_.set_option(websocket::stream_base::timeout::suggested(beast::role_type::server));
    ws_.async_accept(request, [self = shared_from_this()](beast::error_code ec) {
      if (!ec) self->owner_.attach(self);
    });
  }

  void read() {
    ws_.async_read(buffer_, [self = shared_from_this()](beast::error_code ec, size_t) {
      if (ec) {
        self->closed_ = true;
        self->owner_.detach(self.get());
        return;
      }
      if (self->ws_.got_text()) {
        self->owner_.handle_text(self, beast::buffers_to_string(self->buffer_.data()));
      } else {
        self->send_text(wire::error_json("binary messages are not accepted from clients"));
      }
      self->buffer_.consume(self->buffer_.size());
      self->read();
    });
  }

  // Thread-safe; the message is queued on the socket's executor.
  void send_text(std::string text) { enqueue(Outgoing{false, std::move(text), {}, false}); }
  void send_binary(std::vector<uint8_t> bytes) { enqueue(Outgoing{true, {}, std::move(bytes), false}); }
  void send_and_close(std::string text) { enqueue(Outgoing{false, std::move(text), {}, true}); }

  void close() {
    net::post(ws_.get_executor(), [self = shared_from_this()] {
      if (self->closed_) return;
      self->closed_ = true;
      beast::error_code ec;
      self->ws_.next_layer().shutdown(tcp::socket::shutdown_both, ec);
      self->ws_.next_layer().close(ec);
    });
  }

  int queued_frames() const { return queued_frames_.load(); }

 private:
  struct Outgoing {
    bool binary;
    std::string text;
    std::vector<uint8_t> bytes;
    bool close_after;
  };

  void enqueue(Outgoing message) {
    if (message.binary) ++queued_frames_;
    net::post(ws_.get_executor(), [self = shared_from_this(), m = std::move(message)]() mutable {
      if (self->closed_) {
        if (m.binary) --self->queued_frames_;
        return;
      }
      self->queue_.push_back(std::move(m));
      if (self->queue_.size() == 1) self->write_next();
    });
  }

  void write_next() {
    Outgoing& m = queue_.front();
    ws_.binary(m.binary);
    auto done = [self = shared_from_this()](beast::error_code ec, size_t) {
      Outgoing finished = std::move(self->queue_.front());
      self->queue_.pop_front();
      if (finished.binary) --self->queued_frames_;
      if (ec) {
        self->closed_ = true;
        for (const auto& rest : self->queue_)
          if (rest.binary) --self->queued_frames_;
        self->queue_.clear();
        self->owner_.detach(self.get());
        return;
      }
      if (finished.close_after) {
        self->ws_.async_close(websocket::close_code::try_again_later, [self](beast::error_code) {});
        self->closed_ = true;
        return;
      }
      if (!self->queue_.empty()) self->write_next();
    };
    if (m.binary) {
      ws_.async_write(net::buffer(m.bytes), done);
    } else {
      ws_.async_write(net::buffer(m.text), done);
    }
  }

  FrameService::Impl& owner_;
  websocket::stream<tcp::socket> ws_;
  beast::flat_buffer buffer_;
  std::deque<Outgoing> queue_;
  std::atomic<int> queued_frames_{0};
  bool closed_ = false;
};

// Reads one HTTP request: WebSocket upgrades become sessions, other GETs are
// answered from the static directory.
class HttpConnection : public std::enable_shared_from_this<HttpConnection> {
 public:
  HttpConnection(FrameService::Impl& owner, tcp::socket socket) : owner_(owner), stream_(std::move(socket)) {}

  void start() {
    stream_.expires_after(std::chrono::seconds(30));
    http::async_read(stream_, buffer_, request_, [self = shared_from_this()](beast::error_code ec, size_t) {
      if (ec) return;
      self->stream_.expires_never();
      if (websocket::is_upgrade(self->request_)) {
        std::make_shared<Session>(self->owner_, self->stream_.release_socket())->start(std::move(self->request_));
      } else {
        self->respond();
      }
    });
  }

 private:
  void respond() {
    auto response = std::make_shared<http::response<http::string_body>>();
    response->version(request_.version());
    response->keep_alive(false);
    std::string target(request_.target());
    if (const auto q = target.find('?'); q != std::string::npos) target.resize(q);
    if (target.empty() || target.back() == '/') target += "index.html";
    const bool safe = target.find("..") == std::string::npos;
    std::filesystem::path file = owner_.options.static_dir / std::filesystem::path(target).relative_path();
    std::ifstream in;
    std::error_code ec;
    if (safe && !owner_.options.static_dir.empty() && request_.method() == http::verb::get &&
        std::filesystem::is_regular_file(file, ec))
      in.open(file, std::ios::binary);
    if (in.is_open()) {
      std::ostringstream body;
      body << in.rdbuf();
      response->result(http::status::ok);
      response->set(http::field::content_type, content_type(file));
      response->body() = body.str();
    } else {
      response->result(http::status::not_found);
      response->set(http::field::content_type, "text/plain");
      response->body() = "not found\n";
    }
    response->prepare_payload();
    http::async_write(stream_, *response, [self = shared_from_this(), response](beast::error_code, size_t) {
      beast::error_code ec;
      self->stream_.socket().shutdown(tcp::socket::shutdown_send, ec);
    });
  }

  FrameService::Impl& owner_;
  beast::tcp_stream stream_;
  beast::flat_buffer buffer_;
  http::request<http::string_body> request_;
};

}  // namespace

void FrameService::Impl::do_accept() {
  acceptor.async_accept(net::make_strand(ioc), [this](beast::error_code ec, tcp::socket socket) {
    if (ec) return;
    std::make_shared<HttpConnection>(*this, std::move(socket))->start();
    do_accept();
  });
}

void FrameService::Impl::attach(const std::shared_ptr<Session>& session) {
  {
    std::lock_guard lock(mutex);
    if (!active) {
      active = session;
      reset_state();
      wake.notify_all();
      log("client connected");
      session->read();
      return;
    }
  }
  log("rejected a second client");
  session->send_and_close(wire::error_json("another client is already connected"));
}

void FrameService::Impl::detach(const Session* session) {
  std::lock_guard lock(mutex);
  if (active.get() == session) {
    active.reset();
    log("client disconnected");
  }
}

void FrameService::Impl::handle_text(const std::shared_ptr<Session>& session, const std::string& text) {
  try {
    const wire::ClientMessage message = wire::parse_client_message(text);
    std::lock_guard lock(mutex);
    if (const auto* gaze = std::get_if<wire::GazeUpdate>(&message)) {
      foveation.gaze = clamp_gaze(gaze->x, gaze->y);
    } else if (const auto* update = std::get_if<wire::ConfigUpdate>(&message)) {
      foveation = wire::apply_update(foveation, *update);
      if (update->encoding) encoding = *update->encoding;
    } else if (const auto* m = std::get_if<wire::ModeUpdate>(&message)) {
      mode = m->mode;
    }
    changed = true;
  } catch (const std::exception& e) {
    session->send_text(wire::error_json(e.what()));
  }
}

void FrameService::Impl::render_loop() {
  uint32_t frame_index = 0;
  Accumulation history;
  std::shared_ptr<Session> last_session;
  while (!stopping) {
    std::shared_ptr<Session> session;
    FoveationConfig fov;
    RenderMode frame_mode;
    wire::FrameEncoding frame_encoding;
    bool reset;
    {
      std::unique_lock lock(mutex);
      wake.wait_for(lock, std::chrono::milliseconds(20), [&] { return stopping || active; });
      if (stopping) break;
      if (!active) continue;
      if (active->queued_frames() >= kMaxQueuedFrames) {
        lock.unlock();
        std::this_thread::sleep_for(std::chrono::milliseconds(2));
        continue;
      }
      session = active;
      fov = foveation;
      frame_mode = mode;
      frame_encoding = encoding;
      reset = changed || session != last_session;
      changed = false;
    }
    if (session != last_session) frame_index = 0;
    last_session = session;

    FrameRequest request;
    request.mode = frame_mode;
    request.foveation = fov;
    request.display = config.display;
    request.spp_uniform = config.render.spp_uniform;
    request.max_depth = config.render.max_depth;
    request.seed = config.render.seed;
    request.frame_index = frame_index;
    request.workers = options.workers;

    try {
      const auto start = std::chrono::steady_clock::now();
      FrameResult result = renderer.render(request);
      const HdrFrame* shown = &result.hdr;
      if (config.render.temporal) {
        history = accumulate(history, result.hdr, reset);
        shown = &history.frame;
      }
      const LdrImage image = postprocess(*shown);
      std::vector<uint8_t> bytes = wire::encode_frame(image, frame_index, frame_encoding);
      const double frame_ms =
          std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();

      wire::StatsMessage stats;
      stats.frame_index = frame_index;
      stats.gaze = fov.gaze;
      stats.mode = frame_mode;
      stats.config = fov;
      stats.radii = result.radii;
      for (Region r : kRegions) {
        stats.region_samples[size_t(r)] = result.tasks.count(r).samples;
        stats.region_tasks[size_t(r)] = result.tasks.count(r).tasks;
      }
      stats.total_samples = result.tasks.total_samples();
      stats.uniform_samples = int64_t(renderer.width()) * renderer.height() * config.render.spp_uniform;
      stats.ratio = stats.total_samples > 0 ? double(stats.uniform_samples) / double(stats.total_samples) : 0.0;
      stats.frame_ms = frame_ms;
      stats.fps = frame_ms > 0 ? 1000.0 / frame_ms : 0.0;
      stats.clamped = result.clamped;
      stats.accumulated = config.render.temporal;
      stats.accumulation_count = config.render.temporal ? history.count : 1;

      session->send_binary(std::move(bytes));
      session->send_text(wire::stats_json(stats));
      ++frames_sent;
      ++frame_index;
    } catch (const std::exception& e) {
      log(std::string("frame failed: ") + e.what());
      session->send_text(wire::error_json(std::string("frame failed: ") + e.what()));
      std::this_thread::sleep_for(std::chrono::milliseconds(50));
    }
  }
}

FrameService::FrameService(const RenderConfig& config, ServiceOptions options)
    : impl_(std::make_unique<Impl>(config, std::move(options))) {}

FrameService::~FrameService() { stop(); }

uint16_t FrameService::port() const { return impl_->acceptor.local_endpoint().port(); }

uint64_t FrameService::frames_sent() const { return impl_->frames_sent.load(); }

void FrameService::run() {
  impl_->do_accept();
  impl_->render_thread = std::thread([this] { impl_->render_loop(); });
  impl_->ioc.run();
  impl_->stopping = true;
  impl_->wake.notify_all();
  if (impl_->render_thread.joinable()) impl_->render_thread.join();
}

void FrameService::stop() {
  if (!impl_) return;
  impl_->stopping = true;
  impl_->wake.notify_all();
  impl_->ioc.stop();
}

}  // namespace fovtrace
