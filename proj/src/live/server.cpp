#include "atom/live/server.h"

#include <boost/asio.hpp>
#include <boost/beast/core.hpp>
#include <boost/beast/http.hpp>
#include <boost/beast/websocket.hpp>

#include <atomic>
#include <cmath>
#include <condition_variable>
#include <csignal>
#include <cstdio>
#include <deque>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <random>
#include <sstream>
#include <thread>
#include <vector>

#include "atom/live/live_session.h"
#include "atom/live/wire.h"

namespace atom {

namespace beast = boost::beast;
namespace http = beast::http;
namespace websocket = beast::websocket;
namespace net = boost::asio;
namespace fs = std::filesystem;
using tcp = net::ip::tcp;

namespace {

// A client that stops reading loses its oldest frames beyond this backlog.
constexpr std::size_t kMaxQueuedFrames = 256;

std::string NewSessionId() {
  static std::atomic<unsigned> counter{0};
  std::random_device rd;
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%08x%04x", rd(), ++counter & 0xffffu);
  return buf;
}

std::string QueryParam(const std::string& target, const std::string& key) {
  const auto q = target.find('?');
  if (q == std::string::npos) return "";
  std::istringstream rest(target.substr(q + 1));
  std::string pair;
  while (std::getline(rest, pair, '&')) {
    const auto eq = pair.find('=');
    if (pair.substr(0, eq) == key) return eq == std::string::npos ? "" : pair.substr(eq + 1);
  }
  return "";
}

}  // namespace

std::string StaticFilePath(const std::string& web_root, const std::string& target) {
  std::string path = target.substr(0, target.find('?'));
  if (path.empty() || path.front() != '/') return "";
  if (path.find('\\') != std::string::npos || path.find('\0') != std::string::npos) return "";
  if (path.back() == '/') path += "index.html";
  const fs::path rel(path.substr(1));
  if (rel.empty() || rel.is_absolute() || rel.has_root_name()) return "";
  for (const auto& part : rel) {
    if (part == ".." || part == "." || part.empty()) return "";
  }
  return (fs::path(web_root) / rel).string();
}

std::string MimeType(const std::string& path) {
  const std::string ext = fs::path(path).extension().string();
  if (ext == ".html" || ext == ".htm") return "text/html; charset=utf-8";
  if (ext == ".js" || ext == ".mjs") return "text/javascript; charset=utf-8";
  if (ext == ".css") return "text/css; charset=utf-8";
  if (ext == ".json" || ext == ".map") return "application/json";
  if (ext == ".svg") return "image/svg+xml";
  if (ext == ".png") return "image/png";
  if (ext == ".ico") return "image/x-icon";
  if (ext == ".wasm") return "application/wasm";
  if (ext == ".txt") return "text/plain; charset=utf-8";
  return "application/octet-stream";
}

struct Server::Impl {
  explicit Impl(ServerOptions o) : opts(std::move(o)) {}

  void Accept();

  ServerOptions opts;
  std::atomic<int> sessions{0};
  std::mutex stop_mu;
  std::condition_variable stop_cv;
  bool stop_requested = false;
  bool stopped = false;
  // Declared after everything a handler may touch during io_context teardown.
  net::io_context ioc;
  tcp::acceptor acceptor{ioc};
  std::optional<net::signal_set> signals;
  std::vector<std::thread> threads;
};

namespace {

class WsSession : public std::enable_shared_from_this<WsSession> {
 public:
  WsSession(tcp::socket socket, Server::Impl& srv)
      : ws_(std::move(socket)), timer_(ws_.get_executor()), srv_(srv), id_(NewSessionId()) {}

  ~WsSession() {
    if (counted_) --srv_.sessions;
  }

  void Run(http::request<http::string_body> req) {
    req_ = std::move(req);
    net::dispatch(ws_.get_executor(), [self = shared_from_this()] { self->Accept(); });
  }

 private:
  void Accept() {
    ws_.set_option(websocket::stream_base::timeout::suggested(beast::role_type::server));
    ws_.set_option(websocket::stream_base::decorator(
        [](websocket::response_type& res) { res.set(http::field::server, "atom"); }));
    ws_.async_accept(req_, beast::bind_front_handler(&WsSession::OnAccept, shared_from_this()));
  }

  void OnAccept(beast::error_code ec) {
    if (ec) return;
    ++srv_.sessions;
    counted_ = true;
    try {
      live_ = MakeLive(QueryParam(std::string(req_.target()), "scenario"));
    } catch (const std::exception& e) {
      // Fall back to the server default rather than dropping the client.
      Queue(ErrorMessage(id_, 0, e.what()).dump());
      live_ = MakeLive("");
    }
    Greet();
    deadline_ = std::chrono::steady_clock::now() + period_;
    ScheduleTick();
    Read();
  }

  std::unique_ptr<LiveSession> MakeLive(const std::string& scenario) {
    const ScenarioConfig cfg =
        scenario.empty() || scenario == srv_.opts.scenario.name ? srv_.opts.scenario : BuiltinScenario(scenario);
    auto live = std::make_unique<LiveSession>(id_, cfg);
    if (!srv_.opts.record_dir.empty()) {
      fs::create_directories(srv_.opts.record_dir);
      const fs::path file = fs::path(srv_.opts.record_dir) / (id_ + "-" + std::to_string(++generation_) + ".jsonl");
      auto out = std::make_unique<std::ofstream>(file);
      if (!*out) throw ValidationError("cannot write recording '" + file.string() + "'");
      live->SetRecorder(std::move(out));
    }
    period_ = srv_.opts.tick_period.count() > 0
                  ? std::chrono::duration_cast<std::chrono::steady_clock::duration>(srv_.opts.tick_period)
                  : std::chrono::duration_cast<std::chrono::steady_clock::duration>(
                        std::chrono::duration<double>(cfg.dt));
    return live;
  }

  void Greet() {
    Queue(ScenarioMessage(*live_).dump());
    Queue(StateMessage(*live_).dump());
  }

  void ScheduleTick() {
    timer_.expires_at(deadline_);
    timer_.async_wait(beast::bind_front_handler(&WsSession::OnTick, shared_from_this()));
  }

  void OnTick(beast::error_code ec) {
    if (ec || closed_) return;
    try {
      const TickResult r = live_->Tick();
      for (auto& m : TickMessages(*live_, r)) Queue(std::move(m));
    } catch (const std::exception& e) {
      Queue(ErrorMessage(id_, live_->tick(), std::string("tick failed: ") + e.what()).dump());
    }
    // Fixed-rate schedule; after a long stall resume from now instead of bursting.
    deadline_ += period_;
    const auto now = std::chrono::steady_clock::now();
    if (deadline_ + period_ < now) deadline_ = now;
    ScheduleTick();
  }

  void Read() { ws_.async_read(in_, beast::bind_front_handler(&WsSession::OnRead, shared_from_this())); }

  void OnRead(beast::error_code ec, std::size_t) {
    if (ec) {
      Close();
      return;
    }
    const std::string text = beast::buffers_to_string(in_.data());
    in_.consume(in_.size());
    Handle(text);
    Read();
  }

  void Handle(const std::string& text) {
    try {
      const ClientMessage m = ParseClientMessage(text);
      if (m.session != id_) throw WireError("unknown session '" + m.session + "'");
      switch (m.type) {
        case ClientMessage::Type::kControl:
          live_->SubmitControl(m.tick, m.velocity);  // stale ones are dropped silently
          break;
        case ClientMessage::Type::kResetRound:
          live_->ResetRound(m.reset_belief);
          Queue(StateMessage(*live_).dump());
          break;
        case ClientMessage::Type::kSetScenario:
          live_ = MakeLive(m.scenario);
          Greet();
          break;
      }
    } catch (const std::exception& e) {
      Queue(ErrorMessage(id_, live_->tick(), e.what()).dump());
    }
  }

  void Queue(std::string frame) {
    if (closed_) return;
    if (queue_.size() >= kMaxQueuedFrames) queue_.erase(queue_.begin() + (writing_ ? 1 : 0));
    queue_.push_back(std::move(frame));
    if (!writing_) Write();
  }

  void Write() {
    writing_ = true;
    ws_.text(true);
    ws_.async_write(net::buffer(queue_.front()), beast::bind_front_handler(&WsSession::OnWrite, shared_from_this()));
  }

  void OnWrite(beast::error_code ec, std::size_t) {
    writing_ = false;
    if (ec) {
      Close();
      return;
    }
    queue_.pop_front();
    if (!queue_.empty()) Write();
  }

  void Close() {
    closed_ = true;
    timer_.cancel();
  }

  websocket::stream<beast::tcp_stream> ws_;
  net::steady_timer timer_;
  Server::Impl& srv_;
  std::string id_;
  http::request<http::string_body> req_;
  beast::flat_buffer in_;
  std::unique_ptr<LiveSession> live_;
  std::deque<std::string> queue_;
  bool writing_ = false;
  bool closed_ = false;
  bool counted_ = false;
  int generation_ = 0;
  std::chrono::steady_clock::duration period_{};
  std::chrono::steady_clock::time_point deadline_;
};

class HttpConnection : public std::enable_shared_from_this<HttpConnection> {
 public:
  HttpConnection(tcp::socket socket, Server::Impl& srv) : stream_(std::move(socket)), srv_(srv) {}

  void Run() {
    net::dispatch(stream_.get_executor(), [self = shared_from_this()] { self->Read(); });
  }

 private:
  void Read() {
    req_ = {};
    stream_.expires_after(std::chrono::seconds(30));
    http::async_read(stream_, buffer_, req_, beast::bind_front_handler(&HttpConnection::OnRead, shared_from_this()));
  }

  void OnRead(beast::error_code ec, std::size_t) {
    if (ec) {
      stream_.socket().shutdown(tcp::socket::shutdown_send, ec);
      return;
    }
    const std::string target(req_.target());
    const std::string path = target.substr(0, target.find('?'));
    if (websocket::is_upgrade(req_)) {
      if (path != "/session") return Send(Respond(http::status::not_found, "no websocket endpoint here\n"));
      stream_.expires_never();
      std::make_shared<WsSession>(stream_.release_socket(), srv_)->Run(std::move(req_));
      return;
    }
    if (req_.method() != http::verb::get) {
      return Send(Respond(http::status::method_not_allowed, "GET only\n"));
    }
    if (path == "/healthz") {
      const nlohmann::json j{{"status", "ok"}, {"sessions", srv_.sessions.load()}};
      return Send(Respond(http::status::ok, j.dump(), "application/json"));
    }
    if (path == "/session") return Send(Respond(http::status::upgrade_required, "websocket endpoint\n"));
    const std::string file = StaticFilePath(srv_.opts.web_root, path);
    if (file.empty()) return Send(Respond(http::status::bad_request, "bad path\n"));
    std::error_code fec;
    if (!fs::is_regular_file(file, fec)) return Send(Respond(http::status::not_found, "not found\n"));
    std::ifstream in(file, std::ios::binary);
    std::string body((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    Send(Respond(http::status::ok, std::move(body), MimeType(file)));
  }

  http::response<http::string_body> Respond(http::status status, std::string body,
                                            const std::string& type = "text/plain; charset=utf-8") {
    http::response<http::string_body> res{status, req_.version()};
    res.set(http::field::server, "atom");
    res.set(http::field::content_type, type);
    res.keep_alive(req_.keep_alive());
    res.body() = std::move(body);
    res.prepare_payload();
    return res;
  }

  void Send(http::response<http::string_body>&& res) {
    auto sp = std::make_shared<http::response<http::string_body>>(std::move(res));
    http::async_write(stream_, *sp, [self = shared_from_this(), sp](beast::error_code ec, std::size_t) {
      if (ec) return;
      if (!sp->keep_alive()) {
        self->stream_.socket().shutdown(tcp::socket::shutdown_send, ec);
        return;
      }
      self->Read();
    });
  }

  beast::tcp_stream stream_;
  beast::flat_buffer buffer_;
  http::request<http::string_body> req_;
  Server::Impl& srv_;
};

}  // namespace

void Server::Impl::Accept() {
  acceptor.async_accept(net::make_strand(ioc), [this](beast::error_code ec, tcp::socket socket) {
    if (ec == net::error::operation_aborted) return;
    if (!ec) std::make_shared<HttpConnection>(std::move(socket), *this)->Run();
    if (acceptor.is_open()) Accept();
  });
}

Server::Server(ServerOptions opts) : impl_(std::make_unique<Impl>(std::move(opts))) {
  Validate(impl_->opts.scenario);
  if (impl_->opts.threads < 1) throw ValidationError("need at least one server thread");
}

Server::~Server() { Stop(); }

void Server::Start() {
  Impl& s = *impl_;
  const tcp::endpoint ep{net::ip::make_address(s.opts.address), s.opts.port};
  s.acceptor.open(ep.protocol());
  s.acceptor.set_option(net::socket_base::reuse_address(true));
  s.acceptor.bind(ep);
  s.acceptor.listen(net::socket_base::max_listen_connections);
  s.Accept();
  s.signals.emplace(s.ioc, SIGINT, SIGTERM);
  s.signals->async_wait([&s](beast::error_code ec, int) {
    if (ec) return;
    std::lock_guard lock(s.stop_mu);
    s.stop_requested = true;
    s.stop_cv.notify_all();
  });
  for (int i = 0; i < s.opts.threads; ++i) s.threads.emplace_back([&s] { s.ioc.run(); });
}

void Server::Wait() {
  Impl& s = *impl_;
  {
    std::unique_lock lock(s.stop_mu);
    s.stop_cv.wait(lock, [&] { return s.stop_requested || s.stopped; });
  }
  Stop();
}

void Server::Stop() {
  Impl& s = *impl_;
  {
    std::lock_guard lock(s.stop_mu);
    if (s.stopped) return;
    s.stopped = true;
    s.stop_cv.notify_all();
  }
  net::post(s.ioc, [&s] {
    beast::error_code ec;
    s.acceptor.close(ec);
    if (s.signals) s.signals->cancel(ec);
  });
  s.ioc.stop();
  for (auto& t : s.threads) {
    if (t.joinable()) t.join();
  }
}

unsigned short Server::port() const { return impl_->acceptor.local_endpoint().port(); }

int Server::session_count() const { return impl_->sessions.load(); }

}  // namespace atom
