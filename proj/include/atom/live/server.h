///////////////////////////////////////////////////////////////////////////////
//
// HTTP + websocket front end for live sessions.
//
//   GET /healthz         {"status":"ok","sessions":N}
//   GET /session         websocket upgrade; one live session per connection
//   GET /<path>          static files under the web root
//
// Each connection ticks its own session on a timer; reads, ticks and writes
// for one connection run on that connection's strand, so a slow client only
// delays its own queued frames, never the tick.
//
///////////////////////////////////////////////////////////////////////////////

#ifndef ATOM_LIVE_SERVER_H
#define ATOM_LIVE_SERVER_H

#include <chrono>
#include <memory>
#include <string>

#include "atom/sim/scenario.h"

namespace atom {

struct ServerOptions {
  std::string address = "0.0.0.0";
  unsigned short port = 8080;  // 0 picks a free port
  ScenarioConfig scenario;     // default for new sessions
  std::string record_dir;      // empty: no recordings
  std::string web_root = "web";
  // Tick period; zero means the scenario dt.
  std::chrono::milliseconds tick_period{0};
  int threads = 2;
};

class Server {
 public:
  explicit Server(ServerOptions opts);
  ~Server();
  Server(const Server&) = delete;
  Server& operator=(const Server&) = delete;

  // Binds and starts accepting on background threads. Throws on bind failure.
  void Start();
  // Stops accepting, closes every session and joins the threads.
  void Stop();
  // Blocks until Stop() is called or SIGINT/SIGTERM arrives.
  void Wait();

  unsigned short port() const;
  int session_count() const;

  struct Impl;

 private:
  std::unique_ptr<Impl> impl_;
};

// Path under web_root for a request target, or empty if the target is not a
// plain relative file path ("/" maps to index.html).
std::string StaticFilePath(const std::string& web_root, const std::string& target);
std::string MimeType(const std::string& path);

}  // namespace atom

#endif  // ATOM_LIVE_SERVER_H
