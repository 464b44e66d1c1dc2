// serve and replay subcommands.

#include <filesystem>
#include <fstream>
#include <iostream>

#include "atom/live/live_session.h"
#include "atom/live/server.h"
#include "atom/sim/report.h"

namespace fs = std::filesystem;
using namespace atom;

int RunServe(int port, const std::string& scenario, const std::string& record_dir, const std::string& web_root) {
  ServerOptions opts;
  opts.port = static_cast<unsigned short>(port);
  opts.scenario = fs::exists(scenario) ? LoadScenario(scenario) : BuiltinScenario(scenario);
  opts.record_dir = record_dir;
  opts.web_root = web_root;
  if (!fs::is_directory(web_root)) std::cerr << "warning: web root '" << web_root << "' not found\n";
  Server server(opts);
  server.Start();
  std::cout << "serving " << opts.scenario.name << " on http://localhost:" << server.port()
            << " (websocket /session, health /healthz)";
  if (!record_dir.empty()) std::cout << ", recording to " << record_dir;
  std::cout << std::endl;
  server.Wait();
  std::cout << "stopped\n";
  return 0;
}

int RunReplay(const std::string& recording, const std::string& out_dir) {
  std::ifstream in(recording);
  if (!in) throw ValidationError("cannot open '" + recording + "'");
  const ReplayResult r = ReplayRecording(in);
  // Only completed rounds make it into the run directory.
  ScenarioConfig cfg = r.config;
  if (!r.rounds.empty()) {
    RunOptions o;
    o.rounds = static_cast<int>(r.rounds.size());
    cfg = ApplyOptions(cfg, o);
  }
  WriteRunDirectory(out_dir, cfg, r.rounds);
  std::cout << "replayed " << r.steps << " steps, " << r.rounds.size() << " completed rounds, max state error "
            << r.max_state_error << "\nwrote " << out_dir << '\n';
  return r.max_state_error <= 1e-9 ? 0 : 3;
}
