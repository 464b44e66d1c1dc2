// Command-line front end: simulate, metrics, plot, compare, serve, replay.

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>

#include "atom/sim/experiment.h"
#include "atom/sim/report.h"
#include "atom/sim/scenario.h"

namespace fs = std::filesystem;
using namespace atom;

namespace {

void PrintRounds(const std::vector<RoundResult>& results) {
  for (const auto& r : results) {
    std::cout << "round " << r.round + 1 << ": " << r.steps.size() << " steps";
    if (r.metrics) {
      const auto& m = *r.metrics;
      std::cout << ", ade_h1 " << (m.ade_humans.empty() || !m.ade_humans[0] ? -1.0 : *m.ade_humans[0])
                << ", detour " << m.detour << ", min_distance " << m.min_distance
                << ", time_to_goal " << m.time_to_goal << ", collisions " << m.collisions;
    }
    if (!r.error.empty()) std::cout << " [failed: " << r.error << "]";
    std::cout << '\n';
  }
}

std::vector<RoundMetrics> ReadCsvFile(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open '" + path.string() + "'");
  return ReadMetricsCsv(in);
}

// Metrics rows of a run directory or of a compare directory (all subruns).
std::vector<RoundMetrics> CollectMetrics(const fs::path& dir) {
  if (fs::exists(dir / RunFiles::kMetrics)) return ReadCsvFile(dir / RunFiles::kMetrics);
  std::vector<RoundMetrics> rows;
  std::vector<fs::path> subdirs;
  for (const auto& e : fs::directory_iterator(dir)) {
    if (e.is_directory() && fs::exists(e.path() / RunFiles::kMetrics)) subdirs.push_back(e.path());
  }
  std::sort(subdirs.begin(), subdirs.end());
  for (const auto& d : subdirs) {
    auto part = ReadCsvFile(d / RunFiles::kMetrics);
    rows.insert(rows.end(), part.begin(), part.end());
  }
  if (rows.empty()) throw ValidationError("no metrics found under '" + dir.string() + "'");
  return rows;
}

}  // namespace

int RunServe(int port, const std::string& scenario, const std::string& record_dir,
             const std::string& web_root);
int RunReplay(const std::string& recording, const std::string& out_dir);

int main(int argc, char** argv) {
  CLI::App app{"Adaptive theory-of-mind human motion prediction: experiments and live server"};
  app.require_subcommand(1);

  auto* simulate = app.add_subcommand("simulate", "Run a multi-round experiment");
  std::string config;
  std::string predictor;
  int rounds = 0;
  std::uint64_t seed = 0;
  bool reset_belief = false;
  std::string out_dir = "out";
  simulate->add_option("--config", config, "Scenario JSON file or built-in scenario name")->required();
  simulate->add_option("--predictor", predictor, "Human predictor")->check(CLI::IsMember({"atom", "cv", "sf"}));
  simulate->add_option("--rounds", rounds, "Number of rounds")->check(CLI::PositiveNumber);
  auto* seed_opt = simulate->add_option("--seed", seed, "Random seed");
  simulate->add_flag("--reset-belief", reset_belief, "Reset the belief at the start of every round");
  simulate->add_option("--out", out_dir, "Output directory");

  auto* metrics = app.add_subcommand("metrics", "Recompute metrics from a run directory's step log");
  std::string in_dir;
  std::string csv_file;
  metrics->add_option("--in", in_dir, "Run directory")->required();
  metrics->add_option("--csv", csv_file, "Output CSV")->required();

  auto* plot = app.add_subcommand("plot", "Plot per-round metrics as SVG");
  std::string plot_in;
  std::string plot_out;
  plot->add_option("--in", plot_in, "Run or compare directory")->required();
  plot->add_option("--out", plot_out, "Output SVG")->required();

  auto* compare = app.add_subcommand("compare", "Run every predictor on every config");
  std::vector<std::string> configs;
  std::string compare_out = "compare";
  std::vector<std::string> predictors{"atom", "cv", "sf"};
  std::uint64_t compare_seed = 0;
  compare->add_option("--configs", configs, "Scenario JSON files or built-in names")->required();
  compare->add_option("--out", compare_out, "Output directory");
  compare->add_option("--predictors", predictors, "Predictors to compare");
  auto* compare_seed_opt = compare->add_option("--seed", compare_seed, "Random seed");
  int compare_rounds = 0;
  compare->add_option("--rounds", compare_rounds, "Number of rounds")->check(CLI::PositiveNumber);

  auto* scenario = app.add_subcommand("scenario", "Write a built-in scenario as a JSON config");
  std::string scenario_name;
  std::string scenario_out;
  scenario->add_option("name", scenario_name, "Built-in scenario")
      ->required()
      ->check(CLI::IsMember(BuiltinScenarioNames()));
  scenario->add_option("--out", scenario_out, "Output file (stdout if omitted)");

  auto* serve = app.add_subcommand("serve", "Serve a live session over websocket");
  int port = 8080;
  std::string serve_scenario = "doorway";
  std::string record_dir;
  std::string web_root = "web";
  serve->add_option("--port", port, "TCP port")->check(CLI::Range(1, 65535));
  serve->add_option("--scenario", serve_scenario, "Scenario name or JSON file");
  serve->add_option("--record", record_dir, "Directory for session recordings");
  serve->add_option("--web-root", web_root, "Directory of static client files");

  auto* replay = app.add_subcommand("replay", "Replay a recorded live session offline");
  std::string recording;
  std::string replay_out = "replay";
  replay->add_option("--in", recording, "Recording file (JSON lines)")->required();
  replay->add_option("--out", replay_out, "Output directory");

  CLI11_PARSE(app, argc, argv);

  const auto load = [](const std::string& name) {
    return fs::exists(name) ? LoadScenario(name) : BuiltinScenario(name);
  };

  try {
    if (*simulate) {
      RunOptions opts;
      if (!predictor.empty()) opts.predictor = predictor;
      if (rounds > 0) opts.rounds = rounds;
      if (*seed_opt) opts.seed = seed;
      opts.reset_belief = reset_belief;
      const ScenarioConfig cfg = ApplyOptions(load(config), opts);
      PrintRounds(RunToDirectory(cfg, out_dir));
      std::cout << "wrote " << (fs::path(out_dir) / RunFiles::kMetrics).string() << '\n';
    } else if (*metrics) {
      const auto rows = MetricsFromRunDirectory(in_dir);
      std::ofstream out(csv_file);
      if (!out) throw ValidationError("cannot write '" + csv_file + "'");
      WriteMetricsCsv(out, rows);
      std::cout << "wrote " << csv_file << " (" << rows.size() << " rounds)\n";
    } else if (*plot) {
      const auto rows = CollectMetrics(plot_in);
      std::ofstream out(plot_out);
      if (!out) throw ValidationError("cannot write '" + plot_out + "'");
      out << RenderMetricsSvg(rows, fs::path(plot_in).filename().string());
      std::cout << "wrote " << plot_out << '\n';
    } else if (*compare) {
      std::vector<RoundMetrics> all;
      for (const auto& c : configs) {
        for (const auto& p : predictors) {
          RunOptions opts;
          opts.predictor = p;
          if (*compare_seed_opt) opts.seed = compare_seed;
          if (compare_rounds > 0) opts.rounds = compare_rounds;
          const ScenarioConfig cfg = ApplyOptions(load(c), opts);
          const fs::path dir = fs::path(compare_out) / (cfg.name + "_" + p);
          std::cout << "== " << cfg.name << " / " << p << '\n';
          const auto results = RunToDirectory(cfg, dir.string());
          PrintRounds(results);
          for (const auto& r : results) {
            if (r.metrics) all.push_back(*r.metrics);
          }
        }
      }
      std::ofstream csv(fs::path(compare_out) / RunFiles::kMetrics);
      WriteMetricsCsv(csv, all);
      std::ofstream(fs::path(compare_out) / "metrics.svg") << RenderMetricsSvg(all, "comparison");
      std::cout << "wrote " << (fs::path(compare_out) / RunFiles::kMetrics).string() << '\n';
    } else if (*scenario) {
      const ScenarioConfig cfg = BuiltinScenario(scenario_name);
      if (scenario_out.empty()) {
        std::cout << nlohmann::json(cfg).dump(2) << '\n';
      } else {
        SaveScenario(cfg, scenario_out);
      }
    } else if (*serve) {
      return RunServe(port, serve_scenario, record_dir, web_root);
    } else if (*replay) {
      return RunReplay(recording, replay_out);
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
