#include "atom/sim/report.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>

namespace atom {
namespace {

std::string FormatDouble(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string XmlEscape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '&': out += "&amp;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

std::string FormatOptional(const std::optional<double>& v) { return v ? FormatDouble(*v) : ""; }

std::optional<double> ParseOptional(const std::string& s) {
  if (s.empty()) return std::nullopt;
  return std::stod(s);
}

std::vector<std::string> SplitCsv(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream ss(line);
  while (std::getline(ss, cell, ',')) out.push_back(cell);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

}  // namespace

const std::vector<std::string>& MetricsCsvHeader() {
  static const std::vector<std::string> header{
      "scenario", "predictor",    "round",        "ade_h1",     "ade_h2",
      "ade_robot_by_human", "detour", "min_distance", "time_to_goal", "collisions"};
  return header;
}

void WriteMetricsCsv(std::ostream& out, const std::vector<RoundMetrics>& rows) {
  const auto& header = MetricsCsvHeader();
  for (std::size_t i = 0; i < header.size(); ++i) out << (i ? "," : "") << header[i];
  out << '\n';
  for (const auto& m : rows) {
    const auto ade = [&](std::size_t h) {
      return h < m.ade_humans.size() ? FormatOptional(m.ade_humans[h]) : std::string();
    };
    out << m.scenario << ',' << m.predictor << ',' << m.round << ',' << ade(0) << ',' << ade(1)
        << ',' << FormatOptional(m.ade_robot_by_human) << ',' << FormatDouble(m.detour) << ','
        << FormatDouble(m.min_distance) << ',' << m.time_to_goal << ',' << m.collisions << '\n';
  }
}

std::vector<RoundMetrics> ReadMetricsCsv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw ValidationError("empty metrics file");
  if (SplitCsv(line) != MetricsCsvHeader()) throw ValidationError("unexpected metrics header");
  std::vector<RoundMetrics> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto c = SplitCsv(line);
    if (c.size() != MetricsCsvHeader().size()) throw ValidationError("malformed metrics row: " + line);
    RoundMetrics m;
    m.scenario = c[0];
    m.predictor = c[1];
    m.round = std::stoi(c[2]);
    m.ade_humans = {ParseOptional(c[3])};
    if (!c[4].empty()) m.ade_humans.push_back(ParseOptional(c[4]));
    m.ade_robot_by_human = ParseOptional(c[5]);
    m.detour = std::stod(c[6]);
    m.min_distance = std::stod(c[7]);
    m.time_to_goal = std::stoi(c[8]);
    m.collisions = std::stoi(c[9]);
    rows.push_back(m);
  }
  return rows;
}

std::string RenderMetricsSvg(const std::vector<RoundMetrics>& rows, const std::string& title) {
  struct Panel {
    const char* label;
    std::function<std::optional<double>(const RoundMetrics&)> value;
  };
  const std::vector<Panel> panels{
      {"ADE human 1 (m)", [](const RoundMetrics& m) { return m.ade_humans.empty() ? std::nullopt : m.ade_humans[0]; }},
      {"Detour (m)", [](const RoundMetrics& m) { return std::optional<double>(m.detour); }},
      {"Minimum distance (m)", [](const RoundMetrics& m) { return std::optional<double>(m.min_distance); }},
  };
  std::map<std::string, std::vector<const RoundMetrics*>> series;
  int max_round = 1;
  for (const auto& m : rows) {
    series[m.scenario + " / " + m.predictor].push_back(&m);
    max_round = std::max(max_round, m.round);
  }
  const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"};

  const double pw = 300, ph = 220, margin = 50, top = title.empty() ? 20 : 45;
  const double width = panels.size() * (pw + margin) + margin;
  const double height = top + ph + 2 * margin + 20.0 * series.size();
  std::ostringstream svg;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height
      << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  svg << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  if (!title.empty()) svg << "<text x=\"" << margin << "\" y=\"25\" font-size=\"16\">" << XmlEscape(title) << "</text>\n";

  for (std::size_t p = 0; p < panels.size(); ++p) {
    const double x0 = margin + p * (pw + margin);
    const double y0 = top;
    double lo = std::numeric_limits<double>::infinity(), hi = -lo;
    for (const auto& m : rows) {
      if (auto v = panels[p].value(m); v && std::isfinite(*v)) {
        lo = std::min(lo, *v);
        hi = std::max(hi, *v);
      }
    }
    if (!std::isfinite(lo)) lo = 0.0, hi = 1.0;
    lo = std::min(lo, 0.0);
    if (hi - lo < 1e-9) hi = lo + 1.0;
    const auto sx = [&](double r) { return x0 + (max_round > 1 ? (r - 1) / (max_round - 1) : 0.5) * pw; };
    const auto sy = [&](double v) { return y0 + ph - (v - lo) / (hi - lo) * ph; };

    svg << "<rect x=\"" << x0 << "\" y=\"" << y0 << "\" width=\"" << pw << "\" height=\"" << ph
        << "\" fill=\"none\" stroke=\"#444\"/>\n";
    svg << "<text x=\"" << x0 << "\" y=\"" << y0 - 6 << "\">" << panels[p].label << "</text>\n";
    svg << "<text x=\"" << x0 - 4 << "\" y=\"" << y0 + ph << "\" text-anchor=\"end\">"
        << FormatDouble(std::round(lo * 100) / 100) << "</text>\n";
    svg << "<text x=\"" << x0 - 4 << "\" y=\"" << y0 + 10 << "\" text-anchor=\"end\">"
        << FormatDouble(std::round(hi * 100) / 100) << "</text>\n";
    svg << "<text x=\"" << x0 + pw / 2 << "\" y=\"" << y0 + ph + 18
        << "\" text-anchor=\"middle\">round 1.." << max_round << "</text>\n";

    std::size_t color = 0;
    for (const auto& [name, ms] : series) {
      std::ostringstream pts;
      for (const auto* m : ms) {
        if (auto v = panels[p].value(*m); v && std::isfinite(*v)) pts << sx(m->round) << ',' << sy(*v) << ' ';
      }
      const char* c = colors[color++ % 6];
      svg << "<polyline fill=\"none\" stroke=\"" << c << "\" stroke-width=\"2\" points=\"" << pts.str()
          << "\"/>\n";
      for (const auto* m : ms) {
        if (m->collisions > 0 && p == 2) {
          svg << "<text x=\"" << sx(m->round) << "\" y=\"" << sy(m->min_distance) + 4
              << "\" fill=\"red\" text-anchor=\"middle\">x</text>\n";
        }
      }
    }
  }
  std::size_t color = 0;
  double ly = top + ph + 40;
  for (const auto& [name, ms] : series) {
    svg << "<rect x=\"" << margin << "\" y=\"" << ly - 9 << "\" width=\"14\" height=\"4\" fill=\""
        << colors[color++ % 6] << "\"/>\n";
    svg << "<text x=\"" << margin + 20 << "\" y=\"" << ly - 4 << "\">" << XmlEscape(name) << "</text>\n";
    ly += 20;
  }
  svg << "</svg>\n";
  return svg.str();
}

namespace {

void WriteMetricsAndSummary(const std::filesystem::path& dir, const std::vector<RoundResult>& results) {
  std::vector<RoundMetrics> rows;
  nlohmann::json summary = nlohmann::json::array();
  // no wall-clock fields here: a rerun with the same seed must reproduce
  // every file byte for byte
  for (const auto& r : results) {
    if (r.metrics) rows.push_back(*r.metrics);
    summary.push_back({{"round", r.round + 1}, {"steps", r.steps.size()}, {"error", r.error}});
  }
  std::ofstream csv(dir / RunFiles::kMetrics);
  WriteMetricsCsv(csv, rows);
  std::ofstream(dir / RunFiles::kSummary) << summary.dump(2) << '\n';
}

}  // namespace

void WriteRunDirectory(const std::string& dir, const ScenarioConfig& cfg,
                       const std::vector<RoundResult>& results) {
  namespace fs = std::filesystem;
  fs::create_directories(dir);
  SaveScenario(cfg, (fs::path(dir) / RunFiles::kConfig).string());
  std::ofstream steps(fs::path(dir) / RunFiles::kSteps);
  for (const auto& r : results) {
    for (const auto& s : r.steps) steps << ToJson(s).dump() << '\n';
  }
  WriteMetricsAndSummary(dir, results);
}

std::vector<RoundResult> RunToDirectory(const ScenarioConfig& cfg, const std::string& dir) {
  namespace fs = std::filesystem;
  fs::create_directories(dir);
  SaveScenario(cfg, (fs::path(dir) / RunFiles::kConfig).string());
  std::ofstream steps(fs::path(dir) / RunFiles::kSteps);
  auto results = RunExperiment(cfg, [&](const StepLog& log) { steps << ToJson(log).dump() << '\n'; });
  steps.close();
  WriteMetricsAndSummary(dir, results);
  return results;
}

std::vector<RoundMetrics> MetricsFromRunDirectory(const std::string& dir) {
  namespace fs = std::filesystem;
  const ScenarioConfig cfg = LoadScenario((fs::path(dir) / RunFiles::kConfig).string());
  std::ifstream in(fs::path(dir) / RunFiles::kSteps);
  if (!in) throw ValidationError("no step log in '" + dir + "'");
  std::map<int, std::vector<StepLog>> by_round;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    StepLog log = StepLogFromJson(nlohmann::json::parse(line));
    by_round[log.round].push_back(std::move(log));
  }
  std::vector<RoundMetrics> rows;
  for (const auto& [round, logs] : by_round) rows.push_back(ComputeRoundMetrics(cfg, cfg.predictor, logs));
  return rows;
}

}  // namespace atom
