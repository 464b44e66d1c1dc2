#ifndef ATOM_SIM_REPORT_H
#define ATOM_SIM_REPORT_H

#include <iosfwd>
#include <string>
#include <vector>

#include "atom/sim/experiment.h"
#include "atom/sim/metrics.h"

namespace atom {

// Column order of the metrics CSV.
const std::vector<std::string>& MetricsCsvHeader();

void WriteMetricsCsv(std::ostream& out, const std::vector<RoundMetrics>& rows);
std::vector<RoundMetrics> ReadMetricsCsv(std::istream& in);

// Line charts of human ADE, detour and minimum distance against round, one
// series per (scenario, predictor).
std::string RenderMetricsSvg(const std::vector<RoundMetrics>& rows, const std::string& title = "");

// Run directory layout: config.json, steps.jsonl, metrics.csv, summary.json.
struct RunFiles {
  static constexpr const char* kConfig = "config.json";
  static constexpr const char* kSteps = "steps.jsonl";
  static constexpr const char* kMetrics = "metrics.csv";
  static constexpr const char* kSummary = "summary.json";
};

// Writes a complete run directory for one experiment.
void WriteRunDirectory(const std::string& dir, const ScenarioConfig& cfg,
                       const std::vector<RoundResult>& results);

// Recomputes the per-round metrics of a run directory from its step log.
std::vector<RoundMetrics> MetricsFromRunDirectory(const std::string& dir);

// Runs one experiment, streaming step records into dir/steps.jsonl.
std::vector<RoundResult> RunToDirectory(const ScenarioConfig& cfg, const std::string& dir);

}  // namespace atom

#endif  // ATOM_SIM_REPORT_H
