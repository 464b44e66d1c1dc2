///////////////////////////////////////////////////////////////////////////////
//
// Multi-round experiments, the persisted step-log format and the metrics
// derived from it. Metrics are always computed from StepLog values, so a
// report recomputed from a saved log matches the live one exactly.
//
///////////////////////////////////////////////////////////////////////////////

#ifndef ATOM_SIM_EXPERIMENT_H
#define ATOM_SIM_EXPERIMENT_H

#include <nlohmann/json.hpp>

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "atom/sim/metrics.h"
#include "atom/sim/scenario.h"
#include "atom/sim/session.h"

namespace atom {

struct StepLog {
  int round = 0;  // 0-based
  int step = 0;
  std::vector<Vec2> positions;       // at `step`, robot first
  std::vector<Vec2> next_positions;  // at step + 1
  std::vector<Vec2> controls;        // executed velocities
  std::vector<std::vector<Vec2>> predicted_humans;
  std::optional<std::vector<Vec2>> predicted_robot_by_human;
  std::vector<Vec2> robot_plan;
  double plan_cost = 0.0;
  bool plan_feasible = false;
  std::vector<double> belief_mean;      // after the update, empty for stateless predictors
  std::vector<double> belief_cov_diag;
  int solver_iterations = 0;
  bool solver_converged = true;
  bool prediction_fallback = false;
  bool update_applied = false;
  bool human_fallback = false;
};

StepLog ToStepLog(const StepRecord& rec);

nlohmann::json ToJson(const StepLog& log);
StepLog StepLogFromJson(const nlohmann::json& j);

// Robot-first joint positions at round steps 0..T reconstructed from a
// round's logs (which must be consecutive from step 0).
std::vector<std::vector<Vec2>> RealizedPositions(std::span<const StepLog> round_logs);

RoundMetrics ComputeRoundMetrics(const ScenarioConfig& cfg, const std::string& predictor,
                                 std::span<const StepLog> round_logs);

struct RoundResult {
  int round = 0;
  std::vector<StepLog> steps;
  std::optional<RoundMetrics> metrics;  // empty if the round failed before its first step
  double wall_seconds = 0.0;
  std::string error;  // empty on success
};

struct RunOptions {
  std::optional<std::string> predictor;
  std::optional<int> rounds;
  std::optional<std::uint64_t> seed;
  bool reset_belief = false;
};

// Applies CLI-style overrides. Extending the number of rounds repeats the
// last schedule entry; shortening truncates.
ScenarioConfig ApplyOptions(ScenarioConfig cfg, const RunOptions& opts);

using StepSink = std::function<void(const StepLog&)>;

// Runs every round with scripted humans. A failing round is recorded and the
// experiment moves on.
std::vector<RoundResult> RunExperiment(const ScenarioConfig& cfg, const StepSink& sink = {});

}  // namespace atom

#endif  // ATOM_SIM_EXPERIMENT_H
