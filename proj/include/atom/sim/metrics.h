#ifndef ATOM_SIM_METRICS_H
#define ATOM_SIM_METRICS_H

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "atom/core/types.h"

namespace atom {

inline constexpr int kNotReached = -1;

// Mean Euclidean distance over the first min(|a|, |b|) states. Throws on
// empty input. `truncated` reports a length mismatch.
double ComputeAde(const Trajectory& truth, const Trajectory& predicted, bool* truncated = nullptr);

// Mean distance from each position to the segment start -> goal (or to the
// point when start == goal).
double ComputeDetour(std::span<const Vec2> robot, const Vec2& start, const Vec2& goal);

// Minimum over aligned steps and humans of the robot-human distance.
double ComputeMinDistance(std::span<const Vec2> robot, std::span<const std::vector<Vec2>> humans);

// First index with |p - goal| <= radius, kNotReached if none.
int ComputeTimeToGoal(std::span<const Vec2> robot, const Vec2& goal, double radius);

// Number of steps at which some human is closer than `threshold` to the robot.
int CountCollisionSteps(std::span<const Vec2> robot, std::span<const std::vector<Vec2>> humans,
                        double threshold);

// One prediction issued at round step t for a single agent.
struct IssuedPrediction {
  int issued_at = 0;               // step of the state the prediction starts from
  std::vector<Vec2> positions;     // predicted positions for steps t+1, t+2, ...
};

// Per-round ADE: mean over predictions of the mean distance to the realized
// positions, truncated at the end of the round. `realized[k]` is the agent's
// position at round step k. Predictions with no realized future are skipped.
// Returns nullopt if no prediction could be scored.
std::optional<double> RoundAde(std::span<const IssuedPrediction> predictions,
                               std::span<const Vec2> realized);

struct RoundMetrics {
  std::string scenario;
  std::string predictor;
  int round = 0;  // 1-based in reports
  std::vector<std::optional<double>> ade_humans;
  std::optional<double> ade_robot_by_human;
  double detour = 0.0;
  double min_distance = 0.0;
  int time_to_goal = kNotReached;
  int collisions = 0;
};

}  // namespace atom

#endif  // ATOM_SIM_METRICS_H
