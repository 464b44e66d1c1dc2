#include "atom/sim/metrics.h"

#include <algorithm>
#include <limits>

#include "atom/core/geometry.h"

namespace atom {

double ComputeAde(const Trajectory& truth, const Trajectory& predicted, bool* truncated) {
  if (truth.empty() || predicted.empty()) throw ValidationError("ADE of an empty trajectory");
  const std::size_t n = std::min(truth.size(), predicted.size());
  if (truncated) *truncated = truth.size() != predicted.size();
  double sum = 0.0;
  for (std::size_t k = 0; k < n; ++k) sum += (truth.position(k) - predicted.position(k)).norm();
  return sum / static_cast<double>(n);
}

double ComputeDetour(std::span<const Vec2> robot, const Vec2& start, const Vec2& goal) {
  if (robot.empty()) throw ValidationError("detour of an empty trajectory");
  double sum = 0.0;
  for (const auto& p : robot) {
    sum += (goal - start).norm() > 0.0 ? DistanceToSegment(p, {start, goal}) : (p - start).norm();
  }
  return sum / static_cast<double>(robot.size());
}

double ComputeMinDistance(std::span<const Vec2> robot, std::span<const std::vector<Vec2>> humans) {
  double d = std::numeric_limits<double>::infinity();
  for (const auto& h : humans) {
    const std::size_t n = std::min(robot.size(), h.size());
    for (std::size_t k = 0; k < n; ++k) d = std::min(d, (robot[k] - h[k]).norm());
  }
  return d;
}

int ComputeTimeToGoal(std::span<const Vec2> robot, const Vec2& goal, double radius) {
  if (!(radius > 0.0)) throw ValidationError("goal radius must be positive");
  for (std::size_t k = 0; k < robot.size(); ++k) {
    if ((robot[k] - goal).norm() <= radius) return static_cast<int>(k);
  }
  return kNotReached;
}

int CountCollisionSteps(std::span<const Vec2> robot, std::span<const std::vector<Vec2>> humans,
                        double threshold) {
  int count = 0;
  for (std::size_t k = 0; k < robot.size(); ++k) {
    for (const auto& h : humans) {
      if (k < h.size() && (robot[k] - h[k]).norm() < threshold) {
        ++count;
        break;
      }
    }
  }
  return count;
}

std::optional<double> RoundAde(std::span<const IssuedPrediction> predictions,
                               std::span<const Vec2> realized) {
  double total = 0.0;
  int scored = 0;
  for (const auto& p : predictions) {
    double sum = 0.0;
    int matched = 0;
    for (std::size_t k = 0; k < p.positions.size(); ++k) {
      const std::size_t step = static_cast<std::size_t>(p.issued_at) + k + 1;
      if (step >= realized.size()) break;
      sum += (p.positions[k] - realized[step]).norm();
      ++matched;
    }
    if (matched == 0) continue;
    total += sum / matched;
    ++scored;
  }
  if (scored == 0) return std::nullopt;
  return total / scored;
}

}  // namespace atom
