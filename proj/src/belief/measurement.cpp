#include "atom/belief/measurement.h"

namespace atom {

std::optional<Eigen::VectorXd> MeasureGame(const Eigen::VectorXd& point, const JointState& joint,
                                           const GameSpec& spec, const NashSolution* warm_start,
                                           int steps, const IlqSolverOptions& options) {
  if (steps < 1 || steps > spec.horizon) throw ValidationError("measurement steps out of range");
  const std::size_t n = joint.size();
  if (point.size() != static_cast<Eigen::Index>(2 * n)) {
    throw ValidationError("parameter vector does not match agent count");
  }
  NashSolution sol;
  try {
    sol = SolveIlq(joint, spec, BehaviorParams::Unflatten(point), warm_start, options);
  } catch (const SolverDivergedError&) {
    return std::nullopt;
  }
  Eigen::VectorXd y(2 * n * steps);
  for (int k = 0; k < steps; ++k) {
    for (std::size_t i = 0; i < n; ++i) y.segment<2>(2 * (k * n + i)) = sol.trajectories[i].position(k);
  }
  return y;
}

Eigen::VectorXd StackPositions(std::span<const JointState> states) {
  if (states.empty()) return {};
  const std::size_t n = states.front().size();
  Eigen::VectorXd y(2 * n * states.size());
  for (std::size_t k = 0; k < states.size(); ++k) {
    if (states[k].size() != n) throw ValidationError("agent count changed between states");
    for (std::size_t i = 0; i < n; ++i) y.segment<2>(2 * (k * n + i)) = states[k].position(i);
  }
  return y;
}

MeasurementFn GameMeasurementFn(const JointState& joint, const GameSpec& spec,
                                const NashSolution* warm_start, int steps,
                                const IlqSolverOptions& options) {
  return [&joint, &spec, warm_start, steps, options](const Eigen::VectorXd& point) {
    return MeasureGame(point, joint, spec, warm_start, steps, options);
  };
}

}  // namespace atom
