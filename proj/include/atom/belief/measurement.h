#ifndef ATOM_BELIEF_MEASUREMENT_H
#define ATOM_BELIEF_MEASUREMENT_H

#include <Eigen/Core>

#include <optional>
#include <span>

#include "atom/belief/ukf.h"
#include "atom/game/game_spec.h"
#include "atom/game/ilq_solver.h"

namespace atom {

// Game-model measurement: solve the game from `joint` with the given
// parameters and return the stacked positions of all agents over the first
// `steps` rollout steps, ordered [x_0(t+1), x_1(t+1), ..., x_0(t+2), ...].
// Returns std::nullopt when the solver diverges.
std::optional<Eigen::VectorXd> MeasureGame(const Eigen::VectorXd& point, const JointState& joint,
                                           const GameSpec& spec,
                                           const NashSolution* warm_start = nullptr,
                                           int steps = 1, const IlqSolverOptions& options = {});

// Stacks a list of joint states in the same order as MeasureGame.
Eigen::VectorXd StackPositions(std::span<const JointState> states);

// Binds MeasureGame to a fixed state and warm start for UpdateStep.
MeasurementFn GameMeasurementFn(const JointState& joint, const GameSpec& spec,
                                const NashSolution* warm_start = nullptr, int steps = 1,
                                const IlqSolverOptions& options = {});

}  // namespace atom

#endif  // ATOM_BELIEF_MEASUREMENT_H
