///////////////////////////////////////////////////////////////////////////////
//
// Iterative linear-quadratic solver for open-loop Nash equilibria of the
// navigation game.
//
// Each iteration quadraticizes every player's cost around the current joint
// control iterate (Gauss-Newton: indefinite stage Hessians are projected onto
// the PSD cone) and solves the resulting LQ game exactly. With
// single-integrator dynamics the joint trajectory is affine in the stacked
// controls, so the LQ game's stationarity conditions form one dense linear
// system of size 2 * n * T which is solved directly.
//
// Speed caps are handled by radial clamping inside the line search plus an
// active set: a control sitting on its cap with an outward-pointing descent
// direction may only move tangentially, which keeps the iteration's fixed
// points on the constrained equilibrium rather than on the unconstrained one.
//
///////////////////////////////////////////////////////////////////////////////

#ifndef ATOM_GAME_ILQ_SOLVER_H
#define ATOM_GAME_ILQ_SOLVER_H

#include <utility>
#include <vector>

#include "atom/game/game_spec.h"

namespace atom {

struct IlqSolverOptions {
  double tolerance = 1e-4;   // max-norm of the control update
  int max_iterations = 50;
  double backtrack = 0.5;
  int max_halvings = 10;
  double psd_floor = 1e-6;
};

// Per-iteration diagnostics, recorded when a trace is passed to SolveIlq.
struct SolveTrace {
  std::vector<double> joint_cost;    // sum of player costs at each accepted iterate
  std::vector<double> residual;      // squared projected Nash residual
  std::vector<double> step_size;     // accepted line-search step
  std::vector<double> update_norm;   // max-norm of the full LQ update
};

class SolverDivergedError : public NumericalError {
 public:
  SolverDivergedError(const std::string& what, NashSolution last_stable)
      : NumericalError(what), last_stable_(std::move(last_stable)) {}
  const NashSolution& last_stable() const { return last_stable_; }

 private:
  NashSolution last_stable_;
};

// Solves for an open-loop Nash equilibrium from `start`.
//
// Without a warm start every player initially heads straight for its goal at
// min(cap, distance / (T * dt)). A warm start solved at an earlier timestep is
// shifted forward by the elapsed number of steps (repeating its last control).
//
// Throws ValidationError on malformed inputs and SolverDivergedError when an
// iterate produces a non-finite cost.
NashSolution SolveIlq(const JointState& start, const GameSpec& spec,
                      const BehaviorParams& params, const NashSolution* warm_start = nullptr,
                      const IlqSolverOptions& options = {}, SolveTrace* trace = nullptr);

// Squared projected Nash residual of a joint control profile: the squared
// norm of every player's own-control gradient, with the outward radial part
// removed for controls sitting on their speed cap.
double NashResidual(const JointState& start, const GameSpec& spec, const BehaviorParams& params,
                    const std::vector<ControlSequence>& controls);

}  // namespace atom

#endif  // ATOM_GAME_ILQ_SOLVER_H
