///////////////////////////////////////////////////////////////////////////////
//
// Uniform human-predictor interface shared by AToM and the baselines.
//
// A predictor sees the observed joint history, the goals and the obstacle. It
// never sees the robot planner. Observe() is called once per executed step
// with the states before and after the step.
//
///////////////////////////////////////////////////////////////////////////////

#ifndef ATOM_PREDICT_PREDICTOR_H
#define ATOM_PREDICT_PREDICTOR_H

#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "atom/belief/ukf.h"
#include "atom/core/geometry.h"
#include "atom/core/types.h"

namespace atom {

struct PredictionContext {
  std::span<const JointState> history;  // oldest first; back() is the current state
  std::span<const Vec2> goals;          // per agent, robot first
  const Obstacle* obstacle = nullptr;

  const JointState& current() const { return history.back(); }
};

struct PredictionDiagnostics {
  int solver_iterations = 0;
  bool solver_converged = true;
  bool fallback = false;        // constant-velocity prediction substituted
  bool update_applied = false;  // set by the most recent Observe()
  std::string note;
};

struct PredictionBundle {
  std::vector<Trajectory> humans;                // one per human (agents 1..n-1), T_f states
  std::optional<Trajectory> robot_by_human;      // human-predicted robot motion, if modelled
  std::optional<BeliefState> belief;             // belief the prediction was made with
  PredictionDiagnostics diagnostics;
};

class HumanPredictor {
 public:
  virtual ~HumanPredictor() = default;

  virtual std::string name() const = 0;
  virtual int horizon() const = 0;
  virtual PredictionBundle Predict(const PredictionContext& ctx) = 0;

  // Executed step from `before` to `after`. Stateless predictors ignore it.
  virtual void Observe(const JointState& before, const JointState& after) {
    (void)before;
    (void)after;
  }

  // Called at the start of every round (agents teleported back to their starts).
  virtual void BeginRound() {}

  virtual std::optional<BeliefState> belief() const { return std::nullopt; }
  virtual PredictionDiagnostics last_update() const { return {}; }
};

// Per-agent trajectories over the joint history (one state per history entry).
std::vector<Trajectory> SplitHistory(std::span<const JointState> history);

// (p_t - p_{t-1}) / dt per agent, zero when the history has one state.
std::vector<Vec2> LastVelocities(std::span<const JointState> history);

}  // namespace atom

#endif  // ATOM_PREDICT_PREDICTOR_H
