///////////////////////////////////////////////////////////////////////////////
//
// Sampling-based receding-horizon robot planner.
//
// Candidate control sequences are drawn around a straight-to-goal nominal:
// each sample veers off the goal heading by a Gaussian angle for a random
// number of steps and then heads back to the goal, at a Gaussian fraction of
// the speed cap. A sample is feasible if its rollout keeps r_col from every
// predicted human at the matching step and obstacle_clearance from the
// obstacle. The cheapest feasible sample wins (ties by lowest index).
//
///////////////////////////////////////////////////////////////////////////////

#ifndef ATOM_PLANNER_MPC_H
#define ATOM_PLANNER_MPC_H

#include <cstdint>
#include <span>
#include <vector>

#include "atom/core/dynamics.h"
#include "atom/core/geometry.h"
#include "atom/core/types.h"

namespace atom {

struct PlannerConfig {
  int horizon = 12;                 // T_p
  int samples = 256;                // N
  double goal_weight = 1.0;
  double effort_weight = 0.1;
  double clearance_weight = 10.0;
  double clearance_margin = 1.0;    // m, soft clearance below which cost accrues
  double r_col = 0.5;               // m, hard clearance from predicted humans
  double obstacle_clearance = 0.25; // m, hard clearance from the obstacle
  double speed_cap = 1.0;           // m/s
  double dt = 0.2;
  double heading_sigma = 0.8;       // rad
  double speed_sigma = 0.3;         // fraction of the cap
  std::uint64_t seed = 0;
};

void Validate(const PlannerConfig& cfg);

struct PlanResult {
  ControlSequence controls;  // length T_p
  Trajectory trajectory;     // robot rollout, T_p states after the start
  double cost = 0.0;
  bool feasible = false;
  double min_clearance = 0.0;  // to predicted humans and obstacle (inf if none)
  int sample_index = -1;
};

// Deterministic for a fixed cfg.seed and `step` (which reseeds per call so
// that successive steps draw fresh samples). An optional previous plan is
// shifted by one step and offered as an extra candidate.
PlanResult Plan(const AgentState& robot, int timestep_index,
                std::span<const Trajectory> predicted_humans, const Vec2& goal,
                const Obstacle& obstacle, const PlannerConfig& cfg, std::uint64_t step = 0,
                const PlanResult* previous = nullptr);

// The first planned control; throws ValidationError on an empty plan.
Control ExecuteFirst(const PlanResult& plan);

// Position of a predicted trajectory at step k, holding the last state when
// the prediction is shorter than k + 1.
Vec2 PredictedAt(const Trajectory& prediction, std::size_t k);

// Minimum over steps of the distance between the robot rollout and each
// predicted human at the matching step (hold-last extension).
double MinHumanClearance(const Trajectory& robot, std::span<const Trajectory> humans);

}  // namespace atom

#endif  // ATOM_PLANNER_MPC_H
