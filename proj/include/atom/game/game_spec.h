///////////////////////////////////////////////////////////////////////////////
//
// Finite-horizon general-sum navigation game. Every player i minimizes
//
//   sum_k (x_i - g_i)' Q (x_i - g_i) + u_i' R u_i
//         + w_s * sum_{n != i} max(0, d_i - |x_i - x_n|)^2
//         + w_o * max(0, d_o - D(x_i, O))^2
//         + (quadratic penalty outside the world box)
//
// over its own velocity sequence, with |u_i| <= min(v_max_i, u_max_i).
// The per-agent social radius d_i and speed limit v_max_i come from the
// behavioural parameters supplied at solve time.
//
///////////////////////////////////////////////////////////////////////////////

#ifndef ATOM_GAME_GAME_SPEC_H
#define ATOM_GAME_GAME_SPEC_H

#include <Eigen/Core>

#include <span>
#include <vector>

#include "atom/core/dynamics.h"
#include "atom/core/geometry.h"
#include "atom/core/types.h"

namespace atom {

struct GameWeights {
  Eigen::Matrix2d state = Eigen::Matrix2d::Identity();    // Q, PSD
  Eigen::Matrix2d control = Eigen::Matrix2d::Identity();  // R, PD
  double social = 20.0;                                   // w_s
  double obstacle = 20.0;                                 // w_o
  double obstacle_distance = 0.4;                         // d_o, m
  double bounds_penalty = 1e3;
};

struct GameSpec {
  std::vector<Vec2> goals;
  Obstacle obstacle;
  int horizon = 12;
  double dt = 0.2;
  GameWeights weights;
  Vec2 x_min = Vec2(-5.0, -5.0);
  Vec2 x_max = Vec2(5.0, 5.0);
  std::vector<double> u_max;  // per-agent scenario speed caps

  std::size_t num_players() const { return goals.size(); }
};

// Checks the structural invariants (Q PSD, R PD, horizon, sizes, finiteness).
void Validate(const GameSpec& spec);

struct NashSolution {
  std::vector<ControlSequence> controls;  // one per player, length T_f
  std::vector<Trajectory> trajectories;   // rollout of `controls` from the start
  std::vector<double> costs;              // per-player total cost
  int iterations = 0;
  bool converged = false;
  double max_update_norm = 0.0;
  int start_index = 0;  // timestep of the joint state the game was solved at
};

// Player i's cost at one stage, evaluated at the joint positions reached after
// applying `control`.
double StageCost(std::size_t player, std::span<const Vec2> joint_positions,
                 const Control& control, const GameSpec& spec, const BehaviorParams& params);

// Sum of StageCost over the horizon.
double EvaluateCost(std::size_t player, std::span<const Trajectory> trajectories,
                    std::span<const ControlSequence> controls, const GameSpec& spec,
                    const BehaviorParams& params);

// Second-order expansion of the state-dependent part of a player's stage cost
// with respect to the stacked joint position (2n).
struct StateCostExpansion {
  double value = 0.0;
  Eigen::VectorXd gradient;
  Eigen::MatrixXd hessian;  // exact, possibly indefinite
};

StateCostExpansion ExpandStateCost(std::size_t player, std::span<const Vec2> joint_positions,
                                   const GameSpec& spec, const BehaviorParams& params);

}  // namespace atom

#endif  // ATOM_GAME_GAME_SPEC_H
