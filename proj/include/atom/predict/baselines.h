///////////////////////////////////////////////////////////////////////////////
//
// Stateless baseline predictors: constant velocity and Social Force.
//
///////////////////////////////////////////////////////////////////////////////

#ifndef ATOM_PREDICT_BASELINES_H
#define ATOM_PREDICT_BASELINES_H

#include <span>
#include <vector>

#include "atom/core/geometry.h"
#include "atom/core/types.h"

namespace atom {

// Holds the last observed velocity (p_t - p_{t-1}) / dt for `horizon` steps.
// A single-state history predicts a stationary agent.
Trajectory CvPredict(const Trajectory& history, int horizon);

std::vector<Trajectory> CvPredict(std::span<const Trajectory> histories, int horizon);

struct SocialForceParams {
  double goal_gain = 1.0;           // k_g, 1/s: desired speed is min(v_des, k_g * distance)
  double neighbor_strength = 3.0;   // A_n, m/s^2
  double neighbor_range = 0.4;      // B_n, m
  double obstacle_strength = 5.0;   // A_o, m/s^2
  double obstacle_range = 0.25;     // B_o, m
  double relaxation_time = 0.5;     // tau, s
  double desired_speed = 1.0;       // v_des, m/s
  double radius = 0.4;              // r, m, contact distance in the exponentials
};

// Throws ValidationError unless every field is positive and finite.
void Validate(const SocialForceParams& params);

// Magnitude A * exp((r - distance) / B) of one exponential repulsion term.
double Repulsion(double strength, double range, double radius, double distance);

// Integrates the Social Force model for `horizon` steps of joint.dt:
//
//   a = (v0 * g_hat - v) / tau + sum_n A_n exp((r - d_n) / B_n) n_hat
//                              + A_o exp((r - d_o) / B_o) n_hat_o
//   v <- clamp(v + a * dt, v_des),  p <- p + v * dt
//
// with v0 = min(v_des, k_g * |g - p|). Agents flagged in `constant_velocity`
// are not driven by forces and keep their initial velocity; they still repel
// the others. Coincident agents repel along the left perpendicular of the
// affected agent's goal direction. Returns one trajectory per agent.
std::vector<Trajectory> SfPredict(const JointState& joint, std::span<const Vec2> velocities,
                                  std::span<const Vec2> goals, const Obstacle& obstacle,
                                  const SocialForceParams& params, int horizon,
                                  const std::vector<bool>& constant_velocity = {});

}  // namespace atom

#endif  // ATOM_PREDICT_BASELINES_H
