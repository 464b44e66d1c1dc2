#include "atom/predict/baselines.h"

#include <cmath>

#include "atom/core/dynamics.h"

namespace atom {
namespace {

Vec2 LeftPerpendicular(const Vec2& v) { return Vec2(-v.y(), v.x()); }

Vec2 GoalDirection(const Vec2& position, const Vec2& goal) {
  const Vec2 to_goal = goal - position;
  const double dist = to_goal.norm();
  return dist > 1e-12 ? Vec2(to_goal / dist) : Vec2::Zero();
}

}  // namespace

Trajectory CvPredict(const Trajectory& history, int horizon) {
  if (history.empty()) throw ValidationError("empty history");
  if (horizon < 1) throw ValidationError("horizon must be positive");
  const std::size_t last = history.size() - 1;
  const Vec2 step = last > 0 ? Vec2(history.position(last) - history.position(last - 1))
                             : Vec2::Zero();
  Trajectory out;
  out.dt = history.dt;
  out.start_index = history.start_index + static_cast<int>(last) + 1;
  out.states.reserve(horizon);
  for (int k = 1; k <= horizon; ++k) out.states.push_back({history.position(last) + k * step});
  return out;
}

std::vector<Trajectory> CvPredict(std::span<const Trajectory> histories, int horizon) {
  std::vector<Trajectory> out;
  out.reserve(histories.size());
  for (const auto& h : histories) out.push_back(CvPredict(h, horizon));
  return out;
}

void Validate(const SocialForceParams& p) {
  for (double v : {p.goal_gain, p.neighbor_strength, p.neighbor_range, p.obstacle_strength,
                   p.obstacle_range, p.relaxation_time, p.desired_speed, p.radius}) {
    if (!(v > 0.0) || !std::isfinite(v)) throw ValidationError("social force parameters must be positive");
  }
}

double Repulsion(double strength, double range, double radius, double distance) {
  return strength * std::exp((radius - distance) / range);
}

std::vector<Trajectory> SfPredict(const JointState& joint, std::span<const Vec2> velocities,
                                  std::span<const Vec2> goals, const Obstacle& obstacle,
                                  const SocialForceParams& params, int horizon,
                                  const std::vector<bool>& constant_velocity) {
  Validate(params);
  const std::size_t n = joint.size();
  if (velocities.size() != n || goals.size() != n) {
    throw ValidationError("velocities and goals must match the agent count");
  }
  if (!constant_velocity.empty() && constant_velocity.size() != n) {
    throw ValidationError("constant-velocity flags must match the agent count");
  }
  if (horizon < 1) throw ValidationError("horizon must be positive");
  const double dt = joint.dt;

  std::vector<Vec2> p = joint.Positions();
  std::vector<Vec2> v(velocities.begin(), velocities.end());
  std::vector<Trajectory> out(n);
  for (auto& t : out) {
    t.dt = dt;
    t.start_index = joint.timestep_index + 1;
    t.states.reserve(horizon);
  }

  std::vector<Vec2> accel(n);
  for (int k = 0; k < horizon; ++k) {
    for (std::size_t i = 0; i < n; ++i) {
      accel[i].setZero();
      if (!constant_velocity.empty() && constant_velocity[i]) continue;
      const Vec2 g_hat = GoalDirection(p[i], goals[i]);
      const double v0 = std::min(params.desired_speed, params.goal_gain * (goals[i] - p[i]).norm());
      Vec2 a = (v0 * g_hat - v[i]) / params.relaxation_time;
      for (std::size_t m = 0; m < n; ++m) {
        if (m == i) continue;
        const Vec2 diff = p[i] - p[m];
        const double dist = diff.norm();
        const Vec2 dir = dist > 1e-12 ? Vec2(diff / dist) : LeftPerpendicular(g_hat);
        a += Repulsion(params.neighbor_strength, params.neighbor_range, params.radius, dist) * dir;
      }
      const ObstacleProximity prox = NearestObstaclePoint(p[i], obstacle);
      if (std::isfinite(prox.distance)) {
        const Vec2 diff = p[i] - prox.closest;
        const Vec2 dir = prox.distance > 1e-12 ? Vec2(diff / prox.distance) : LeftPerpendicular(g_hat);
        a += Repulsion(params.obstacle_strength, params.obstacle_range, params.radius,
                       prox.distance) * dir;
      }
      accel[i] = a;
    }
    // Synchronous update: every agent reacts to the same snapshot.
    for (std::size_t i = 0; i < n; ++i) {
      if (constant_velocity.empty() || !constant_velocity[i]) {
        v[i] = ClampSpeed(v[i] + accel[i] * dt, params.desired_speed);
      }
      p[i] += v[i] * dt;
      out[i].states.push_back({p[i]});
    }
  }
  return out;
}

}  // namespace atom
