#include "atom/planner/mpc.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include <Eigen/Geometry>

namespace atom {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct Evaluation {
  Trajectory trajectory;
  double cost = 0.0;
  double human_clearance = kInf;
  double obstacle_clearance = kInf;
};

Trajectory RollOut(const AgentState& robot, int timestep_index, const ControlSequence& u,
                   double dt) {
  Trajectory t;
  t.dt = dt;
  t.start_index = timestep_index + 1;
  t.states.reserve(u.size());
  AgentState s = robot;
  for (const auto& c : u) {
    s = StepDynamics(s, c, dt);
    t.states.push_back(s);
  }
  return t;
}

Evaluation Evaluate(const AgentState& robot, int timestep_index, const ControlSequence& u,
                    std::span<const Trajectory> humans, const Vec2& goal, const Obstacle& obstacle,
                    const PlannerConfig& cfg) {
  Evaluation e;
  e.trajectory = RollOut(robot, timestep_index, u, cfg.dt);
  for (std::size_t k = 0; k < u.size(); ++k) {
    const Vec2& p = e.trajectory.position(k);
    double d_min = kInf;
    for (const auto& h : humans) d_min = std::min(d_min, (p - PredictedAt(h, k)).norm());
    e.human_clearance = std::min(e.human_clearance, d_min);
    e.obstacle_clearance = std::min(e.obstacle_clearance, DistanceToObstacle(p, obstacle));
    const double soft = std::max(0.0, cfg.clearance_margin - d_min);
    e.cost += cfg.goal_weight * (p - goal).norm() + cfg.effort_weight * u[k].velocity.squaredNorm() +
              cfg.clearance_weight * soft * soft;
  }
  return e;
}

// Heads toward the goal at `speed`, never overshooting it within one step.
Vec2 TowardGoal(const Vec2& from, const Vec2& goal, double speed, double dt) {
  const Vec2 to_goal = goal - from;
  const double dist = to_goal.norm();
  if (dist < 1e-12) return Vec2::Zero();
  return to_goal / dist * std::min(speed, dist / dt);
}

ControlSequence Nominal(const AgentState& robot, const Vec2& goal, const PlannerConfig& cfg,
                        double speed) {
  ControlSequence u(cfg.horizon);
  Vec2 p = robot.position;
  for (auto& c : u) {
    c.velocity = TowardGoal(p, goal, speed, cfg.dt);
    p += c.velocity * cfg.dt;
  }
  return u;
}

ControlSequence Veer(const AgentState& robot, const Vec2& goal, const PlannerConfig& cfg,
                     double angle, int veer_steps, double speed) {
  ControlSequence u(cfg.horizon);
  Vec2 p = robot.position;
  const Eigen::Rotation2Dd rot(angle);
  for (int k = 0; k < cfg.horizon; ++k) {
    Vec2 v = TowardGoal(p, goal, speed, cfg.dt);
    if (k < veer_steps) {
      const Vec2 to_goal = goal - p;
      const Vec2 dir = to_goal.norm() > 1e-12 ? Vec2(to_goal.normalized()) : Vec2(1.0, 0.0);
      v = rot * dir * speed;
    }
    u[k].velocity = ClampSpeed(v, cfg.speed_cap);
    p += u[k].velocity * cfg.dt;
  }
  return u;
}

}  // namespace

void Validate(const PlannerConfig& cfg) {
  if (cfg.horizon < 1) throw ValidationError("planner horizon must be positive");
  if (cfg.samples < 1) throw ValidationError("planner needs at least one sample");
  if (!(cfg.r_col > 0.0)) throw ValidationError("r_col must be positive");
  if (!(cfg.obstacle_clearance >= 0.0)) throw ValidationError("obstacle clearance must be >= 0");
  if (!(cfg.speed_cap > 0.0)) throw ValidationError("speed cap must be positive");
  if (!(cfg.dt > 0.0)) throw ValidationError("dt must be positive");
  for (double w : {cfg.goal_weight, cfg.effort_weight, cfg.clearance_weight, cfg.clearance_margin,
                   cfg.heading_sigma, cfg.speed_sigma}) {
    if (!(w >= 0.0) || !std::isfinite(w)) throw ValidationError("planner weights must be >= 0");
  }
}

Vec2 PredictedAt(const Trajectory& prediction, std::size_t k) {
  if (prediction.empty()) throw ValidationError("empty prediction");
  return prediction.position(std::min(k, prediction.size() - 1));
}

double MinHumanClearance(const Trajectory& robot, std::span<const Trajectory> humans) {
  double d = kInf;
  for (std::size_t k = 0; k < robot.size(); ++k) {
    for (const auto& h : humans) d = std::min(d, (robot.position(k) - PredictedAt(h, k)).norm());
  }
  return d;
}

PlanResult Plan(const AgentState& robot, int timestep_index,
                std::span<const Trajectory> predicted_humans, const Vec2& goal,
                const Obstacle& obstacle, const PlannerConfig& cfg, std::uint64_t step,
                const PlanResult* previous) {
  Validate(cfg);
  if (!IsFinite(robot.position) || !IsFinite(goal)) throw ValidationError("non-finite planner input");
  for (const auto& h : predicted_humans) {
    if (h.empty()) throw ValidationError("empty human prediction");
  }

  std::vector<ControlSequence> candidates;
  candidates.reserve(cfg.samples + 1);
  candidates.push_back(Nominal(robot, goal, cfg, cfg.speed_cap));
  if (cfg.samples > 1) candidates.push_back(ControlSequence(cfg.horizon));  // stop
  if (previous != nullptr && previous->controls.size() == static_cast<std::size_t>(cfg.horizon) &&
      cfg.samples > 2) {
    ControlSequence shifted(previous->controls.begin() + 1, previous->controls.end());
    shifted.push_back(previous->controls.back());
    for (auto& c : shifted) c.velocity = ClampSpeed(c.velocity, cfg.speed_cap);
    candidates.push_back(std::move(shifted));
  }
  std::seed_seq seq{cfg.seed, step};
  std::mt19937_64 rng(seq);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_int_distribution<int> veer_steps(1, cfg.horizon);
  while (candidates.size() < static_cast<std::size_t>(cfg.samples)) {
    const double angle = cfg.heading_sigma * normal(rng);
    const int steps = veer_steps(rng);
    const double speed =
        cfg.speed_cap * std::clamp(1.0 + cfg.speed_sigma * normal(rng), 0.0, 1.0);
    candidates.push_back(Veer(robot, goal, cfg, angle, steps, speed));
  }

  // Feasible samples compete on cost; if none is feasible, the sample that
  // comes closest to satisfying both clearance bounds is returned.
  int best = -1;
  double best_cost = kInf;
  int safest = -1;
  double safest_margin = -kInf;
  std::vector<Evaluation> evals;
  evals.reserve(candidates.size());
  for (std::size_t s = 0; s < candidates.size(); ++s) {
    evals.push_back(Evaluate(robot, timestep_index, candidates[s], predicted_humans, goal, obstacle, cfg));
    const Evaluation& e = evals.back();
    const double margin = std::min(e.human_clearance - cfg.r_col,
                                   e.obstacle_clearance - cfg.obstacle_clearance);
    if (margin >= 0.0 && e.cost < best_cost) {
      best = static_cast<int>(s);
      best_cost = e.cost;
    }
    if (margin > safest_margin) {
      safest = static_cast<int>(s);
      safest_margin = margin;
    }
  }
  const bool feasible = best >= 0;
  const int pick = feasible ? best : safest;
  Evaluation& e = evals[pick];
  return {std::move(candidates[pick]), std::move(e.trajectory), e.cost, feasible,
          std::min(e.human_clearance, e.obstacle_clearance), pick};
}

Control ExecuteFirst(const PlanResult& plan) {
  if (plan.controls.empty()) throw ValidationError("empty plan");
  return plan.controls.front();
}

}  // namespace atom
