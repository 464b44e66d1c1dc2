#include "atom/core/dynamics.h"

#include <algorithm>

namespace atom {

AgentState StepDynamics(const AgentState& state, const Control& control, double dt) {
  if (!IsFinite(state.position) || !IsFinite(control.velocity) || !std::isfinite(dt)) {
    throw ValidationError("non-finite input to StepDynamics");
  }
  if (!(dt > 0.0)) throw ValidationError("dt must be positive");
  return {state.position + control.velocity * dt};
}

Vec2 ClampSpeed(const Vec2& velocity, double cap) {
  const double speed = velocity.norm();
  if (speed <= cap) return velocity;
  if (cap <= 0.0) return Vec2::Zero();
  return velocity * (cap / speed);
}

std::vector<double> EffectiveSpeedCaps(const BehaviorParams& params,
                                       std::span<const double> scenario_caps) {
  if (scenario_caps.size() != params.size()) {
    throw ValidationError("speed cap count does not match parameter count");
  }
  std::vector<double> caps(params.size());
  for (std::size_t i = 0; i < caps.size(); ++i) {
    caps[i] = std::min(params.per_agent[i].v_max, scenario_caps[i]);
  }
  return caps;
}

std::vector<Trajectory> Rollout(const JointState& start,
                                std::span<const ControlSequence> controls,
                                std::span<const double> speed_caps) {
  if (controls.size() != start.size() || speed_caps.size() != start.size()) {
    throw ValidationError("rollout needs one control sequence and cap per agent");
  }
  const std::size_t horizon = controls.empty() ? 0 : controls[0].size();
  for (const auto& seq : controls) {
    if (seq.size() != horizon) throw ValidationError("control sequences differ in horizon");
  }
  std::vector<Trajectory> out(start.size());
  for (std::size_t i = 0; i < start.size(); ++i) {
    Trajectory& traj = out[i];
    traj.dt = start.dt;
    traj.start_index = start.timestep_index + 1;
    traj.states.reserve(horizon);
    AgentState s = start.agents[i];
    for (std::size_t k = 0; k < horizon; ++k) {
      s = StepDynamics(s, {ClampSpeed(controls[i][k].velocity, speed_caps[i])}, start.dt);
      traj.states.push_back(s);
    }
  }
  return out;
}

std::vector<Trajectory> Rollout(const JointState& start,
                                std::span<const ControlSequence> controls,
                                const BehaviorParams& params,
                                std::span<const double> scenario_caps) {
  const auto caps = EffectiveSpeedCaps(params, scenario_caps);
  return Rollout(start, controls, caps);
}

}  // namespace atom
