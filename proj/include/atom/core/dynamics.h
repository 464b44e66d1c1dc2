///////////////////////////////////////////////////////////////////////////////
//
// Single-integrator agent dynamics and open-loop rollouts.
//
///////////////////////////////////////////////////////////////////////////////

#ifndef ATOM_CORE_DYNAMICS_H
#define ATOM_CORE_DYNAMICS_H

#include <span>
#include <vector>

#include "atom/core/types.h"

namespace atom {

// position' = position + velocity * dt, with no rounding beyond the two flops.
AgentState StepDynamics(const AgentState& state, const Control& control, double dt);

// Scales `velocity` radially so that its norm does not exceed `cap`.
Vec2 ClampSpeed(const Vec2& velocity, double cap);

// min(v_max_i, scenario_cap_i) for every agent.
std::vector<double> EffectiveSpeedCaps(const BehaviorParams& params,
                                       std::span<const double> scenario_caps);

using ControlSequence = std::vector<Control>;

// Integrates every agent's control sequence (clamped to its cap) from `start`.
// Returns one trajectory per agent holding the T states after `start`.
std::vector<Trajectory> Rollout(const JointState& start,
                                std::span<const ControlSequence> controls,
                                std::span<const double> speed_caps);

std::vector<Trajectory> Rollout(const JointState& start,
                                std::span<const ControlSequence> controls,
                                const BehaviorParams& params,
                                std::span<const double> scenario_caps);

}  // namespace atom

#endif  // ATOM_CORE_DYNAMICS_H
