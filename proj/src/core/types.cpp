#include "atom/core/types.h"

#include <algorithm>

namespace atom {

std::vector<Vec2> JointState::Positions() const {
  std::vector<Vec2> out;
  out.reserve(agents.size());
  for (const auto& a : agents) out.push_back(a.position);
  return out;
}

void Validate(const JointState& joint) {
  if (joint.agents.size() < 2) throw ValidationError("joint state needs at least two agents");
  if (!(joint.dt > 0.0) || !std::isfinite(joint.dt)) throw ValidationError("dt must be positive");
  for (const auto& a : joint.agents) {
    if (!IsFinite(a.position)) throw ValidationError("non-finite agent position");
  }
}

bool RespectsSpeedCap(const Trajectory& trajectory, double v_cap, double eps, const Vec2* from) {
  const double bound = v_cap * trajectory.dt + eps;
  const Vec2* prev = from;
  for (const auto& s : trajectory.states) {
    if (prev != nullptr && (s.position - *prev).norm() > bound) return false;
    prev = &s.position;
  }
  return true;
}

bool WithinBox(const AgentParams& p) {
  return p.v_max >= kMinSpeedParam && p.v_max <= kMaxSpeedParam && p.d >= kMinSocialParam &&
         p.d <= kMaxSocialParam;
}

AgentParams ClampToBox(const AgentParams& p) {
  return {std::clamp(p.v_max, kMinSpeedParam, kMaxSpeedParam),
          std::clamp(p.d, kMinSocialParam, kMaxSocialParam)};
}

Eigen::VectorXd BehaviorParams::Flatten() const {
  Eigen::VectorXd flat(2 * per_agent.size());
  for (std::size_t i = 0; i < per_agent.size(); ++i) {
    flat(2 * i) = per_agent[i].v_max;
    flat(2 * i + 1) = per_agent[i].d;
  }
  return flat;
}

BehaviorParams BehaviorParams::Unflatten(const Eigen::VectorXd& flat) {
  if (flat.size() % 2 != 0) throw ValidationError("flattened parameters must have even length");
  BehaviorParams out;
  out.per_agent.resize(flat.size() / 2);
  for (std::size_t i = 0; i < out.per_agent.size(); ++i) {
    out.per_agent[i] = {flat(2 * i), flat(2 * i + 1)};
  }
  return out;
}

void Validate(const BehaviorParams& params, std::size_t n_agents) {
  if (params.size() != n_agents) throw ValidationError("parameter count does not match agents");
  for (const auto& p : params.per_agent) {
    if (!std::isfinite(p.v_max) || !std::isfinite(p.d) || !WithinBox(p)) {
      throw ValidationError("behaviour parameters outside the estimation box");
    }
  }
}

}  // namespace atom
