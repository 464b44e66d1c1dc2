///////////////////////////////////////////////////////////////////////////////
//
// Shared domain types: planar positions/velocities, joint states,
// trajectories and per-agent behavioural parameters.
//
// Agent 0 of every joint quantity is the robot; agents 1..n-1 are humans.
//
///////////////////////////////////////////////////////////////////////////////

#ifndef ATOM_CORE_TYPES_H
#define ATOM_CORE_TYPES_H

#include <Eigen/Core>

#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace atom {

using Vec2 = Eigen::Vector2d;

// Thrown on malformed inputs (non-finite values, mismatched sizes, ...).
class ValidationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Thrown when a factorization or numerical routine fails irrecoverably.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline bool IsFinite(const Vec2& v) { return std::isfinite(v.x()) && std::isfinite(v.y()); }

struct AgentState {
  Vec2 position = Vec2::Zero();
};

// Single-integrator control: a commanded velocity in m/s.
struct Control {
  Vec2 velocity = Vec2::Zero();
};

struct JointState {
  std::vector<AgentState> agents;  // agents[0] is the robot
  int timestep_index = 0;
  double dt = 0.2;

  std::size_t size() const { return agents.size(); }
  const Vec2& position(std::size_t i) const { return agents[i].position; }
  std::vector<Vec2> Positions() const;
};

// Throws ValidationError unless the joint state has >= 2 finite agents and dt > 0.
void Validate(const JointState& joint);

// States x^{start_index} ... sampled every dt seconds for one agent.
struct Trajectory {
  std::vector<AgentState> states;
  int start_index = 0;
  double dt = 0.2;

  std::size_t size() const { return states.size(); }
  bool empty() const { return states.empty(); }
  const Vec2& position(std::size_t k) const { return states[k].position; }
};

// True if every consecutive displacement (starting from `from`, when given)
// is at most v_cap * dt + eps.
bool RespectsSpeedCap(const Trajectory& trajectory, double v_cap, double eps = 1e-9,
                      const Vec2* from = nullptr);

// Estimation box for behavioural parameters. The lower speed bound keeps the
// solver away from a degenerate zero-speed cap.
inline constexpr double kMinSpeedParam = 0.05;
inline constexpr double kMaxSpeedParam = 2.0;
inline constexpr double kMinSocialParam = 0.0;
inline constexpr double kMaxSocialParam = 5.0;

struct AgentParams {
  double v_max = 0.8;  // m/s
  double d = 1.5;      // preferred social radius, m
};

bool WithinBox(const AgentParams& p);
AgentParams ClampToBox(const AgentParams& p);

// theta, stacked over agents as [v_max_0, d_0, v_max_1, d_1, ...].
struct BehaviorParams {
  std::vector<AgentParams> per_agent;

  std::size_t size() const { return per_agent.size(); }
  Eigen::VectorXd Flatten() const;
  static BehaviorParams Unflatten(const Eigen::VectorXd& flat);
};

void Validate(const BehaviorParams& params, std::size_t n_agents);

}  // namespace atom

#endif  // ATOM_CORE_TYPES_H
