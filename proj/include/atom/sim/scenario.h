///////////////////////////////////////////////////////////////////////////////
//
// Experiment configuration: geometry, per-round ground-truth human
// parameters, predictor and planner settings.
//
///////////////////////////////////////////////////////////////////////////////

#ifndef ATOM_SIM_SCENARIO_H
#define ATOM_SIM_SCENARIO_H

#include <nlohmann/json.hpp>

#include <cstdint>
#include <string>
#include <vector>

#include "atom/belief/ukf.h"
#include "atom/core/geometry.h"
#include "atom/core/types.h"
#include "atom/game/game_spec.h"
#include "atom/planner/mpc.h"
#include "atom/predict/baselines.h"

namespace atom {

// Scripted human speeds must stay inside this range.
inline constexpr double kMinHumanSpeed = 0.35;
inline constexpr double kMaxHumanSpeed = 1.2;

struct BeliefSettings {
  AgentParams initial_mean{0.8, 1.5};
  double initial_variance = 0.25;
  double process_variance = 2.5e-3;
  double measurement_variance = 1e-3;
  int measurement_steps = 1;
  UkfHyper hyper;
};

struct ScenarioConfig {
  std::string name;
  std::vector<Vec2> starts;  // robot first
  std::vector<Vec2> goals;
  std::vector<Segment> obstacle;
  // Passage points (e.g. a doorway centre). An agent whose straight line to
  // its goal is blocked by the obstacle heads for a gate first.
  std::vector<Vec2> gates;
  int rounds = 8;
  double robot_speed_cap = 1.0;
  double dt = 0.2;
  int max_steps = 150;
  double goal_radius = 0.3;
  double collision_distance = 0.5;
  // schedule[r][h]: ground truth of human h (agent h + 1) in round r.
  std::vector<std::vector<AgentParams>> schedule;
  // Parameters the scripted humans attribute to the robot.
  AgentParams robot_model{1.0, 1.0};
  std::string predictor = "atom";
  int horizon = 12;  // T_f
  GameWeights game_weights;
  Vec2 x_min = Vec2(-5.0, -5.0);
  Vec2 x_max = Vec2(5.0, 5.0);
  BeliefSettings belief;
  bool reset_belief = false;
  PlannerConfig planner;
  SocialForceParams social_force;
  std::uint64_t seed = 0;

  std::size_t num_agents() const { return starts.size(); }
  std::size_t num_humans() const { return starts.size() - 1; }
  Obstacle MakeObstacle() const { return Obstacle(obstacle); }
};

// Throws ValidationError on any violated invariant.
void Validate(const ScenarioConfig& cfg);

// Built-in scenarios: "exchange" (2-agent position exchange), "corridor"
// (3-agent corridor overtake) and "doorway" (2-agent doorway negotiation).
ScenarioConfig ExchangeScenario();
ScenarioConfig CorridorScenario();
ScenarioConfig DoorwayScenario();
ScenarioConfig BuiltinScenario(const std::string& name);
std::vector<std::string> BuiltinScenarioNames();

// Linear interpolation from `first` to `last` over `rounds` rounds.
std::vector<AgentParams> LinearSchedule(AgentParams first, AgentParams last, int rounds);

// Game for the scripted world and for AToM: goals, obstacle, weights, boxes.
// Robot cap = scenario cap; human caps = top of the v_max box so that the
// behavioural v_max alone limits them.
GameSpec MakeGameSpec(const ScenarioConfig& cfg);

// Per-agent navigation targets at the given state: the goal itself if it is
// in sight, otherwise the reachable gate with the shortest path through it.
std::vector<Vec2> RoutedGoals(const ScenarioConfig& cfg, const Obstacle& obstacle,
                              const JointState& joint);

void to_json(nlohmann::json& j, const ScenarioConfig& cfg);
void from_json(const nlohmann::json& j, ScenarioConfig& cfg);

// Reads a config file. A "base" key names a built-in scenario whose values
// the remaining keys override.
ScenarioConfig LoadScenario(const std::string& path);
void SaveScenario(const ScenarioConfig& cfg, const std::string& path);

}  // namespace atom

#endif  // ATOM_SIM_SCENARIO_H
