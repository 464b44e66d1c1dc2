///////////////////////////////////////////////////////////////////////////////
//
// One interactive episode loop: predict, plan, let the humans act, advance
// everyone simultaneously, observe, update.
//
// Human controls for step k are computed from the joint state at k only; the
// session asks for them before the robot's step-k control is known to anyone
// but the session itself, and applies both in the same transition.
//
///////////////////////////////////////////////////////////////////////////////

#ifndef ATOM_SIM_SESSION_H
#define ATOM_SIM_SESSION_H

#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "atom/game/ilq_solver.h"
#include "atom/planner/mpc.h"
#include "atom/predict/predictor.h"
#include "atom/sim/scenario.h"

namespace atom {

class RobotPlanner {
 public:
  virtual ~RobotPlanner() = default;
  virtual PlanResult Plan(const JointState& joint, std::span<const Trajectory> predicted_humans,
                          const Vec2& goal, const Obstacle& obstacle) = 0;
  virtual void BeginRound() {}
};

// Sampling MPC, reseeded per (round, step) and warm-started from its last plan.
class SamplingPlanner : public RobotPlanner {
 public:
  explicit SamplingPlanner(PlannerConfig cfg) : cfg_(cfg) { Validate(cfg_); }
  PlanResult Plan(const JointState& joint, std::span<const Trajectory> predicted_humans,
                  const Vec2& goal, const Obstacle& obstacle) override;
  void BeginRound() override;
  void set_round(int round) { round_ = round; }

 private:
  PlannerConfig cfg_;
  int round_ = 0;
  std::optional<PlanResult> previous_;
};

// Never moves. Used to check that predictor and humans do not depend on the planner.
class StationaryPlanner : public RobotPlanner {
 public:
  explicit StationaryPlanner(int horizon, double dt) : horizon_(horizon), dt_(dt) {}
  PlanResult Plan(const JointState& joint, std::span<const Trajectory> predicted_humans,
                  const Vec2& goal, const Obstacle& obstacle) override;

 private:
  int horizon_;
  double dt_;
};

struct HumanAction {
  std::vector<Control> controls;  // one per human
  bool fallback = false;          // a model failure forced a fallback policy
};

class HumanPolicy {
 public:
  virtual ~HumanPolicy() = default;
  // Sees only the current joint state (and its own internal state).
  virtual HumanAction Act(const JointState& joint) = 0;
  virtual void BeginRound(int round) { (void)round; }
};

// Simulated humans that solve their own game with the round's ground-truth
// parameters and execute the first control. All humans share one solve
// (their models agree on everybody's parameters); the robot is modelled with
// cfg.robot_model. Falls back to Social Force if the solver diverges.
class ScriptedHumans : public HumanPolicy {
 public:
  explicit ScriptedHumans(const ScenarioConfig& cfg);
  HumanAction Act(const JointState& joint) override;
  void BeginRound(int round) override;

  const BehaviorParams& params() const { return params_; }

 private:
  ScenarioConfig cfg_;
  GameSpec spec_;
  BehaviorParams params_;
  std::optional<NashSolution> warm_;
  std::optional<JointState> previous_;
};

struct StepRecord {
  int round = 0;
  int step = 0;  // timestep index of `state` within the round
  JointState state;
  JointState next;
  std::vector<Control> controls;  // executed, robot first
  PredictionBundle prediction;
  PlanResult plan;
  bool human_fallback = false;
  bool update_applied = false;
  std::optional<BeliefState> belief_after;
};

class Session {
 public:
  Session(const ScenarioConfig& cfg, std::unique_ptr<HumanPredictor> predictor,
          std::unique_ptr<RobotPlanner> planner);

  // Resets positions to the scenario starts; belief persists unless
  // cfg.reset_belief is set.
  void BeginRound(int round);

  // Predict, plan, ask the humans, advance, observe.
  StepRecord Step(HumanPolicy& humans);

  // Same loop with externally supplied human controls (live input), already
  // chosen before this call.
  StepRecord Step(std::span<const Control> human_controls);

  bool AllAtGoal() const;
  bool RoundOver() const;  // all at goal or max_steps reached

  const JointState& state() const { return history_.back(); }
  const std::vector<JointState>& history() const { return history_; }
  int round() const { return round_; }
  HumanPredictor& predictor() { return *predictor_; }
  const ScenarioConfig& config() const { return cfg_; }

 private:
  struct Plans {
    PredictionBundle prediction;
    PlanResult plan;
  };
  Plans PredictAndPlan();
  StepRecord Advance(Plans plans, std::span<const Control> human_controls, bool human_fallback);

  ScenarioConfig cfg_;
  Obstacle obstacle_;
  std::unique_ptr<HumanPredictor> predictor_;
  std::unique_ptr<RobotPlanner> planner_;
  std::vector<JointState> history_;
  int round_ = 0;
};

// Predictor named "atom", "cv" or "sf", configured from the scenario.
std::unique_ptr<HumanPredictor> MakePredictor(const ScenarioConfig& cfg, const std::string& name);

}  // namespace atom

#endif  // ATOM_SIM_SESSION_H
