#include "atom/sim/session.h"

#include "atom/predict/atom_predictor.h"
#include "atom/predict/baseline_predictors.h"
#include "atom/predict/baselines.h"

namespace atom {

PlanResult SamplingPlanner::Plan(const JointState& joint, std::span<const Trajectory> predicted_humans,
                                 const Vec2& goal, const Obstacle& obstacle) {
  // One independent sample stream per (round, step).
  const std::uint64_t stream = (static_cast<std::uint64_t>(round_) << 32) |
                               static_cast<std::uint32_t>(joint.timestep_index);
  PlanResult plan = atom::Plan(joint.agents[0], joint.timestep_index, predicted_humans, goal,
                               obstacle, cfg_, stream, previous_ ? &*previous_ : nullptr);
  previous_ = plan;
  return plan;
}

void SamplingPlanner::BeginRound() { previous_.reset(); }

PlanResult StationaryPlanner::Plan(const JointState& joint, std::span<const Trajectory>, const Vec2&,
                                   const Obstacle&) {
  PlanResult p;
  p.controls.assign(horizon_, Control{});
  p.trajectory.dt = dt_;
  p.trajectory.start_index = joint.timestep_index + 1;
  p.trajectory.states.assign(horizon_, joint.agents[0]);
  p.feasible = true;
  p.sample_index = 0;
  return p;
}

ScriptedHumans::ScriptedHumans(const ScenarioConfig& cfg) : cfg_(cfg), spec_(MakeGameSpec(cfg)) {
  BeginRound(0);
}

void ScriptedHumans::BeginRound(int round) {
  if (round < 0 || round >= static_cast<int>(cfg_.schedule.size())) {
    throw ValidationError("no schedule entry for round " + std::to_string(round));
  }
  params_.per_agent.clear();
  params_.per_agent.push_back(cfg_.robot_model);
  for (const auto& p : cfg_.schedule[round]) params_.per_agent.push_back(p);
  warm_.reset();
  previous_.reset();
}

HumanAction ScriptedHumans::Act(const JointState& joint) {
  const std::size_t n = joint.size();
  HumanAction action;
  action.controls.resize(n - 1);
  spec_.goals = RoutedGoals(cfg_, spec_.obstacle, joint);
  try {
    NashSolution sol = SolveIlq(joint, spec_, params_, warm_ ? &*warm_ : nullptr);
    for (std::size_t h = 1; h < n; ++h) {
      action.controls[h - 1].velocity =
          ClampSpeed(sol.controls[h].front().velocity, params_.per_agent[h].v_max);
    }
    warm_ = std::move(sol);
  } catch (const SolverDivergedError&) {
    std::vector<Vec2> velocities(n, Vec2::Zero());
    if (previous_) {
      for (std::size_t i = 0; i < n; ++i) {
        velocities[i] = (joint.position(i) - previous_->position(i)) / joint.dt;
      }
    }
    SocialForceParams sf = cfg_.social_force;
    sf.desired_speed = 0.0;
    for (std::size_t h = 1; h < n; ++h) sf.desired_speed = std::max(sf.desired_speed, params_.per_agent[h].v_max);
    std::vector<bool> cv(n, false);
    cv[0] = true;
    const auto next = SfPredict(joint, velocities, spec_.goals, spec_.obstacle, sf, 1, cv);
    for (std::size_t h = 1; h < n; ++h) {
      const Vec2 v = (next[h].position(0) - joint.position(h)) / joint.dt;
      action.controls[h - 1].velocity = ClampSpeed(v, params_.per_agent[h].v_max);
    }
    action.fallback = true;
    warm_.reset();
  }
  previous_ = joint;
  return action;
}

Session::Session(const ScenarioConfig& cfg, std::unique_ptr<HumanPredictor> predictor,
                 std::unique_ptr<RobotPlanner> planner)
    : cfg_(cfg), obstacle_(cfg.MakeObstacle()), predictor_(std::move(predictor)),
      planner_(std::move(planner)) {
  Validate(cfg_);
  if (!predictor_ || !planner_) throw ValidationError("session needs a predictor and a planner");
  BeginRound(0);
}

void Session::BeginRound(int round) {
  if (round < 0 || round >= cfg_.rounds) throw ValidationError("round out of range");
  round_ = round;
  JointState start;
  start.dt = cfg_.dt;
  start.timestep_index = 0;
  for (const auto& p : cfg_.starts) start.agents.push_back({p});
  history_.assign(1, start);
  predictor_->BeginRound();
  if (cfg_.reset_belief) {
    if (auto* atom = dynamic_cast<AtomPredictor*>(predictor_.get())) atom->ResetBelief();
  }
  if (auto* sampling = dynamic_cast<SamplingPlanner*>(planner_.get())) sampling->set_round(round);
  planner_->BeginRound();
}

Session::Plans Session::PredictAndPlan() {
  const std::vector<Vec2> goals = RoutedGoals(cfg_, obstacle_, state());
  PredictionContext ctx{history_, goals, &obstacle_};
  Plans out;
  out.prediction = predictor_->Predict(ctx);
  out.plan = planner_->Plan(state(), out.prediction.humans, goals[0], obstacle_);
  return out;
}

StepRecord Session::Step(HumanPolicy& humans) {
  // The humans decide from the current state before the robot's plan exists.
  HumanAction action = humans.Act(state());
  Plans plans = PredictAndPlan();
  return Advance(std::move(plans), action.controls, action.fallback);
}

StepRecord Session::Step(std::span<const Control> human_controls) {
  Plans plans = PredictAndPlan();
  return Advance(std::move(plans), human_controls, false);
}

StepRecord Session::Advance(Plans plans, std::span<const Control> human_controls, bool human_fallback) {
  const JointState& cur = state();
  if (human_controls.size() != cur.size() - 1) throw ValidationError("one control per human required");
  StepRecord rec;
  rec.round = round_;
  rec.step = cur.timestep_index;
  rec.state = cur;
  rec.controls.reserve(cur.size());
  rec.controls.push_back({ClampSpeed(ExecuteFirst(plans.plan).velocity, cfg_.robot_speed_cap)});
  for (const auto& c : human_controls) {
    if (!IsFinite(c.velocity)) throw ValidationError("non-finite human control");
    rec.controls.push_back(c);
  }
  JointState next = cur;
  next.timestep_index = cur.timestep_index + 1;
  for (std::size_t i = 0; i < cur.size(); ++i) {
    next.agents[i] = StepDynamics(cur.agents[i], rec.controls[i], cur.dt);
  }
  predictor_->Observe(cur, next);

  rec.next = next;
  rec.prediction = std::move(plans.prediction);
  rec.plan = std::move(plans.plan);
  rec.human_fallback = human_fallback;
  rec.update_applied = predictor_->last_update().update_applied;
  rec.belief_after = predictor_->belief();
  history_.push_back(std::move(next));
  return rec;
}

bool Session::AllAtGoal() const {
  const JointState& s = state();
  for (std::size_t i = 0; i < s.size(); ++i) {
    if ((s.position(i) - cfg_.goals[i]).norm() > cfg_.goal_radius) return false;
  }
  return true;
}

bool Session::RoundOver() const { return AllAtGoal() || state().timestep_index >= cfg_.max_steps; }

std::unique_ptr<HumanPredictor> MakePredictor(const ScenarioConfig& cfg, const std::string& name) {
  if (name == "cv") return std::make_unique<ConstantVelocityPredictor>(cfg.horizon);
  if (name == "sf") return std::make_unique<SocialForcePredictor>(cfg.horizon, cfg.social_force);
  if (name == "atom") {
    AtomConfig a;
    a.game = MakeGameSpec(cfg);
    a.initial_mean = cfg.belief.initial_mean;
    a.initial_variance = cfg.belief.initial_variance;
    a.process_variance = cfg.belief.process_variance;
    a.measurement_variance = cfg.belief.measurement_variance;
    a.measurement_steps = cfg.belief.measurement_steps;
    a.hyper = cfg.belief.hyper;
    return std::make_unique<AtomPredictor>(cfg.num_agents(), a);
  }
  throw ValidationError("unknown predictor '" + name + "'");
}

}  // namespace atom
