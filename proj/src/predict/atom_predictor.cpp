#include "atom/predict/atom_predictor.h"

#include "atom/predict/baselines.h"

namespace atom {

AtomStep AtomPredict(std::span<const JointState> history, const GameSpec& spec,
                     const BeliefState& belief, const NashSolution* warm_start,
                     const IlqSolverOptions& options) {
  if (history.empty()) throw ValidationError("empty history");
  const JointState& joint = history.back();
  AtomStep out;
  out.bundle.belief = belief;
  try {
    NashSolution sol = SolveIlq(joint, spec, belief.params(), warm_start, options);
    out.bundle.diagnostics.solver_iterations = sol.iterations;
    out.bundle.diagnostics.solver_converged = sol.converged;
    out.bundle.humans.assign(sol.trajectories.begin() + 1, sol.trajectories.end());
    out.bundle.robot_by_human = sol.trajectories.front();
    out.solution = std::move(sol);
  } catch (const SolverDivergedError& e) {
    const std::size_t keep = std::min<std::size_t>(2, history.size());
    auto cv = CvPredict(SplitHistory(history.last(keep)), spec.horizon);
    out.bundle.diagnostics.solver_converged = false;
    out.bundle.diagnostics.fallback = true;
    out.bundle.diagnostics.note = e.what();
    out.bundle.robot_by_human = cv.front();
    out.bundle.humans.assign(cv.begin() + 1, cv.end());
  }
  return out;
}

UpdateResult AtomObserveUpdate(std::span<const JointState> observed, const JointState& joint_prev,
                               const GameSpec& spec, const BeliefState& belief,
                               const NoiseConfig& noise, const UkfHyper& hyper,
                               const NashSolution* warm_start, const IlqSolverOptions& options) {
  if (observed.empty()) throw ValidationError("no observed states");
  for (std::size_t k = 0; k < observed.size(); ++k) {
    if (observed[k].timestep_index != joint_prev.timestep_index + static_cast<int>(k) + 1) {
      throw ValidationError("observed states must follow the predicted state step by step");
    }
  }
  const BeliefState prior = PredictStep(belief, noise);
  const auto measure = GameMeasurementFn(joint_prev, spec, warm_start,
                                         static_cast<int>(observed.size()), options);
  return UpdateStep(prior, StackPositions(observed), measure, noise, hyper);
}

AtomPredictor::AtomPredictor(std::size_t n_agents, AtomConfig cfg)
    : n_agents_(n_agents),
      cfg_(std::move(cfg)),
      noise_(DiagonalNoise(n_agents, cfg_.process_variance, cfg_.measurement_variance,
                           cfg_.measurement_steps)) {
  if (n_agents_ < 2) throw ValidationError("AToM needs a robot and at least one human");
  if (cfg_.measurement_steps < 1 || cfg_.measurement_steps > cfg_.game.horizon) {
    throw ValidationError("measurement_steps must lie in [1, horizon]");
  }
  if (!WithinBox(cfg_.initial_mean)) throw ValidationError("initial belief outside the parameter box");
  if (!(cfg_.initial_variance > 0.0)) throw ValidationError("initial variance must be positive");
  ResetBelief();
}

void AtomPredictor::ResetBelief() {
  belief_ = UniformBelief(n_agents_, cfg_.initial_mean, cfg_.initial_variance);
}

void AtomPredictor::set_belief(BeliefState belief) {
  if (belief.dim() != static_cast<Eigen::Index>(2 * n_agents_)) {
    throw ValidationError("belief dimension does not match the agent count");
  }
  belief_ = std::move(belief);
}

void AtomPredictor::BeginRound() {
  warm_.reset();
  pending_.clear();
  observed_.clear();
}

PredictionBundle AtomPredictor::Predict(const PredictionContext& ctx) {
  const JointState& joint = ctx.current();
  if (joint.size() != n_agents_) throw ValidationError("agent count changed");
  spec_ = cfg_.game;
  spec_.goals.assign(ctx.goals.begin(), ctx.goals.end());
  spec_.obstacle = ctx.obstacle ? *ctx.obstacle : Obstacle();
  spec_.dt = joint.dt;
  have_spec_ = true;

  AtomStep step = AtomPredict(ctx.history, spec_, belief_, warm_ ? &*warm_ : nullptr, cfg_.solver);
  warm_ = step.solution;
  pending_.push_back({joint, step.solution});
  while (pending_.size() > static_cast<std::size_t>(cfg_.measurement_steps)) pending_.pop_front();
  step.bundle.diagnostics.update_applied = last_update_.update_applied;
  return std::move(step.bundle);
}

void AtomPredictor::Observe(const JointState& before, const JointState& after) {
  last_update_ = {};
  if (!have_spec_) {
    last_update_.note = "no prediction to compare against";
    return;
  }
  observed_.push_back(after);
  while (observed_.size() > static_cast<std::size_t>(cfg_.measurement_steps)) observed_.pop_front();

  // The measurement window starts at the oldest pending prediction.
  const int m = cfg_.measurement_steps;
  if (static_cast<int>(observed_.size()) < m || pending_.empty() ||
      pending_.front().joint.timestep_index + m != after.timestep_index) {
    // Not enough history yet in this round: diffuse only.
    belief_ = PredictStep(belief_, noise_);
    last_update_.note = "measurement window incomplete";
    (void)before;
    return;
  }
  const Solved& origin = pending_.front();
  const std::vector<JointState> window(observed_.begin(), observed_.end());
  const NashSolution* warm = origin.solution ? &*origin.solution : nullptr;
  UpdateResult r = AtomObserveUpdate(window, origin.joint, spec_, belief_, noise_, cfg_.hyper,
                                     warm, cfg_.solver);
  belief_ = std::move(r.belief);
  last_update_.update_applied = r.applied;
  last_update_.note = r.skip_reason;
}

}  // namespace atom
