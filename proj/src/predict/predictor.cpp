#include "atom/predict/baseline_predictors.h"
#include "atom/predict/predictor.h"

namespace atom {

std::vector<Trajectory> SplitHistory(std::span<const JointState> history) {
  if (history.empty()) throw ValidationError("empty history");
  const std::size_t n = history.front().size();
  std::vector<Trajectory> out(n);
  for (auto& t : out) {
    t.dt = history.front().dt;
    t.start_index = history.front().timestep_index;
    t.states.reserve(history.size());
  }
  for (const auto& joint : history) {
    if (joint.size() != n) throw ValidationError("agent count changed within the history");
    for (std::size_t i = 0; i < n; ++i) out[i].states.push_back(joint.agents[i]);
  }
  return out;
}

std::vector<Vec2> LastVelocities(std::span<const JointState> history) {
  if (history.empty()) throw ValidationError("empty history");
  const JointState& cur = history.back();
  std::vector<Vec2> v(cur.size(), Vec2::Zero());
  if (history.size() < 2) return v;
  const JointState& prev = history[history.size() - 2];
  for (std::size_t i = 0; i < cur.size(); ++i) v[i] = (cur.position(i) - prev.position(i)) / cur.dt;
  return v;
}

PredictionBundle ConstantVelocityPredictor::Predict(const PredictionContext& ctx) {
  // Only the last two states matter.
  const std::size_t keep = std::min<std::size_t>(2, ctx.history.size());
  const auto per_agent = SplitHistory(ctx.history.last(keep));
  PredictionBundle b;
  for (std::size_t i = 1; i < per_agent.size(); ++i) b.humans.push_back(CvPredict(per_agent[i], horizon_));
  return b;
}

SocialForcePredictor::SocialForcePredictor(int horizon, SocialForceParams params)
    : horizon_(horizon), params_(params) {
  Validate(params_);
}

PredictionBundle SocialForcePredictor::Predict(const PredictionContext& ctx) {
  const JointState& cur = ctx.current();
  const auto velocities = LastVelocities(ctx.history);
  std::vector<bool> cv(cur.size(), false);
  cv[0] = true;
  const Obstacle empty;
  auto all = SfPredict(cur, velocities, ctx.goals, ctx.obstacle ? *ctx.obstacle : empty, params_,
                       horizon_, cv);
  PredictionBundle b;
  b.humans.assign(std::make_move_iterator(all.begin() + 1), std::make_move_iterator(all.end()));
  return b;
}

}  // namespace atom
