///////////////////////////////////////////////////////////////////////////////
//
// The adaptive Theory-of-Mind predictor: predict every agent by solving the
// navigation game under the current belief over behavioural parameters, then
// correct the belief from the executed motion of humans and robot alike.
//
///////////////////////////////////////////////////////////////////////////////

#ifndef ATOM_PREDICT_ATOM_PREDICTOR_H
#define ATOM_PREDICT_ATOM_PREDICTOR_H

#include <deque>
#include <optional>

#include "atom/belief/measurement.h"
#include "atom/belief/ukf.h"
#include "atom/game/ilq_solver.h"
#include "atom/predict/predictor.h"

namespace atom {

struct AtomConfig {
  GameSpec game;                   // goals and obstacle are overwritten from the context
  AgentParams initial_mean;        // per agent
  double initial_variance = 0.25;  // diagonal of Sigma_0
  double process_variance = 2.5e-3;
  double measurement_variance = 1e-3;  // m^2
  int measurement_steps = 1;
  UkfHyper hyper;
  IlqSolverOptions solver;
};

struct AtomStep {
  PredictionBundle bundle;
  std::optional<NashSolution> solution;  // empty when the CV fallback was used
};

// One prediction: solve the game at `joint` with the belief mean and roll out.
// On solver divergence falls back to constant velocity over `history`.
AtomStep AtomPredict(std::span<const JointState> history, const GameSpec& spec,
                     const BeliefState& belief, const NashSolution* warm_start = nullptr,
                     const IlqSolverOptions& options = {});

// Random-walk predict followed by the unscented update against the stacked
// positions of all agents in `observed` (one state per measurement step),
// using the game solved from `joint_prev` as measurement model.
UpdateResult AtomObserveUpdate(std::span<const JointState> observed, const JointState& joint_prev,
                               const GameSpec& spec, const BeliefState& belief,
                               const NoiseConfig& noise, const UkfHyper& hyper,
                               const NashSolution* warm_start = nullptr,
                               const IlqSolverOptions& options = {});

class AtomPredictor : public HumanPredictor {
 public:
  AtomPredictor(std::size_t n_agents, AtomConfig cfg);

  std::string name() const override { return "atom"; }
  int horizon() const override { return cfg_.game.horizon; }
  PredictionBundle Predict(const PredictionContext& ctx) override;
  void Observe(const JointState& before, const JointState& after) override;
  void BeginRound() override;

  std::optional<BeliefState> belief() const override { return belief_; }
  PredictionDiagnostics last_update() const override { return last_update_; }

  void set_belief(BeliefState belief);
  void ResetBelief();
  const NoiseConfig& noise() const { return noise_; }

 private:
  struct Solved {
    JointState joint;
    std::optional<NashSolution> solution;
  };

  std::size_t n_agents_;
  AtomConfig cfg_;
  NoiseConfig noise_;
  BeliefState belief_;
  GameSpec spec_;  // game of the last prediction (goals and obstacle set)
  bool have_spec_ = false;
  std::optional<NashSolution> warm_;
  std::deque<Solved> pending_;   // predicted states awaiting their measurement window
  std::deque<JointState> observed_;
  PredictionDiagnostics last_update_;
};

}  // namespace atom

#endif  // ATOM_PREDICT_ATOM_PREDICTOR_H
