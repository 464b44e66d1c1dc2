///////////////////////////////////////////////////////////////////////////////
//
// Unscented Kalman filter over the stacked behavioural parameters of all
// agents. The process model is a random walk; the measurement model is any
// deterministic map from a parameter vector to a measurement vector (in
// practice: solve the game, roll it forward, stack the resulting positions).
//
///////////////////////////////////////////////////////////////////////////////

#ifndef ATOM_BELIEF_UKF_H
#define ATOM_BELIEF_UKF_H

#include <Eigen/Core>

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "atom/core/types.h"

namespace atom {

struct BeliefState {
  Eigen::VectorXd mean;        // flattened BehaviorParams
  Eigen::MatrixXd covariance;  // symmetric PSD

  Eigen::Index dim() const { return mean.size(); }
  BehaviorParams params() const { return BehaviorParams::Unflatten(mean); }
};

// Same parameters and diagonal covariance for every agent.
BeliefState UniformBelief(std::size_t n_agents, const AgentParams& mean, double variance);

struct NoiseConfig {
  Eigen::MatrixXd process;      // Q_t, random-walk step covariance
  Eigen::MatrixXd measurement;  // R over the measurement vector
};

// Diagonal noise: `process_variance` per parameter per step and
// `measurement_variance` (m^2) per measured coordinate.
NoiseConfig DiagonalNoise(std::size_t n_agents, double process_variance,
                          double measurement_variance, int measurement_steps = 1);

struct UkfHyper {
  double alpha = 0.5;
  double beta = 2.0;
  double kappa = 0.0;

  double Lambda(Eigen::Index dim) const { return alpha * alpha * (dim + kappa) - dim; }
};

struct SigmaPoints {
  std::vector<Eigen::VectorXd> points;  // 2 * dim + 1, points[0] is the mean
  Eigen::VectorXd mean_weights;
  Eigen::VectorXd cov_weights;
  double lambda = 0.0;
};

// Projects a flattened parameter vector into the estimation box.
Eigen::VectorXd ClampToBox(const Eigen::VectorXd& flat);

// Standard unscented-transform points around the belief, each clamped into
// the parameter box unless `clamp` is false (the mean then need not be a
// parameter vector). A failed Cholesky factorization is retried once with a
// 1e-9 diagonal; a second failure throws NumericalError.
SigmaPoints MakeSigmaPoints(const BeliefState& belief, const UkfHyper& hyper, bool clamp = true);

// Random-walk prediction: mean unchanged, covariance + Q_t.
BeliefState PredictStep(const BeliefState& belief, const NoiseConfig& noise);

// Returns std::nullopt when the measurement could not be produced (e.g. the
// game solver diverged for this parameter vector).
using MeasurementFn = std::function<std::optional<Eigen::VectorXd>(const Eigen::VectorXd&)>;

struct UpdateResult {
  BeliefState belief;
  bool applied = false;
  std::string skip_reason;  // empty when applied
  Eigen::VectorXd predicted_measurement;
};

// Unscented measurement update. The corrected mean is clamped into the box;
// the covariance is symmetrized and its eigenvalues floored at 1e-9. If the
// innovation covariance stays singular after a 1e-6 diagonal regularization,
// or any sigma-point measurement fails, the prior belief is returned with
// applied == false.
UpdateResult UpdateStep(const BeliefState& belief, const Eigen::VectorXd& observed,
                        const MeasurementFn& measure, const NoiseConfig& noise,
                        const UkfHyper& hyper);

// Symmetrizes and floors the eigenvalues of a covariance matrix.
Eigen::MatrixXd RegularizeCovariance(const Eigen::MatrixXd& cov, double floor = 1e-9);

}  // namespace atom

#endif  // ATOM_BELIEF_UKF_H
