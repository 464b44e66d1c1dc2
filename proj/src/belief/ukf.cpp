#include "atom/belief/ukf.h"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>

namespace atom {

BeliefState UniformBelief(std::size_t n_agents, const AgentParams& mean, double variance) {
  BeliefState b;
  b.mean = BehaviorParams{std::vector<AgentParams>(n_agents, mean)}.Flatten();
  b.covariance = variance * Eigen::MatrixXd::Identity(b.mean.size(), b.mean.size());
  return b;
}

NoiseConfig DiagonalNoise(std::size_t n_agents, double process_variance,
                          double measurement_variance, int measurement_steps) {
  const Eigen::Index dim = static_cast<Eigen::Index>(2 * n_agents);
  const Eigen::Index meas = dim * std::max(1, measurement_steps);
  return {process_variance * Eigen::MatrixXd::Identity(dim, dim),
          measurement_variance * Eigen::MatrixXd::Identity(meas, meas)};
}

Eigen::VectorXd ClampToBox(const Eigen::VectorXd& flat) {
  Eigen::VectorXd out = flat;
  for (Eigen::Index i = 0; i + 1 < out.size(); i += 2) {
    out(i) = std::clamp(out(i), kMinSpeedParam, kMaxSpeedParam);
    out(i + 1) = std::clamp(out(i + 1), kMinSocialParam, kMaxSocialParam);
  }
  return out;
}

Eigen::MatrixXd RegularizeCovariance(const Eigen::MatrixXd& cov, double floor) {
  const Eigen::MatrixXd sym = 0.5 * (cov + cov.transpose());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(sym);
  if (eig.eigenvalues().minCoeff() >= floor) return sym;
  const Eigen::VectorXd values = eig.eigenvalues().cwiseMax(floor);
  Eigen::MatrixXd out = eig.eigenvectors() * values.asDiagonal() * eig.eigenvectors().transpose();
  return 0.5 * (out + out.transpose());
}

SigmaPoints MakeSigmaPoints(const BeliefState& belief, const UkfHyper& hyper, bool clamp) {
  const Eigen::Index dim = belief.dim();
  if (belief.covariance.rows() != dim || belief.covariance.cols() != dim) {
    throw ValidationError("belief covariance does not match its mean");
  }
  const double lambda = hyper.Lambda(dim);
  const double spread = dim + lambda;
  if (!(hyper.alpha > 0.0 && hyper.alpha <= 1.0) || !(spread > 0.0)) {
    throw ValidationError("invalid unscented transform parameters");
  }

  Eigen::MatrixXd scaled = spread * 0.5 * (belief.covariance + belief.covariance.transpose());
  Eigen::LLT<Eigen::MatrixXd> llt(scaled);
  if (llt.info() != Eigen::Success) {
    scaled += 1e-9 * Eigen::MatrixXd::Identity(dim, dim);
    llt.compute(scaled);
    if (llt.info() != Eigen::Success) throw NumericalError("belief covariance not factorizable");
  }
  const Eigen::MatrixXd root = llt.matrixL();

  SigmaPoints sp;
  sp.lambda = lambda;
  sp.points.reserve(2 * dim + 1);
  const auto emit = [&](const Eigen::VectorXd& p) { sp.points.push_back(clamp ? ClampToBox(p) : p); };
  emit(belief.mean);
  for (Eigen::Index i = 0; i < dim; ++i) emit(belief.mean + root.col(i));
  for (Eigen::Index i = 0; i < dim; ++i) emit(belief.mean - root.col(i));

  sp.mean_weights = Eigen::VectorXd::Constant(2 * dim + 1, 0.5 / spread);
  sp.cov_weights = sp.mean_weights;
  sp.mean_weights(0) = lambda / spread;
  sp.cov_weights(0) = lambda / spread + (1.0 - hyper.alpha * hyper.alpha + hyper.beta);
  return sp;
}

BeliefState PredictStep(const BeliefState& belief, const NoiseConfig& noise) {
  if (noise.process.rows() != belief.dim() || noise.process.cols() != belief.dim()) {
    throw ValidationError("process noise does not match belief dimension");
  }
  return {belief.mean, belief.covariance + noise.process};
}

UpdateResult UpdateStep(const BeliefState& belief, const Eigen::VectorXd& observed,
                        const MeasurementFn& measure, const NoiseConfig& noise,
                        const UkfHyper& hyper) {
  if (!observed.allFinite()) throw ValidationError("non-finite observation");
  if (noise.measurement.rows() != observed.size()) {
    throw ValidationError("measurement noise does not match observation dimension");
  }
  UpdateResult result{belief, false, {}, {}};
  const SigmaPoints sp = MakeSigmaPoints(belief, hyper);

  std::vector<Eigen::VectorXd> ys;
  ys.reserve(sp.points.size());
  for (const auto& point : sp.points) {
    std::optional<Eigen::VectorXd> y = measure(point);
    if (!y || y->size() != observed.size() || !y->allFinite()) {
      result.skip_reason = "measurement failed for a sigma point";
      return result;
    }
    ys.push_back(std::move(*y));
  }

  Eigen::VectorXd y_mean = Eigen::VectorXd::Zero(observed.size());
  for (std::size_t i = 0; i < ys.size(); ++i) y_mean += sp.mean_weights(i) * ys[i];
  result.predicted_measurement = y_mean;

  Eigen::MatrixXd p_yy = noise.measurement;
  Eigen::MatrixXd p_xy = Eigen::MatrixXd::Zero(belief.dim(), observed.size());
  for (std::size_t i = 0; i < ys.size(); ++i) {
    const Eigen::VectorXd dy = ys[i] - y_mean;
    const Eigen::VectorXd dx = sp.points[i] - belief.mean;
    p_yy += sp.cov_weights(i) * dy * dy.transpose();
    p_xy += sp.cov_weights(i) * dx * dy.transpose();
  }
  p_yy = 0.5 * (p_yy + p_yy.transpose());

  Eigen::LLT<Eigen::MatrixXd> llt(p_yy);
  if (llt.info() != Eigen::Success) {
    p_yy += 1e-6 * Eigen::MatrixXd::Identity(p_yy.rows(), p_yy.cols());
    llt.compute(p_yy);
    if (llt.info() != Eigen::Success) {
      result.skip_reason = "innovation covariance singular";
      return result;
    }
  }
  // K = P_xy P_yy^{-1}, computed as (P_yy^{-1} P_xy')'.
  const Eigen::MatrixXd gain = llt.solve(p_xy.transpose()).transpose();
  result.belief.mean = ClampToBox(belief.mean + gain * (observed - y_mean));
  result.belief.covariance =
      RegularizeCovariance(belief.covariance - gain * p_yy * gain.transpose());
  result.applied = true;
  return result;
}

}  // namespace atom
