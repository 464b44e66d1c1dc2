#include "atom/game/ilq_solver.h"

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>

namespace atom {
namespace {

// A control this close to its cap counts as saturated.
constexpr double kCapSlack = 1e-9;

struct Problem {
  const JointState& start;
  const GameSpec& spec;
  const BehaviorParams& params;
  std::size_t n;
  int horizon;
  double dt;
  std::vector<double> caps;
  Eigen::Matrix2d r_sym;
  double psd_floor;

  std::size_t index(std::size_t player, int k) const {
    return player * static_cast<std::size_t>(horizon) + static_cast<std::size_t>(k);
  }
};

struct Iterate {
  std::vector<Vec2> u;                 // control of (player, k) at index(player, k)
  std::vector<double> cost;            // per player
  std::vector<Vec2> grad;              // own-control gradient per control
  // row_suffix[index(i, k)] = sum_{m >= k} of player i's rows of the projected
  // stage Hessian at x_{m+1} (2 x 2n).
  std::vector<Eigen::MatrixXd> row_suffix;
  bool finite = true;
};

void ProjectPsd(Eigen::MatrixXd& h, double floor) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(0.5 * (h + h.transpose()));
  Eigen::VectorXd values = eig.eigenvalues();
  if (values.minCoeff() >= 0.0) return;
  for (Eigen::Index i = 0; i < values.size(); ++i) {
    if (values(i) < 0.0) values(i) = floor;
  }
  h = eig.eigenvectors() * values.asDiagonal() * eig.eigenvectors().transpose();
}

Iterate Evaluate(const Problem& pb, std::vector<Vec2> u, bool with_hessians) {
  Iterate it;
  it.u = std::move(u);
  const std::size_t n = pb.n;
  const int T = pb.horizon;

  // x[k] holds the joint positions at step k, k = 0..T.
  std::vector<std::vector<Vec2>> x(T + 1, std::vector<Vec2>(n));
  for (std::size_t j = 0; j < n; ++j) x[0][j] = pb.start.agents[j].position;
  for (int k = 0; k < T; ++k) {
    for (std::size_t j = 0; j < n; ++j) x[k + 1][j] = x[k][j] + it.u[pb.index(j, k)] * pb.dt;
  }

  it.cost.assign(n, 0.0);
  it.grad.assign(n * T, Vec2::Zero());
  if (with_hessians) it.row_suffix.assign(n * T, Eigen::MatrixXd());

  for (std::size_t i = 0; i < n; ++i) {
    Vec2 grad_sum = Vec2::Zero();
    Eigen::MatrixXd row_sum = Eigen::MatrixXd::Zero(2, 2 * n);
    const Eigen::Index i0 = static_cast<Eigen::Index>(2 * i);
    for (int k = T - 1; k >= 0; --k) {
      StateCostExpansion e = ExpandStateCost(i, x[k + 1], pb.spec, pb.params);
      const Vec2& uk = it.u[pb.index(i, k)];
      it.cost[i] += e.value + uk.dot(pb.spec.weights.control * uk);
      grad_sum += e.gradient.segment<2>(i0);
      it.grad[pb.index(i, k)] = pb.dt * grad_sum + pb.r_sym * uk;
      if (with_hessians) {
        ProjectPsd(e.hessian, pb.psd_floor);
        row_sum += e.hessian.middleRows(i0, 2);
        it.row_suffix[pb.index(i, k)] = row_sum;
      }
    }
    if (!std::isfinite(it.cost[i])) it.finite = false;
  }
  return it;
}

bool Saturated(const Problem& pb, std::size_t player, const Vec2& u, const Vec2& g) {
  const double cap = pb.caps[player];
  return u.norm() >= cap - kCapSlack && g.dot(u) < 0.0;
}

double Residual(const Problem& pb, const Iterate& it) {
  double total = 0.0;
  for (std::size_t i = 0; i < pb.n; ++i) {
    for (int k = 0; k < pb.horizon; ++k) {
      const std::size_t c = pb.index(i, k);
      const Vec2& g = it.grad[c];
      const Vec2& u = it.u[c];
      if (Saturated(pb, i, u, g)) {
        const Vec2 radial = u.normalized();
        const Vec2 tangent(-radial.y(), radial.x());
        total += std::pow(g.dot(tangent), 2);
      } else {
        total += g.squaredNorm();
      }
    }
  }
  return total;
}

// Solves the LQ game around `it`; returns the joint control update.
std::vector<Vec2> SolveLqGame(const Problem& pb, const Iterate& it) {
  const std::size_t count = pb.n * pb.horizon;

  // Basis of the admissible update for each control: the full plane, or the
  // tangent of the cap circle for saturated controls.
  std::vector<Eigen::MatrixXd> basis(count);
  std::vector<Eigen::Index> offset(count + 1, 0);
  std::vector<double> curvature(count, 0.0);
  for (std::size_t i = 0; i < pb.n; ++i) {
    for (int k = 0; k < pb.horizon; ++k) {
      const std::size_t c = pb.index(i, k);
      const Vec2& u = it.u[c];
      const Vec2& g = it.grad[c];
      if (Saturated(pb, i, u, g)) {
        const Vec2 radial = u.normalized();
        basis[c] = Vec2(-radial.y(), radial.x());
        // Second-order term of moving along the circle: multiplier / radius.
        curvature[c] = -g.dot(radial) / u.norm();
      } else {
        basis[c] = Eigen::Matrix2d::Identity();
      }
    }
  }
  for (std::size_t c = 0; c < count; ++c) offset[c + 1] = offset[c] + basis[c].cols();
  const Eigen::Index dim = offset[count];

  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(dim, dim);
  Eigen::VectorXd rhs(dim);
  const double dt2 = pb.dt * pb.dt;
  for (std::size_t i = 0; i < pb.n; ++i) {
    for (int k = 0; k < pb.horizon; ++k) {
      const std::size_t row = pb.index(i, k);
      const Eigen::MatrixXd& prow = basis[row];
      rhs.segment(offset[row], prow.cols()) = -prow.transpose() * it.grad[row];
      for (std::size_t l = 0; l < pb.n; ++l) {
        for (int p = 0; p < pb.horizon; ++p) {
          const std::size_t col = pb.index(l, p);
          Eigen::Matrix2d block =
              dt2 * it.row_suffix[pb.index(i, std::max(k, p))].block<2, 2>(0, 2 * l);
          if (row == col) block += pb.r_sym;
          a.block(offset[row], offset[col], prow.cols(), basis[col].cols()) =
              prow.transpose() * block * basis[col];
        }
      }
      if (prow.cols() == 1) a(offset[row], offset[row]) += curvature[row];
    }
  }

  Eigen::VectorXd z = a.partialPivLu().solve(rhs);
  if (!z.allFinite()) z = a.colPivHouseholderQr().solve(rhs);

  std::vector<Vec2> delta(count);
  for (std::size_t c = 0; c < count; ++c) {
    delta[c] = basis[c] * z.segment(offset[c], basis[c].cols());
  }
  return delta;
}

std::vector<Vec2> ColdStart(const Problem& pb) {
  std::vector<Vec2> u(pb.n * pb.horizon, Vec2::Zero());
  const double span = pb.horizon * pb.dt;
  for (std::size_t i = 0; i < pb.n; ++i) {
    const Vec2 to_goal = pb.spec.goals[i] - pb.start.agents[i].position;
    const double dist = to_goal.norm();
    if (dist < 1e-12) continue;
    const Vec2 v = to_goal / dist * std::min(pb.caps[i], dist / span);
    for (int k = 0; k < pb.horizon; ++k) u[pb.index(i, k)] = v;
  }
  return u;
}

bool WarmStart(const Problem& pb, const NashSolution& warm, std::vector<Vec2>& u) {
  const int shift = pb.start.timestep_index - warm.start_index;
  if (shift < 0 || shift >= pb.horizon || warm.controls.size() != pb.n) return false;
  for (const auto& seq : warm.controls) {
    if (static_cast<int>(seq.size()) != pb.horizon) return false;
  }
  u.assign(pb.n * pb.horizon, Vec2::Zero());
  for (std::size_t i = 0; i < pb.n; ++i) {
    for (int k = 0; k < pb.horizon; ++k) {
      const int src = std::min(k + shift, pb.horizon - 1);
      u[pb.index(i, k)] = ClampSpeed(warm.controls[i][src].velocity, pb.caps[i]);
    }
  }
  return true;
}

NashSolution Assemble(const Problem& pb, const std::vector<Vec2>& u) {
  NashSolution sol;
  sol.start_index = pb.start.timestep_index;
  sol.controls.assign(pb.n, ControlSequence(pb.horizon));
  for (std::size_t i = 0; i < pb.n; ++i) {
    for (int k = 0; k < pb.horizon; ++k) sol.controls[i][k].velocity = u[pb.index(i, k)];
  }
  sol.trajectories = Rollout(pb.start, sol.controls, pb.caps);
  sol.costs.resize(pb.n);
  for (std::size_t i = 0; i < pb.n; ++i) {
    sol.costs[i] = EvaluateCost(i, sol.trajectories, sol.controls, pb.spec, pb.params);
  }
  return sol;
}

Problem MakeProblem(const JointState& start, const GameSpec& spec, const BehaviorParams& params,
                    const IlqSolverOptions& options) {
  if (start.agents.empty()) throw ValidationError("game needs at least one agent");
  if (!(start.dt > 0.0)) throw ValidationError("dt must be positive");
  for (const auto& a : start.agents) {
    if (!IsFinite(a.position)) throw ValidationError("non-finite agent position");
  }
  Validate(spec);
  if (start.size() != spec.num_players()) {
    throw ValidationError("joint state and game disagree on the number of players");
  }
  Validate(params, start.size());
  if (std::abs(start.dt - spec.dt) > 1e-12) throw ValidationError("joint state dt != game dt");
  return Problem{start,
                 spec,
                 params,
                 start.size(),
                 spec.horizon,
                 spec.dt,
                 EffectiveSpeedCaps(params, spec.u_max),
                 spec.weights.control + spec.weights.control.transpose(),
                 options.psd_floor};
}

}  // namespace

NashSolution SolveIlq(const JointState& start, const GameSpec& spec,
                      const BehaviorParams& params, const NashSolution* warm_start,
                      const IlqSolverOptions& options, SolveTrace* trace) {
  const Problem pb = MakeProblem(start, spec, params, options);

  std::vector<Vec2> u0;
  if (warm_start == nullptr || !WarmStart(pb, *warm_start, u0)) u0 = ColdStart(pb);

  Iterate current = Evaluate(pb, std::move(u0), true);
  if (!current.finite) {
    throw SolverDivergedError("non-finite cost at the initial iterate", Assemble(pb, current.u));
  }
  double merit = Residual(pb, current);
  auto record = [&](const Iterate& it, double res, double step, double update) {
    if (trace == nullptr) return;
    double joint = 0.0;
    for (double c : it.cost) joint += c;
    trace->joint_cost.push_back(joint);
    trace->residual.push_back(res);
    trace->step_size.push_back(step);
    trace->update_norm.push_back(update);
  };
  record(current, merit, 0.0, 0.0);

  bool converged = false;
  int iterations = 0;
  double update_norm = 0.0;
  for (int iter = 0; iter < options.max_iterations; ++iter) {
    const std::vector<Vec2> delta = SolveLqGame(pb, current);
    update_norm = 0.0;
    for (const auto& d : delta) update_norm = std::max(update_norm, d.cwiseAbs().maxCoeff());
    if (!std::isfinite(update_norm)) {
      throw SolverDivergedError("non-finite LQ update", Assemble(pb, current.u));
    }
    const bool small = update_norm < options.tolerance;

    double alpha = 1.0;
    bool accepted = false;
    Iterate candidate;
    double candidate_merit = 0.0;
    for (int h = 0; h <= options.max_halvings; ++h) {
      std::vector<Vec2> trial(current.u.size());
      for (std::size_t c = 0; c < trial.size(); ++c) {
        trial[c] = ClampSpeed(current.u[c] + alpha * delta[c], pb.caps[c / pb.horizon]);
      }
      candidate = Evaluate(pb, std::move(trial), false);
      if (!candidate.finite) {
        throw SolverDivergedError("non-finite cost during line search", Assemble(pb, current.u));
      }
      candidate_merit = Residual(pb, candidate);
      if (candidate_merit < merit || small) {
        accepted = true;
        break;
      }
      alpha *= options.backtrack;
    }
    ++iterations;
    if (!accepted) break;

    current = Evaluate(pb, std::move(candidate.u), true);
    merit = candidate_merit;
    record(current, merit, alpha, update_norm);
    if (small) {
      converged = true;
      break;
    }
  }

  NashSolution sol = Assemble(pb, current.u);
  sol.iterations = iterations;
  sol.converged = converged;
  sol.max_update_norm = update_norm;
  return sol;
}

double NashResidual(const JointState& start, const GameSpec& spec, const BehaviorParams& params,
                    const std::vector<ControlSequence>& controls) {
  const Problem pb = MakeProblem(start, spec, params, IlqSolverOptions{});
  std::vector<Vec2> u(pb.n * pb.horizon);
  for (std::size_t i = 0; i < pb.n; ++i) {
    for (int k = 0; k < pb.horizon; ++k) {
      u[pb.index(i, k)] = ClampSpeed(controls.at(i).at(k).velocity, pb.caps[i]);
    }
  }
  return Residual(pb, Evaluate(pb, std::move(u), false));
}

}  // namespace atom
