// Finite-horizon discrete LQR by backward Riccati recursion, used as an
// independent reference for the single-player game.
//
//   e_{k+1} = e_k + dt * u_k,   e = x - g
//   J = sum_{k=0}^{T-1} e_{k+1}' Q e_{k+1} + u_k' R u_k

#ifndef ATOM_TESTS_ORACLES_LQR_ORACLE_H
#define ATOM_TESTS_ORACLES_LQR_ORACLE_H

#include <Eigen/Dense>

#include <vector>

namespace atom::oracle {

inline std::vector<Eigen::Vector2d> LqrControls(const Eigen::Vector2d& x0,
                                                const Eigen::Vector2d& goal,
                                                const Eigen::Matrix2d& q,
                                                const Eigen::Matrix2d& r, double dt,
                                                int horizon) {
  const Eigen::Matrix2d a = Eigen::Matrix2d::Identity();
  const Eigen::Matrix2d b = dt * Eigen::Matrix2d::Identity();
  std::vector<Eigen::Matrix2d> gains(horizon);
  Eigen::Matrix2d s = q;  // value of the terminal error e_T
  for (int k = horizon - 1; k >= 0; --k) {
    const Eigen::Matrix2d gain = (r + b.transpose() * s * b).ldlt().solve(b.transpose() * s * a);
    gains[k] = gain;
    const Eigen::Matrix2d stage = (k >= 1) ? q : Eigen::Matrix2d::Zero();
    s = stage + a.transpose() * s * (a - b * gain);
    s = 0.5 * (s + s.transpose());
  }
  std::vector<Eigen::Vector2d> controls(horizon);
  Eigen::Vector2d e = x0 - goal;
  for (int k = 0; k < horizon; ++k) {
    controls[k] = -gains[k] * e;
    e = a * e + b * controls[k];
  }
  return controls;
}

}  // namespace atom::oracle

#endif  // ATOM_TESTS_ORACLES_LQR_ORACLE_H
