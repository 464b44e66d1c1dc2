#include "atom/game/nash_check.h"

#include <algorithm>
#include <array>
#include <random>

namespace atom {
namespace {

double PlayerCost(std::size_t player, const JointState& start, const GameSpec& spec,
                  const BehaviorParams& params, const std::vector<ControlSequence>& controls,
                  const std::vector<double>& caps) {
  const auto trajectories = Rollout(start, controls, caps);
  // Rollout clamps internally; the cost must see the clamped controls too.
  std::vector<ControlSequence> applied = controls;
  for (std::size_t j = 0; j < applied.size(); ++j) {
    for (auto& c : applied[j]) c.velocity = ClampSpeed(c.velocity, caps[j]);
  }
  return EvaluateCost(player, trajectories, applied, spec, params);
}

}  // namespace

double VerifyNash(const NashSolution& solution, const JointState& start, const GameSpec& spec,
                  const BehaviorParams& params, int n_probes, std::uint64_t seed) {
  const auto caps = EffectiveSpeedCaps(params, spec.u_max);
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  constexpr std::array<double, 4> kScales = {1e-3, 1e-2, 1e-1, 3e-1};
  constexpr std::array<double, 6> kSteps = {1e-4, 1e-3, 1e-2, 5e-2, 1e-1, 3e-1};

  double best_gain = 0.0;
  for (std::size_t player = 0; player < solution.controls.size(); ++player) {
    const double base = PlayerCost(player, start, spec, params, solution.controls, caps);
    const std::size_t horizon = solution.controls[player].size();
    std::vector<ControlSequence> probe = solution.controls;

    auto try_direction = [&](const std::vector<Vec2>& dir, double scale) {
      for (std::size_t k = 0; k < horizon; ++k) {
        probe[player][k].velocity = solution.controls[player][k].velocity + scale * dir[k];
      }
      const double cost = PlayerCost(player, start, spec, params, probe, caps);
      best_gain = std::max(best_gain, base - cost);
    };

    std::vector<Vec2> dir(horizon);
    for (int p = 0; p < n_probes; ++p) {
      for (auto& d : dir) d = Vec2(normal(rng), normal(rng));
      try_direction(dir, kScales[p % kScales.size()]);
    }
    for (int p = 0; p < n_probes; ++p) {
      double norm2 = 0.0;
      for (auto& d : dir) {
        d = Vec2(normal(rng), normal(rng));
        norm2 += d.squaredNorm();
      }
      const double inv = 1.0 / std::sqrt(norm2);
      for (auto& d : dir) d *= inv;
      for (double step : kSteps) {
        try_direction(dir, step);
        try_direction(dir, -step);
      }
    }
  }
  return best_gain;
}

}  // namespace atom
