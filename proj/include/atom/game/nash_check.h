#ifndef ATOM_GAME_NASH_CHECK_H
#define ATOM_GAME_NASH_CHECK_H

#include <cstdint>

#include "atom/game/game_spec.h"

namespace atom {

// Largest unilateral cost decrease found by probing each player's strategy
// while the others are held fixed. For every player this draws `n_probes`
// random perturbations of its whole control sequence (at several scales) and
// `n_probes` line probes along random directions. Perturbed controls are
// clamped to the player's cap. Returns max(0, best gain).
double VerifyNash(const NashSolution& solution, const JointState& start, const GameSpec& spec,
                  const BehaviorParams& params, int n_probes, std::uint64_t seed);

}  // namespace atom

#endif  // ATOM_GAME_NASH_CHECK_H
