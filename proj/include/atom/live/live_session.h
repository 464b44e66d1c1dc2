///////////////////////////////////////////////////////////////////////////////
//
// A live session: the simulation loop driven by one remote human controller.
//
// The session owns no clock. Whoever hosts it calls Tick() at a fixed rate;
// controls may arrive at any time from another thread and only the latest one
// is consumed by the next tick. A tick with no fresh control holds the human
// still. Everything a tick consumes is written to the optional recording, so a
// recording can be replayed offline into the same states.
//
///////////////////////////////////////////////////////////////////////////////

#ifndef ATOM_LIVE_LIVE_SESSION_H
#define ATOM_LIVE_LIVE_SESSION_H

#include <nlohmann/json.hpp>

#include <cstdint>
#include <memory>
#include <mutex>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "atom/sim/experiment.h"

namespace atom {

// Live sessions run for at most this many rounds; the scenario schedule is
// stretched to it (scripted extra humans keep the last entry).
inline constexpr int kMaxLiveRounds = 100;
// Controls stamped older than current tick - kStaleTicks are dropped.
inline constexpr int kStaleTicks = 2;

struct RoundOutcome {
  int round = 0;  // 1-based
  int time_to_goal = kNotReached;
  double min_distance = 0.0;
  // "robot", "human", "tie" or "none" in the doorway; empty elsewhere.
  std::string crossed_first;
  RoundMetrics metrics;
};

// Who crossed x = 0 first (robot vs the first human), from realized positions.
std::string CrossedFirst(std::span<const std::vector<Vec2>> realized);

struct TickResult {
  std::int64_t tick = 0;       // tick that was executed
  StepLog step;
  bool control_received = false;
  std::optional<RoundOutcome> finished;  // set when this tick completed a round
};

class LiveSession {
 public:
  LiveSession(std::string id, const ScenarioConfig& cfg);

  const std::string& id() const { return id_; }
  const ScenarioConfig& config() const { return cfg_; }

  // Thread-safe. Returns false (and ignores the control) when it is stale.
  bool SubmitControl(std::int64_t tick, const Vec2& velocity);

  // One loop iteration with the latest control. Not reentrant.
  TickResult Tick();

  // Teleports everyone back to the starts, keeping the round counter, the
  // completed-round report and (unless asked) the belief.
  void ResetRound(bool reset_belief);

  // Next tick to execute.
  std::int64_t tick() const;
  int round() const { return session_.round(); }
  int round_step() const { return session_.state().timestep_index; }
  const JointState& state() const { return session_.state(); }
  const std::optional<StepLog>& last_step() const { return last_; }
  const std::vector<RoundOutcome>& report() const { return report_; }

  // Appends one JSON object per line: the config first, then every received
  // control, every executed step and every reset.
  void SetRecorder(std::unique_ptr<std::ostream> out);

 private:
  void Record(const nlohmann::json& j);

  std::string id_;
  ScenarioConfig cfg_;
  Session session_;
  std::unique_ptr<ScriptedHumans> others_;  // humans beyond the first, if any
  std::vector<StepLog> round_steps_;
  std::vector<RoundOutcome> report_;
  std::optional<StepLog> last_;
  std::unique_ptr<std::ostream> recorder_;

  mutable std::mutex mu_;  // guards the fields below and the recorder
  std::int64_t tick_ = 0;
  std::optional<Vec2> pending_;
};

// Config actually used by a live session built from `cfg`.
ScenarioConfig LiveConfig(ScenarioConfig cfg);

struct ReplayResult {
  ScenarioConfig config;
  std::vector<RoundResult> rounds;  // completed rounds only
  // Largest |replayed - recorded| position difference over all steps.
  double max_state_error = 0.0;
  int steps = 0;
};

// Re-runs a recording through a fresh offline session, feeding it the human
// controls the live session executed.
ReplayResult ReplayRecording(std::istream& in);

}  // namespace atom

#endif  // ATOM_LIVE_LIVE_SESSION_H
