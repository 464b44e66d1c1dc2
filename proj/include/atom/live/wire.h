///////////////////////////////////////////////////////////////////////////////
//
// Wire schema between the live server and its browser client. JSON text
// frames, each carrying "v", "type", "session" and "tick".
//
// server -> client: scenario, state, predictions, belief_diag, round_summary,
//                   error
// client -> server: control {vx, vy}, reset_round {reset_belief},
//                   set_scenario {scenario}
//
// Server messages carry the next tick to execute; a client stamps its control
// with the last tick it has seen.
//
///////////////////////////////////////////////////////////////////////////////

#ifndef ATOM_LIVE_WIRE_H
#define ATOM_LIVE_WIRE_H

#include <nlohmann/json.hpp>

#include <cstdint>
#include <string>
#include <vector>

#include "atom/live/live_session.h"

namespace atom {

inline constexpr int kWireVersion = 1;

class WireError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

struct ClientMessage {
  enum class Type { kControl, kResetRound, kSetScenario };
  Type type = Type::kControl;
  std::string session;
  std::int64_t tick = 0;
  Vec2 velocity = Vec2::Zero();  // control
  bool reset_belief = false;     // reset_round
  std::string scenario;          // set_scenario
};

// Throws WireError on malformed JSON, a wrong version, an unknown type or
// missing fields.
ClientMessage ParseClientMessage(const std::string& text);
nlohmann::json ToJson(const ClientMessage& m);

// Scenario geometry and limits, sent on connect and after set_scenario.
nlohmann::json ScenarioMessage(const LiveSession& s);
// Current positions, round and last executed controls.
nlohmann::json StateMessage(const LiveSession& s);
// Robot's prediction of the humans, the human-predicted robot motion and the
// robot plan from the most recent tick.
nlohmann::json PredictionsMessage(const LiveSession& s);
// Belief mean and covariance diagonal with parameter labels.
nlohmann::json BeliefMessage(const LiveSession& s);
nlohmann::json RoundSummaryMessage(const LiveSession& s, const RoundOutcome& o);
nlohmann::json ErrorMessage(const std::string& session, std::int64_t tick, const std::string& what);

// Everything broadcast after one tick, in order.
std::vector<std::string> TickMessages(const LiveSession& s, const TickResult& r);

}  // namespace atom

#endif  // ATOM_LIVE_WIRE_H
