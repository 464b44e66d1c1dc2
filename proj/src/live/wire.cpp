#include "atom/live/wire.h"

#include <cmath>

namespace atom {
namespace {

using nlohmann::json;

json Points(std::span<const Vec2> points) {
  json a = json::array();
  for (const auto& p : points) a.push_back(json::array({p.x(), p.y()}));
  return a;
}

json Header(const std::string& type, const std::string& session, std::int64_t tick) {
  return json{{"v", kWireVersion}, {"type", type}, {"session", session}, {"tick", tick}};
}

template <typename T>
T Field(const json& j, const char* key) {
  if (!j.contains(key)) throw WireError(std::string("missing field '") + key + "'");
  try {
    return j.at(key).get<T>();
  } catch (const json::exception&) {
    throw WireError(std::string("bad field '") + key + "'");
  }
}

}  // namespace

ClientMessage ParseClientMessage(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw WireError(std::string("not JSON: ") + e.what());
  }
  if (!j.is_object()) throw WireError("message must be an object");
  if (Field<int>(j, "v") != kWireVersion) throw WireError("unsupported version");
  ClientMessage m;
  m.session = Field<std::string>(j, "session");
  m.tick = Field<std::int64_t>(j, "tick");
  const auto type = Field<std::string>(j, "type");
  if (type == "control") {
    m.type = ClientMessage::Type::kControl;
    m.velocity = Vec2(Field<double>(j, "vx"), Field<double>(j, "vy"));
    if (!IsFinite(m.velocity)) throw WireError("non-finite control");
  } else if (type == "reset_round") {
    m.type = ClientMessage::Type::kResetRound;
    m.reset_belief = j.contains("reset_belief") ? Field<bool>(j, "reset_belief") : false;
  } else if (type == "set_scenario") {
    m.type = ClientMessage::Type::kSetScenario;
    m.scenario = Field<std::string>(j, "scenario");
  } else {
    throw WireError("unknown message type '" + type + "'");
  }
  return m;
}

json ToJson(const ClientMessage& m) {
  switch (m.type) {
    case ClientMessage::Type::kControl: {
      json j = Header("control", m.session, m.tick);
      j["vx"] = m.velocity.x();
      j["vy"] = m.velocity.y();
      return j;
    }
    case ClientMessage::Type::kResetRound: {
      json j = Header("reset_round", m.session, m.tick);
      j["reset_belief"] = m.reset_belief;
      return j;
    }
    case ClientMessage::Type::kSetScenario: {
      json j = Header("set_scenario", m.session, m.tick);
      j["scenario"] = m.scenario;
      return j;
    }
  }
  return {};
}

json ScenarioMessage(const LiveSession& s) {
  const ScenarioConfig& c = s.config();
  json j = Header("scenario", s.id(), s.tick());
  j["name"] = c.name;
  j["starts"] = Points(c.starts);
  j["goals"] = Points(c.goals);
  json walls = json::array();
  for (const auto& seg : c.obstacle) walls.push_back(Points(std::vector<Vec2>{seg.a, seg.b}));
  j["obstacle"] = walls;
  j["bounds"] = Points(std::vector<Vec2>{c.x_min, c.x_max});
  j["dt"] = c.dt;
  j["horizon"] = c.horizon;
  j["goal_radius"] = c.goal_radius;
  j["human_speed_cap"] = kMaxHumanSpeed;
  j["robot_speed_cap"] = c.robot_speed_cap;
  j["predictor"] = c.predictor;
  return j;
}

json StateMessage(const LiveSession& s) {
  json j = Header("state", s.id(), s.tick());
  j["round"] = s.round() + 1;
  j["round_step"] = s.round_step();
  j["positions"] = Points(s.state().Positions());
  j["controls"] = s.last_step() ? Points(s.last_step()->controls) : json::array();
  return j;
}

json PredictionsMessage(const LiveSession& s) {
  json j = Header("predictions", s.id(), s.tick());
  const auto& last = s.last_step();
  json humans = json::array();
  if (last) {
    for (const auto& h : last->predicted_humans) humans.push_back(Points(h));
  }
  j["humans"] = humans;
  j["robot_by_human"] = last && last->predicted_robot_by_human ? Points(*last->predicted_robot_by_human) : json();
  j["robot_plan"] = last ? Points(last->robot_plan) : json::array();
  return j;
}

json BeliefMessage(const LiveSession& s) {
  json j = Header("belief_diag", s.id(), s.tick());
  const auto& last = s.last_step();
  j["mean"] = last ? last->belief_mean : std::vector<double>{};
  j["cov_diag"] = last ? last->belief_cov_diag : std::vector<double>{};
  json labels = json::array();
  const std::size_t n = last ? last->belief_mean.size() / 2 : 0;
  for (std::size_t i = 0; i < n; ++i) {
    const std::string who = i == 0 ? "robot" : "h" + std::to_string(i);
    labels.push_back(who + ".v_max");
    labels.push_back(who + ".d");
  }
  j["labels"] = labels;
  return j;
}

json RoundSummaryMessage(const LiveSession& s, const RoundOutcome& o) {
  json j = Header("round_summary", s.id(), s.tick());
  j["round"] = o.round;
  j["time_to_goal"] = o.time_to_goal == kNotReached ? json() : json(o.time_to_goal * s.config().dt);
  j["time_to_goal_steps"] = o.time_to_goal;
  j["min_distance"] = o.min_distance;
  j["collisions"] = o.metrics.collisions;
  j["detour"] = o.metrics.detour;
  if (!o.crossed_first.empty()) j["crossed_first"] = o.crossed_first;
  return j;
}

json ErrorMessage(const std::string& session, std::int64_t tick, const std::string& what) {
  json j = Header("error", session, tick);
  j["message"] = what;
  return j;
}

std::vector<std::string> TickMessages(const LiveSession& s, const TickResult& r) {
  std::vector<std::string> out;
  if (r.finished) out.push_back(RoundSummaryMessage(s, *r.finished).dump());
  out.push_back(StateMessage(s).dump());
  out.push_back(PredictionsMessage(s).dump());
  out.push_back(BeliefMessage(s).dump());
  return out;
}

}  // namespace atom
