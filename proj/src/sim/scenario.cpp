#include "atom/sim/scenario.h"

#include <fstream>
#include <limits>
#include <sstream>

namespace atom {
namespace {

using nlohmann::json;

json ToJson(const Vec2& v) { return json::array({v.x(), v.y()}); }

Vec2 Vec2FromJson(const json& j) {
  if (!j.is_array() || j.size() != 2) throw ValidationError("expected [x, y]");
  return Vec2(j.at(0).get<double>(), j.at(1).get<double>());
}

json ToJson(const AgentParams& p) { return {{"v_max", p.v_max}, {"d", p.d}}; }

AgentParams ParamsFromJson(const json& j, AgentParams p = {}) {
  if (j.contains("v_max")) p.v_max = j.at("v_max").get<double>();
  if (j.contains("d")) p.d = j.at("d").get<double>();
  return p;
}

template <typename T>
void Read(const json& j, const char* key, T& out) {
  if (j.contains(key)) out = j.at(key).get<T>();
}

void ReadVec2(const json& j, const char* key, Vec2& out) {
  if (j.contains(key)) out = Vec2FromJson(j.at(key));
}

void ReadMatrix(const json& j, const char* key, Eigen::Matrix2d& out) {
  if (!j.contains(key)) return;
  const json& m = j.at(key);
  if (m.is_number()) {
    out = m.get<double>() * Eigen::Matrix2d::Identity();
    return;
  }
  if (!m.is_array() || m.size() != 2) throw ValidationError(std::string(key) + ": expected 2x2");
  for (int r = 0; r < 2; ++r) {
    if (!m.at(r).is_array() || m.at(r).size() != 2) throw ValidationError(std::string(key) + ": expected 2x2");
    for (int c = 0; c < 2; ++c) out(r, c) = m.at(r).at(c).get<double>();
  }
}

json ToJson(const Eigen::Matrix2d& m) {
  return json::array({json::array({m(0, 0), m(0, 1)}), json::array({m(1, 0), m(1, 1)})});
}

std::vector<Segment> Wall(double x0, double y0, double x1, double y1) {
  return {Segment{Vec2(x0, y0), Vec2(x1, y1)}};
}

}  // namespace

std::vector<AgentParams> LinearSchedule(AgentParams first, AgentParams last, int rounds) {
  std::vector<AgentParams> out(rounds);
  for (int r = 0; r < rounds; ++r) {
    const double s = rounds > 1 ? static_cast<double>(r) / (rounds - 1) : 0.0;
    out[r] = {first.v_max + s * (last.v_max - first.v_max), first.d + s * (last.d - first.d)};
  }
  return out;
}

namespace {

std::vector<std::vector<AgentParams>> Transpose(const std::vector<std::vector<AgentParams>>& per_human) {
  const std::size_t rounds = per_human.front().size();
  std::vector<std::vector<AgentParams>> out(rounds);
  for (std::size_t r = 0; r < rounds; ++r) {
    for (const auto& h : per_human) out[r].push_back(h[r]);
  }
  return out;
}

}  // namespace

ScenarioConfig ExchangeScenario() {
  ScenarioConfig c;
  c.name = "exchange";
  // The human lane sits 10 cm off the robot's: an exactly collinear head-on
  // start is a saddle of the game where nobody steps aside.
  c.starts = {Vec2(-4, 0), Vec2(4, 0.1)};
  c.goals = {Vec2(4, 0), Vec2(-4, 0.1)};
  c.rounds = 8;
  c.robot_speed_cap = 1.0;
  c.schedule = Transpose({LinearSchedule({0.5, 2.0}, {1.2, 0.8}, 8)});
  c.planner.speed_cap = c.robot_speed_cap;
  c.social_force.neighbor_strength = 3.0;
  c.social_force.neighbor_range = 0.4;
  return c;
}

ScenarioConfig CorridorScenario() {
  ScenarioConfig c;
  c.name = "corridor";
  c.starts = {Vec2(-4, 0), Vec2(-2.5, 0), Vec2(4, -0.4)};
  c.goals = {Vec2(4, 0), Vec2(4, 0.4), Vec2(-4, -0.4)};
  c.obstacle = Wall(-5, 1, 5, 1);
  c.obstacle.push_back({Vec2(-5, -1), Vec2(5, -1)});
  c.rounds = 8;
  c.robot_speed_cap = 1.0;
  // Human 1 slows down; its social radius first grows, then shrinks.
  auto h1 = LinearSchedule({0.9, 1.0}, {0.35, 0.8}, 8);
  const auto d_up = LinearSchedule({0, 1.0}, {0, 1.6}, 4);
  const auto d_down = LinearSchedule({0, 1.6}, {0, 0.8}, 5);
  for (int r = 0; r < 8; ++r) h1[r].d = r < 4 ? d_up[r].d : d_down[r - 3].d;
  c.schedule = Transpose({h1, LinearSchedule({0.5, 2.0}, {1.2, 0.8}, 8)});
  c.planner.speed_cap = c.robot_speed_cap;
  c.social_force.obstacle_strength = 5.0;
  c.social_force.obstacle_range = 0.25;
  return c;
}

ScenarioConfig DoorwayScenario() {
  ScenarioConfig c;
  c.name = "doorway";
  c.starts = {Vec2(-3, 0.8), Vec2(3, 0.8)};
  c.goals = {Vec2(3, -0.8), Vec2(-3, -0.8)};
  c.obstacle = Wall(0, -5, 0, -0.6);
  c.obstacle.push_back({Vec2(0, 0.6), Vec2(0, 5)});
  c.gates = {Vec2(0, 0)};
  c.rounds = 15;
  c.robot_speed_cap = 0.6;
  std::vector<AgentParams> h;
  for (int r = 0; r < 15; ++r) {
    h.push_back(r < 5 ? AgentParams{0.35, 2.0} : r < 10 ? AgentParams{0.7, 1.2} : AgentParams{1.2, 0.6});
  }
  c.schedule = Transpose({h});
  c.robot_model = {0.6, 1.0};
  c.planner.speed_cap = c.robot_speed_cap;
  c.social_force.obstacle_strength = 5.0;
  c.social_force.obstacle_range = 0.25;
  return c;
}

std::vector<std::string> BuiltinScenarioNames() { return {"exchange", "corridor", "doorway"}; }

ScenarioConfig BuiltinScenario(const std::string& name) {
  if (name == "exchange") return ExchangeScenario();
  if (name == "corridor") return CorridorScenario();
  if (name == "doorway") return DoorwayScenario();
  throw ValidationError("unknown scenario '" + name + "'");
}

GameSpec MakeGameSpec(const ScenarioConfig& cfg) {
  GameSpec spec;
  spec.goals = cfg.goals;
  spec.obstacle = cfg.MakeObstacle();
  spec.horizon = cfg.horizon;
  spec.dt = cfg.dt;
  spec.weights = cfg.game_weights;
  spec.x_min = cfg.x_min;
  spec.x_max = cfg.x_max;
  spec.u_max.assign(cfg.num_agents(), kMaxSpeedParam);
  spec.u_max[0] = cfg.robot_speed_cap;
  return spec;
}

std::vector<Vec2> RoutedGoals(const ScenarioConfig& cfg, const Obstacle& obstacle,
                              const JointState& joint) {
  std::vector<Vec2> out = cfg.goals;
  if (cfg.gates.empty()) return out;
  for (std::size_t i = 0; i < out.size() && i < joint.size(); ++i) {
    const Vec2& p = joint.position(i);
    if (!Blocked(p, cfg.goals[i], obstacle)) continue;
    double best = std::numeric_limits<double>::infinity();
    for (const auto& g : cfg.gates) {
      if (Blocked(p, g, obstacle)) continue;
      const double len = (g - p).norm() + (cfg.goals[i] - g).norm();
      if (len < best) {
        best = len;
        out[i] = g;
      }
    }
  }
  return out;
}

void Validate(const ScenarioConfig& cfg) {
  const std::size_t n = cfg.starts.size();
  if (n < 2) throw ValidationError("a scenario needs a robot and at least one human");
  if (cfg.goals.size() != n) throw ValidationError("starts and goals differ in length");
  for (std::size_t i = 0; i < n; ++i) {
    if (!IsFinite(cfg.starts[i]) || !IsFinite(cfg.goals[i])) throw ValidationError("non-finite start or goal");
  }
  if (cfg.rounds < 1) throw ValidationError("rounds must be >= 1");
  if (static_cast<int>(cfg.schedule.size()) != cfg.rounds) {
    throw ValidationError("schedule length must equal the number of rounds");
  }
  for (const auto& round : cfg.schedule) {
    if (round.size() != n - 1) throw ValidationError("schedule needs one entry per human");
    for (const auto& p : round) {
      if (!WithinBox(p)) throw ValidationError("scheduled parameters outside the parameter box");
      if (p.v_max < kMinHumanSpeed - 1e-12 || p.v_max > kMaxHumanSpeed + 1e-12) {
        throw ValidationError("scheduled human speed outside [0.35, 1.2] m/s");
      }
    }
  }
  if (!WithinBox(cfg.robot_model)) throw ValidationError("robot model outside the parameter box");
  if (!(cfg.robot_speed_cap > 0.0)) throw ValidationError("robot speed cap must be positive");
  if (!(cfg.dt > 0.0)) throw ValidationError("dt must be positive");
  if (cfg.max_steps < 1) throw ValidationError("max_steps must be >= 1");
  if (!(cfg.goal_radius > 0.0)) throw ValidationError("goal radius must be positive");
  if (!(cfg.collision_distance > 0.0)) throw ValidationError("collision distance must be positive");
  if (cfg.predictor != "atom" && cfg.predictor != "cv" && cfg.predictor != "sf") {
    throw ValidationError("predictor must be atom, cv or sf");
  }
  if (!WithinBox(cfg.belief.initial_mean)) throw ValidationError("initial belief outside the box");
  if (!(cfg.belief.initial_variance > 0.0) || !(cfg.belief.process_variance >= 0.0) ||
      !(cfg.belief.measurement_variance > 0.0)) {
    throw ValidationError("belief variances must be positive");
  }
  if (cfg.belief.measurement_steps < 1 || cfg.belief.measurement_steps > cfg.horizon) {
    throw ValidationError("measurement_steps must lie in [1, horizon]");
  }
  if (std::abs(cfg.planner.dt - cfg.dt) > 1e-12) throw ValidationError("planner dt != scenario dt");
  if (cfg.planner.speed_cap > cfg.robot_speed_cap + 1e-12) {
    throw ValidationError("planner speed cap exceeds the robot speed cap");
  }
  Validate(cfg.planner);
  Validate(cfg.social_force);
  Obstacle check(cfg.obstacle);
  (void)check;
  Validate(MakeGameSpec(cfg));
}

void to_json(nlohmann::json& j, const ScenarioConfig& c) {
  json starts = json::array(), goals = json::array(), obstacle = json::array(),
       gates = json::array();
  for (const auto& p : c.starts) starts.push_back(ToJson(p));
  for (const auto& p : c.goals) goals.push_back(ToJson(p));
  for (const auto& p : c.gates) gates.push_back(ToJson(p));
  for (const auto& s : c.obstacle) obstacle.push_back(json::array({ToJson(s.a), ToJson(s.b)}));
  json schedule = json::array();
  for (const auto& round : c.schedule) {
    json r = json::array();
    for (const auto& p : round) r.push_back(ToJson(p));
    schedule.push_back(r);
  }
  const auto& w = c.game_weights;
  const auto& b = c.belief;
  const auto& pl = c.planner;
  const auto& sf = c.social_force;
  j = json{
      {"name", c.name},
      {"starts", starts},
      {"goals", goals},
      {"obstacle", obstacle},
      {"gates", gates},
      {"rounds", c.rounds},
      {"robot_speed_cap", c.robot_speed_cap},
      {"dt", c.dt},
      {"max_steps", c.max_steps},
      {"goal_radius", c.goal_radius},
      {"collision_distance", c.collision_distance},
      {"schedule", schedule},
      {"robot_model", ToJson(c.robot_model)},
      {"predictor", c.predictor},
      {"horizon", c.horizon},
      {"game",
       {{"Q", ToJson(w.state)},
        {"R", ToJson(w.control)},
        {"w_s", w.social},
        {"w_o", w.obstacle},
        {"d_o", w.obstacle_distance},
        {"bounds_penalty", w.bounds_penalty},
        {"x_min", ToJson(c.x_min)},
        {"x_max", ToJson(c.x_max)}}},
      {"belief",
       {{"initial_mean", ToJson(b.initial_mean)},
        {"initial_variance", b.initial_variance},
        {"process_variance", b.process_variance},
        {"measurement_variance", b.measurement_variance},
        {"measurement_steps", b.measurement_steps},
        {"alpha", b.hyper.alpha},
        {"beta", b.hyper.beta},
        {"kappa", b.hyper.kappa},
        {"reset_each_round", c.reset_belief}}},
      {"planner",
       {{"horizon", pl.horizon},
        {"samples", pl.samples},
        {"goal_weight", pl.goal_weight},
        {"effort_weight", pl.effort_weight},
        {"clearance_weight", pl.clearance_weight},
        {"clearance_margin", pl.clearance_margin},
        {"r_col", pl.r_col},
        {"obstacle_clearance", pl.obstacle_clearance},
        {"heading_sigma", pl.heading_sigma},
        {"speed_sigma", pl.speed_sigma}}},
      {"social_force",
       {{"goal_gain", sf.goal_gain},
        {"neighbor_strength", sf.neighbor_strength},
        {"neighbor_range", sf.neighbor_range},
        {"obstacle_strength", sf.obstacle_strength},
        {"obstacle_range", sf.obstacle_range},
        {"relaxation_time", sf.relaxation_time},
        {"desired_speed", sf.desired_speed},
        {"radius", sf.radius}}},
      {"seed", c.seed},
  };
}

void from_json(const nlohmann::json& j, ScenarioConfig& c) {
  if (!j.is_object()) throw ValidationError("scenario config must be a JSON object");
  if (j.contains("base")) c = BuiltinScenario(j.at("base").get<std::string>());
  Read(j, "name", c.name);
  if (j.contains("starts")) {
    c.starts.clear();
    for (const auto& p : j.at("starts")) c.starts.push_back(Vec2FromJson(p));
  }
  if (j.contains("goals")) {
    c.goals.clear();
    for (const auto& p : j.at("goals")) c.goals.push_back(Vec2FromJson(p));
  }
  if (j.contains("obstacle")) {
    c.obstacle.clear();
    for (const auto& s : j.at("obstacle")) {
      if (!s.is_array() || s.size() != 2) throw ValidationError("obstacle segment must be [[x,y],[x,y]]");
      c.obstacle.push_back({Vec2FromJson(s.at(0)), Vec2FromJson(s.at(1))});
    }
  }
  if (j.contains("gates")) {
    c.gates.clear();
    for (const auto& p : j.at("gates")) c.gates.push_back(Vec2FromJson(p));
  }
  Read(j, "rounds", c.rounds);
  Read(j, "robot_speed_cap", c.robot_speed_cap);
  Read(j, "dt", c.dt);
  Read(j, "max_steps", c.max_steps);
  Read(j, "goal_radius", c.goal_radius);
  Read(j, "collision_distance", c.collision_distance);
  if (j.contains("schedule")) {
    c.schedule.clear();
    for (const auto& round : j.at("schedule")) {
      std::vector<AgentParams> r;
      for (const auto& p : round) r.push_back(ParamsFromJson(p));
      c.schedule.push_back(r);
    }
  }
  if (j.contains("robot_model")) c.robot_model = ParamsFromJson(j.at("robot_model"), c.robot_model);
  Read(j, "predictor", c.predictor);
  Read(j, "horizon", c.horizon);
  if (j.contains("game")) {
    const json& g = j.at("game");
    ReadMatrix(g, "Q", c.game_weights.state);
    ReadMatrix(g, "R", c.game_weights.control);
    Read(g, "w_s", c.game_weights.social);
    Read(g, "w_o", c.game_weights.obstacle);
    Read(g, "d_o", c.game_weights.obstacle_distance);
    Read(g, "bounds_penalty", c.game_weights.bounds_penalty);
    ReadVec2(g, "x_min", c.x_min);
    ReadVec2(g, "x_max", c.x_max);
  }
  if (j.contains("belief")) {
    const json& b = j.at("belief");
    if (b.contains("initial_mean")) c.belief.initial_mean = ParamsFromJson(b.at("initial_mean"), c.belief.initial_mean);
    Read(b, "initial_variance", c.belief.initial_variance);
    Read(b, "process_variance", c.belief.process_variance);
    Read(b, "measurement_variance", c.belief.measurement_variance);
    Read(b, "measurement_steps", c.belief.measurement_steps);
    Read(b, "alpha", c.belief.hyper.alpha);
    Read(b, "beta", c.belief.hyper.beta);
    Read(b, "kappa", c.belief.hyper.kappa);
    Read(b, "reset_each_round", c.reset_belief);
  }
  if (j.contains("planner")) {
    const json& p = j.at("planner");
    Read(p, "horizon", c.planner.horizon);
    Read(p, "samples", c.planner.samples);
    Read(p, "goal_weight", c.planner.goal_weight);
    Read(p, "effort_weight", c.planner.effort_weight);
    Read(p, "clearance_weight", c.planner.clearance_weight);
    Read(p, "clearance_margin", c.planner.clearance_margin);
    Read(p, "r_col", c.planner.r_col);
    Read(p, "obstacle_clearance", c.planner.obstacle_clearance);
    Read(p, "heading_sigma", c.planner.heading_sigma);
    Read(p, "speed_sigma", c.planner.speed_sigma);
  }
  if (j.contains("social_force")) {
    const json& s = j.at("social_force");
    Read(s, "goal_gain", c.social_force.goal_gain);
    Read(s, "neighbor_strength", c.social_force.neighbor_strength);
    Read(s, "neighbor_range", c.social_force.neighbor_range);
    Read(s, "obstacle_strength", c.social_force.obstacle_strength);
    Read(s, "obstacle_range", c.social_force.obstacle_range);
    Read(s, "relaxation_time", c.social_force.relaxation_time);
    Read(s, "desired_speed", c.social_force.desired_speed);
    Read(s, "radius", c.social_force.radius);
  }
  Read(j, "seed", c.seed);
  // The planner shares the scenario clock and speed cap.
  c.planner.dt = c.dt;
  c.planner.speed_cap = c.robot_speed_cap;
  c.planner.seed = c.seed;
}

ScenarioConfig LoadScenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open config '" + path + "'");
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw ValidationError("config '" + path + "': " + e.what());
  }
  ScenarioConfig cfg;
  try {
    cfg = j.get<ScenarioConfig>();
  } catch (const json::exception& e) {
    throw ValidationError("config '" + path + "': " + e.what());
  }
  Validate(cfg);
  return cfg;
}

void SaveScenario(const ScenarioConfig& cfg, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw ValidationError("cannot write '" + path + "'");
  out << json(cfg).dump(2) << '\n';
}

}  // namespace atom
