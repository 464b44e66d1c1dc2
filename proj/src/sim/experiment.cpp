#include "atom/sim/experiment.h"

#include <chrono>

#include "atom/predict/atom_predictor.h"

namespace atom {
namespace {

using nlohmann::json;

json PointsToJson(std::span<const Vec2> points) {
  json a = json::array();
  for (const auto& p : points) a.push_back(json::array({p.x(), p.y()}));
  return a;
}

std::vector<Vec2> PointsFromJson(const json& j) {
  std::vector<Vec2> out;
  out.reserve(j.size());
  for (const auto& p : j) out.emplace_back(p.at(0).get<double>(), p.at(1).get<double>());
  return out;
}

std::vector<Vec2> Positions(const Trajectory& t) {
  std::vector<Vec2> out;
  out.reserve(t.size());
  for (const auto& s : t.states) out.push_back(s.position);
  return out;
}

}  // namespace

StepLog ToStepLog(const StepRecord& rec) {
  StepLog log;
  log.round = rec.round;
  log.step = rec.step;
  log.positions = rec.state.Positions();
  log.next_positions = rec.next.Positions();
  for (const auto& c : rec.controls) log.controls.push_back(c.velocity);
  for (const auto& h : rec.prediction.humans) log.predicted_humans.push_back(Positions(h));
  if (rec.prediction.robot_by_human) log.predicted_robot_by_human = Positions(*rec.prediction.robot_by_human);
  log.robot_plan = Positions(rec.plan.trajectory);
  log.plan_cost = rec.plan.cost;
  log.plan_feasible = rec.plan.feasible;
  if (rec.belief_after) {
    const auto& b = *rec.belief_after;
    log.belief_mean.assign(b.mean.data(), b.mean.data() + b.mean.size());
    for (Eigen::Index i = 0; i < b.dim(); ++i) log.belief_cov_diag.push_back(b.covariance(i, i));
  }
  log.solver_iterations = rec.prediction.diagnostics.solver_iterations;
  log.solver_converged = rec.prediction.diagnostics.solver_converged;
  log.prediction_fallback = rec.prediction.diagnostics.fallback;
  log.update_applied = rec.update_applied;
  log.human_fallback = rec.human_fallback;
  return log;
}

json ToJson(const StepLog& log) {
  json humans = json::array();
  for (const auto& h : log.predicted_humans) humans.push_back(PointsToJson(h));
  return json{
      {"round", log.round},
      {"step", log.step},
      {"positions", PointsToJson(log.positions)},
      {"next_positions", PointsToJson(log.next_positions)},
      {"controls", PointsToJson(log.controls)},
      {"predicted_humans", humans},
      {"predicted_robot_by_human",
       log.predicted_robot_by_human ? PointsToJson(*log.predicted_robot_by_human) : json(nullptr)},
      {"robot_plan", PointsToJson(log.robot_plan)},
      {"plan_cost", log.plan_cost},
      {"plan_feasible", log.plan_feasible},
      {"belief_mean", log.belief_mean},
      {"belief_cov_diag", log.belief_cov_diag},
      {"flags",
       {{"solver_iterations", log.solver_iterations},
        {"solver_converged", log.solver_converged},
        {"prediction_fallback", log.prediction_fallback},
        {"update_applied", log.update_applied},
        {"human_fallback", log.human_fallback}}},
  };
}

StepLog StepLogFromJson(const json& j) {
  StepLog log;
  log.round = j.at("round").get<int>();
  log.step = j.at("step").get<int>();
  log.positions = PointsFromJson(j.at("positions"));
  log.next_positions = PointsFromJson(j.at("next_positions"));
  log.controls = PointsFromJson(j.at("controls"));
  for (const auto& h : j.at("predicted_humans")) log.predicted_humans.push_back(PointsFromJson(h));
  if (!j.at("predicted_robot_by_human").is_null()) {
    log.predicted_robot_by_human = PointsFromJson(j.at("predicted_robot_by_human"));
  }
  log.robot_plan = PointsFromJson(j.at("robot_plan"));
  log.plan_cost = j.at("plan_cost").get<double>();
  log.plan_feasible = j.at("plan_feasible").get<bool>();
  log.belief_mean = j.at("belief_mean").get<std::vector<double>>();
  log.belief_cov_diag = j.at("belief_cov_diag").get<std::vector<double>>();
  const json& f = j.at("flags");
  log.solver_iterations = f.at("solver_iterations").get<int>();
  log.solver_converged = f.at("solver_converged").get<bool>();
  log.prediction_fallback = f.at("prediction_fallback").get<bool>();
  log.update_applied = f.at("update_applied").get<bool>();
  log.human_fallback = f.at("human_fallback").get<bool>();
  return log;
}

std::vector<std::vector<Vec2>> RealizedPositions(std::span<const StepLog> logs) {
  std::vector<std::vector<Vec2>> out;
  if (logs.empty()) return out;
  out.push_back(logs.front().positions);
  for (std::size_t k = 0; k < logs.size(); ++k) {
    if (logs[k].step != logs.front().step + static_cast<int>(k) || logs[k].round != logs.front().round) {
      throw ValidationError("round logs are not consecutive");
    }
    out.push_back(logs[k].next_positions);
  }
  return out;
}

RoundMetrics ComputeRoundMetrics(const ScenarioConfig& cfg, const std::string& predictor,
                                 std::span<const StepLog> logs) {
  if (logs.empty()) throw ValidationError("cannot compute metrics of an empty round");
  const auto realized = RealizedPositions(logs);
  const std::size_t n = realized.front().size();
  std::vector<std::vector<Vec2>> per_agent(n);
  for (const auto& joint : realized) {
    for (std::size_t i = 0; i < n; ++i) per_agent[i].push_back(joint[i]);
  }

  RoundMetrics m;
  m.scenario = cfg.name;
  m.predictor = predictor;
  m.round = logs.front().round + 1;
  for (std::size_t h = 1; h < n; ++h) {
    std::vector<IssuedPrediction> issued;
    for (const auto& log : logs) {
      if (log.predicted_humans.size() >= h) issued.push_back({log.step, log.predicted_humans[h - 1]});
    }
    m.ade_humans.push_back(RoundAde(issued, per_agent[h]));
  }
  std::vector<IssuedPrediction> robot_issued;
  for (const auto& log : logs) {
    if (log.predicted_robot_by_human) robot_issued.push_back({log.step, *log.predicted_robot_by_human});
  }
  if (!robot_issued.empty()) m.ade_robot_by_human = RoundAde(robot_issued, per_agent[0]);

  const auto& robot = per_agent[0];
  const std::vector<std::vector<Vec2>> humans(per_agent.begin() + 1, per_agent.end());
  m.time_to_goal = ComputeTimeToGoal(robot, cfg.goals[0], cfg.goal_radius);
  const std::size_t until = m.time_to_goal == kNotReached ? robot.size() : m.time_to_goal + 1;
  m.detour = ComputeDetour(std::span(robot).first(until), cfg.starts[0], cfg.goals[0]);
  m.min_distance = ComputeMinDistance(robot, humans);
  m.collisions = CountCollisionSteps(robot, humans, cfg.collision_distance);
  return m;
}

ScenarioConfig ApplyOptions(ScenarioConfig cfg, const RunOptions& opts) {
  if (opts.predictor) cfg.predictor = *opts.predictor;
  if (opts.rounds) {
    if (*opts.rounds < 1) throw ValidationError("rounds must be >= 1");
    if (cfg.schedule.empty()) throw ValidationError("scenario has no schedule");
    while (static_cast<int>(cfg.schedule.size()) < *opts.rounds) cfg.schedule.push_back(cfg.schedule.back());
    cfg.schedule.resize(*opts.rounds);
    cfg.rounds = *opts.rounds;
  }
  if (opts.seed) {
    cfg.seed = *opts.seed;
    cfg.planner.seed = *opts.seed;
  }
  if (opts.reset_belief) cfg.reset_belief = true;
  Validate(cfg);
  return cfg;
}

std::vector<RoundResult> RunExperiment(const ScenarioConfig& cfg, const StepSink& sink) {
  Validate(cfg);
  Session session(cfg, MakePredictor(cfg, cfg.predictor), std::make_unique<SamplingPlanner>(cfg.planner));
  ScriptedHumans humans(cfg);
  std::vector<RoundResult> results;
  for (int r = 0; r < cfg.rounds; ++r) {
    RoundResult result;
    result.round = r;
    const auto t0 = std::chrono::steady_clock::now();
    try {
      session.BeginRound(r);
      humans.BeginRound(r);
      while (!session.RoundOver()) {
        StepLog log = ToStepLog(session.Step(humans));
        if (sink) sink(log);
        result.steps.push_back(std::move(log));
      }
    } catch (const std::exception& e) {
      result.error = e.what();
    }
    result.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (!result.steps.empty()) result.metrics = ComputeRoundMetrics(cfg, cfg.predictor, result.steps);
    results.push_back(std::move(result));
  }
  return results;
}

}  // namespace atom
