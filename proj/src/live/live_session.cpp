#include "atom/live/live_session.h"

#include <algorithm>
#include <cmath>
#include <istream>

#include "atom/core/dynamics.h"
#include "atom/predict/atom_predictor.h"

namespace atom {
namespace {

using nlohmann::json;

void ResetBeliefOf(HumanPredictor& p) {
  if (auto* atom = dynamic_cast<AtomPredictor*>(&p)) atom->ResetBelief();
}

int NextRound(int round) { return std::min(round + 1, kMaxLiveRounds - 1); }

double MaxDiff(const std::vector<Vec2>& a, const std::vector<Vec2>& b) {
  if (a.size() != b.size()) return INFINITY;
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, (a[i] - b[i]).norm());
  return m;
}

RoundOutcome Outcome(const ScenarioConfig& cfg, std::span<const StepLog> steps) {
  RoundOutcome o;
  o.metrics = ComputeRoundMetrics(cfg, cfg.predictor, steps);
  o.round = o.metrics.round;
  o.time_to_goal = o.metrics.time_to_goal;
  o.min_distance = o.metrics.min_distance;
  if (cfg.name == "doorway") o.crossed_first = CrossedFirst(RealizedPositions(steps));
  return o;
}

}  // namespace

std::string CrossedFirst(std::span<const std::vector<Vec2>> realized) {
  if (realized.empty() || realized.front().size() < 2) return "none";
  auto first_flip = [&](std::size_t agent) {
    const double x0 = realized.front()[agent].x();
    for (std::size_t k = 1; k < realized.size(); ++k) {
      const double x = realized[k][agent].x();
      if ((x0 < 0.0 && x >= 0.0) || (x0 > 0.0 && x <= 0.0)) return static_cast<long>(k);
    }
    return -1L;
  };
  const long robot = first_flip(0);
  const long human = first_flip(1);
  if (robot < 0 && human < 0) return "none";
  if (human < 0 || (robot >= 0 && robot < human)) return "robot";
  if (robot < 0 || human < robot) return "human";
  return "tie";
}

ScenarioConfig LiveConfig(ScenarioConfig cfg) {
  if (cfg.rounds == kMaxLiveRounds && static_cast<int>(cfg.schedule.size()) == kMaxLiveRounds) return cfg;
  RunOptions o;
  o.rounds = kMaxLiveRounds;
  return ApplyOptions(std::move(cfg), o);
}

LiveSession::LiveSession(std::string id, const ScenarioConfig& cfg)
    : id_(std::move(id)), cfg_(LiveConfig(cfg)),
      session_(cfg_, MakePredictor(cfg_, cfg_.predictor), std::make_unique<SamplingPlanner>(cfg_.planner)) {
  if (cfg_.num_humans() > 1) others_ = std::make_unique<ScriptedHumans>(cfg_);
}

std::int64_t LiveSession::tick() const {
  std::lock_guard lock(mu_);
  return tick_;
}

void LiveSession::SetRecorder(std::unique_ptr<std::ostream> out) {
  {
    std::lock_guard lock(mu_);
    recorder_ = std::move(out);
  }
  Record({{"kind", "config"}, {"session", id_}, {"config", cfg_}});
}

void LiveSession::Record(const json& j) {
  std::lock_guard lock(mu_);
  if (recorder_) *recorder_ << j.dump() << '\n' << std::flush;
}

bool LiveSession::SubmitControl(std::int64_t tick, const Vec2& velocity) {
  if (!IsFinite(velocity)) return false;
  std::int64_t now;
  {
    std::lock_guard lock(mu_);
    now = tick_;
    if (tick < tick_ - kStaleTicks) return false;
    pending_ = velocity;  // last writer wins
  }
  Record({{"kind", "input"}, {"tick", tick}, {"at", now}, {"v", {velocity.x(), velocity.y()}}});
  return true;
}

TickResult LiveSession::Tick() {
  TickResult out;
  std::optional<Vec2> control;
  {
    std::lock_guard lock(mu_);
    out.tick = tick_;
    control.swap(pending_);
  }
  out.control_received = control.has_value();

  std::vector<Control> controls{{ClampSpeed(control.value_or(Vec2::Zero()), kMaxHumanSpeed)}};
  if (others_) {
    const HumanAction scripted = others_->Act(session_.state());
    controls.insert(controls.end(), scripted.controls.begin() + 1, scripted.controls.end());
  }
  out.step = ToStepLog(session_.Step(controls));
  Record({{"kind", "step"}, {"tick", out.tick}, {"received", out.control_received}, {"step", ToJson(out.step)}});
  round_steps_.push_back(out.step);
  last_ = out.step;
  {
    std::lock_guard lock(mu_);
    ++tick_;
  }

  if (session_.RoundOver()) {
    RoundOutcome o = Outcome(cfg_, round_steps_);
    Record({{"kind", "round"}, {"tick", out.tick}, {"round", o.round}, {"crossed_first", o.crossed_first},
            {"time_to_goal", o.time_to_goal}, {"min_distance", o.min_distance}});
    report_.push_back(o);
    out.finished = std::move(o);
    const int next = NextRound(session_.round());
    session_.BeginRound(next);
    if (others_) others_->BeginRound(next);
    round_steps_.clear();
  }
  return out;
}

void LiveSession::ResetRound(bool reset_belief) {
  Record({{"kind", "reset_round"}, {"tick", tick()}, {"reset_belief", reset_belief}});
  if (reset_belief) ResetBeliefOf(session_.predictor());
  session_.BeginRound(session_.round());
  if (others_) others_->BeginRound(session_.round());
  round_steps_.clear();
}

ReplayResult ReplayRecording(std::istream& in) {
  ReplayResult out;
  std::optional<Session> session;
  std::vector<StepLog> steps;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    const json j = json::parse(line);
    const std::string kind = j.at("kind");
    if (kind == "config") {
      if (session) throw ValidationError("recording has two config records");
      out.config = LiveConfig(j.at("config").get<ScenarioConfig>());
      session.emplace(out.config, MakePredictor(out.config, out.config.predictor),
                      std::make_unique<SamplingPlanner>(out.config.planner));
      continue;
    }
    if (!session) throw ValidationError("recording does not start with a config record");
    if (kind == "step") {
      const StepLog recorded = StepLogFromJson(j.at("step"));
      if (recorded.controls.size() != session->state().size()) {
        throw ValidationError("step record " + std::to_string(lineno) + " has the wrong agent count");
      }
      std::vector<Control> controls;
      for (std::size_t i = 1; i < recorded.controls.size(); ++i) controls.push_back({recorded.controls[i]});
      StepLog log = ToStepLog(session->Step(controls));
      out.max_state_error = std::max({out.max_state_error, MaxDiff(log.positions, recorded.positions),
                                      MaxDiff(log.next_positions, recorded.next_positions)});
      ++out.steps;
      steps.push_back(std::move(log));
      if (session->RoundOver()) {
        RoundResult r;
        r.round = session->round();
        r.metrics = ComputeRoundMetrics(out.config, out.config.predictor, steps);
        r.steps = std::move(steps);
        out.rounds.push_back(std::move(r));
        steps.clear();
        session->BeginRound(NextRound(session->round()));
      }
    } else if (kind == "reset_round") {
      if (j.value("reset_belief", false)) ResetBeliefOf(session->predictor());
      session->BeginRound(session->round());
      steps.clear();
    }
    // "input" and "round" records are informational
  }
  if (!session) throw ValidationError("empty recording");
  return out;
}

}  // namespace atom
