#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <regex>
#include <sstream>
#include <stack>

#include "atom/sim/experiment.h"
#include "atom/sim/report.h"

namespace fs = std::filesystem;

namespace atom {
namespace {

ScenarioConfig Short(const std::string& predictor) {
  RunOptions o;
  o.predictor = predictor;
  o.rounds = 2;
  o.seed = 3;
  return ApplyOptions(ExchangeScenario(), o);
}

fs::path TempDir(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("atom_test_" + name);
  fs::remove_all(p);
  return p;
}

std::string CsvOf(const std::vector<RoundResult>& results) {
  std::vector<RoundMetrics> rows;
  for (const auto& r : results) rows.push_back(*r.metrics);
  std::ostringstream out;
  WriteMetricsCsv(out, rows);
  return out.str();
}

void ExpectOptNear(const std::optional<double>& a, const std::optional<double>& b, double tol) {
  ASSERT_EQ(a.has_value(), b.has_value());
  if (a) EXPECT_NEAR(*a, *b, tol);
}

TEST(ExperimentTest, MetricsRecomputedFromTheLogMatch) {
  const ScenarioConfig cfg = Short("atom");
  const fs::path dir = TempDir("recompute");
  const auto results = RunToDirectory(cfg, dir.string());
  ASSERT_EQ(results.size(), 2u);
  const auto rows = MetricsFromRunDirectory(dir.string());
  ASSERT_EQ(rows.size(), 2u);
  for (std::size_t r = 0; r < rows.size(); ++r) {
    ASSERT_TRUE(results[r].metrics.has_value());
    const auto& live = *results[r].metrics;
    EXPECT_EQ(rows[r].round, live.round);
    ASSERT_EQ(rows[r].ade_humans.size(), live.ade_humans.size());
    for (std::size_t h = 0; h < live.ade_humans.size(); ++h) {
      ExpectOptNear(rows[r].ade_humans[h], live.ade_humans[h], 1e-9);
    }
    ExpectOptNear(rows[r].ade_robot_by_human, live.ade_robot_by_human, 1e-9);
    EXPECT_NEAR(rows[r].detour, live.detour, 1e-9);
    EXPECT_NEAR(rows[r].min_distance, live.min_distance, 1e-9);
    EXPECT_EQ(rows[r].time_to_goal, live.time_to_goal);
    EXPECT_EQ(rows[r].collisions, live.collisions);
  }
  for (const char* f : {RunFiles::kConfig, RunFiles::kSteps, RunFiles::kMetrics, RunFiles::kSummary}) {
    EXPECT_TRUE(fs::exists(dir / f)) << f;
  }
  // the saved config reproduces the run
  EXPECT_EQ(nlohmann::json(LoadScenario((dir / RunFiles::kConfig).string())), nlohmann::json(cfg));
  fs::remove_all(dir);
}

TEST(ExperimentTest, SameSeedGivesIdenticalCsv) {
  const ScenarioConfig cfg = Short("atom");
  EXPECT_EQ(CsvOf(RunExperiment(cfg)), CsvOf(RunExperiment(cfg)));
}

TEST(ExperimentTest, SinkSeesEveryStepInOrder) {
  const ScenarioConfig cfg = Short("cv");
  std::vector<StepLog> seen;
  const auto results = RunExperiment(cfg, [&](const StepLog& s) { seen.push_back(s); });
  std::size_t total = 0;
  for (const auto& r : results) total += r.steps.size();
  ASSERT_EQ(seen.size(), total);
  for (std::size_t i = 1; i < seen.size(); ++i) {
    if (seen[i].round == seen[i - 1].round) EXPECT_EQ(seen[i].step, seen[i - 1].step + 1);
  }
  // cv carries no belief and no robot-by-human prediction
  EXPECT_TRUE(seen.front().belief_mean.empty());
  EXPECT_FALSE(seen.front().predicted_robot_by_human.has_value());
  EXPECT_FALSE(results[0].metrics->ade_robot_by_human.has_value());
}

TEST(ExperimentTest, StepLogJsonRoundTrip) {
  const auto results = RunExperiment(Short("atom"));
  const StepLog& s = results[0].steps[3];
  const nlohmann::json j = ToJson(s);
  const StepLog back = StepLogFromJson(nlohmann::json::parse(j.dump()));
  EXPECT_EQ(ToJson(back), j);
  EXPECT_EQ(back.positions, s.positions);
  EXPECT_EQ(back.belief_mean, s.belief_mean);
  ASSERT_TRUE(back.predicted_robot_by_human.has_value());
  EXPECT_EQ(*back.predicted_robot_by_human, *s.predicted_robot_by_human);
}

TEST(ExperimentTest, RealizedPositionsChainTheLog) {
  const auto results = RunExperiment(Short("cv"));
  const auto& steps = results[0].steps;
  const auto pos = RealizedPositions(steps);
  ASSERT_EQ(pos.size(), steps.size() + 1);
  for (std::size_t k = 0; k < steps.size(); ++k) {
    EXPECT_EQ(pos[k], steps[k].positions);
    EXPECT_EQ(pos[k + 1], steps[k].next_positions);
  }
  // a gap in the log is rejected
  std::vector<StepLog> gap{steps[0], steps[2]};
  EXPECT_THROW(RealizedPositions(gap), ValidationError);
}

TEST(ExperimentTest, ApplyOptionsExtendsAndTruncatesTheSchedule) {
  RunOptions o;
  o.rounds = 10;
  const ScenarioConfig longer = ApplyOptions(ExchangeScenario(), o);
  ASSERT_EQ(longer.schedule.size(), 10u);
  EXPECT_EQ(longer.schedule[9][0].v_max, longer.schedule[7][0].v_max);
  o.rounds = 3;
  const ScenarioConfig shorter = ApplyOptions(ExchangeScenario(), o);
  EXPECT_EQ(shorter.rounds, 3);
  EXPECT_EQ(shorter.schedule.size(), 3u);
  o.rounds.reset();
  o.predictor = "nope";
  EXPECT_THROW(ApplyOptions(ExchangeScenario(), o), ValidationError);
}

TEST(MetricsCsvTest, HeaderAndRoundTrip) {
  const std::vector<std::string> expect{"scenario", "predictor", "round", "ade_h1", "ade_h2",
                                        "ade_robot_by_human", "detour", "min_distance",
                                        "time_to_goal", "collisions"};
  EXPECT_EQ(MetricsCsvHeader(), expect);

  RoundMetrics a;
  a.scenario = "exchange";
  a.predictor = "atom";
  a.round = 1;
  a.ade_humans = {0.123456789012345, std::nullopt};
  a.ade_robot_by_human = 0.5;
  a.detour = 0.25;
  a.min_distance = 1.75;
  a.time_to_goal = 44;
  a.collisions = 0;
  RoundMetrics b = a;
  b.predictor = "sf";
  b.round = 2;
  b.ade_humans = {1.0 / 3.0, 2.0 / 3.0};
  b.ade_robot_by_human.reset();
  b.time_to_goal = kNotReached;
  b.collisions = 3;

  std::ostringstream out;
  WriteMetricsCsv(out, {a, b});
  std::istringstream in(out.str());
  const auto rows = ReadMetricsCsv(in);
  ASSERT_EQ(rows.size(), 2u);
  for (std::size_t i = 0; i < 2; ++i) {
    const RoundMetrics& w = i == 0 ? a : b;
    EXPECT_EQ(rows[i].scenario, w.scenario);
    EXPECT_EQ(rows[i].predictor, w.predictor);
    EXPECT_EQ(rows[i].round, w.round);
    ExpectOptNear(rows[i].ade_humans[0], w.ade_humans[0], 1e-12);
    // an empty second column reads back as a single-human row
    ExpectOptNear(rows[i].ade_humans.size() > 1 ? rows[i].ade_humans[1] : std::nullopt,
                  w.ade_humans[1], 1e-12);
    ExpectOptNear(rows[i].ade_robot_by_human, w.ade_robot_by_human, 1e-12);
    EXPECT_EQ(rows[i].time_to_goal, w.time_to_goal);
    EXPECT_EQ(rows[i].collisions, w.collisions);
  }
  // first line is the header
  EXPECT_EQ(out.str().substr(0, out.str().find('\n')),
            "scenario,predictor,round,ade_h1,ade_h2,ade_robot_by_human,detour,min_distance,"
            "time_to_goal,collisions");

  std::istringstream bad("scenario,predictor\nx,y\n");
  EXPECT_THROW(ReadMetricsCsv(bad), ValidationError);
}

// Tags open and close in order; self-closing tags and the prolog are skipped.
bool BalancedXml(const std::string& s) {
  static const std::regex tag(R"(<(/?)([A-Za-z][\w:-]*)[^>]*?(/?)>)");
  std::stack<std::string> open;
  for (auto it = std::sregex_iterator(s.begin(), s.end(), tag); it != std::sregex_iterator(); ++it) {
    const auto& m = *it;
    if (m[3].length() > 0) continue;
    if (m[1].length() == 0) {
      open.push(m[2]);
    } else {
      if (open.empty() || open.top() != m[2]) return false;
      open.pop();
    }
  }
  return open.empty();
}

TEST(MetricsSvgTest, WellFormed) {
  const auto results = RunExperiment(Short("cv"));
  std::vector<RoundMetrics> rows;
  for (const auto& r : results) rows.push_back(*r.metrics);
  const std::string svg = RenderMetricsSvg(rows, "a < b & c");
  EXPECT_NE(svg.find("<svg"), std::string::npos);
  EXPECT_NE(svg.find("xmlns=\"http://www.w3.org/2000/svg\""), std::string::npos);
  EXPECT_NE(svg.find("</svg>"), std::string::npos);
  EXPECT_NE(svg.find("polyline"), std::string::npos);
  EXPECT_NE(svg.find("a &lt; b &amp; c"), std::string::npos);
  EXPECT_TRUE(BalancedXml(svg));
  EXPECT_EQ(svg.find("nan"), std::string::npos);
  EXPECT_TRUE(BalancedXml(RenderMetricsSvg({})));
}

}  // namespace
}  // namespace atom
