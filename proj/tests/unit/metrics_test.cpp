#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "atom/sim/metrics.h"

namespace atom {
namespace {

Trajectory FromPoints(const std::vector<Vec2>& pts) {
  Trajectory t;
  for (const auto& p : pts) t.states.push_back({p});
  return t;
}

TEST(AdeTest, IdenticalIsZero) {
  const Trajectory a = FromPoints({Vec2(0, 0), Vec2(1, 1), Vec2(2, 3)});
  EXPECT_EQ(ComputeAde(a, a), 0.0);
}

TEST(AdeTest, ConstantOffset) {
  const Trajectory a = FromPoints({Vec2(0, 0), Vec2(1, 0), Vec2(2, 0)});
  const Trajectory b = FromPoints({Vec2(3, 4), Vec2(4, 4), Vec2(5, 4)});
  EXPECT_DOUBLE_EQ(ComputeAde(a, b), 5.0);
}

TEST(AdeTest, MeanOfOffsets) {
  const Trajectory a = FromPoints({Vec2(0, 0), Vec2(1, 0)});
  const Trajectory b = FromPoints({Vec2(0, 0), Vec2(1, 2)});
  EXPECT_DOUBLE_EQ(ComputeAde(a, b), 1.0);
}

TEST(AdeTest, TruncatesAndFlags) {
  const Trajectory a = FromPoints({Vec2(0, 0), Vec2(1, 0), Vec2(2, 0)});
  const Trajectory b = FromPoints({Vec2(0, 1), Vec2(1, 1)});
  bool truncated = false;
  EXPECT_DOUBLE_EQ(ComputeAde(a, b, &truncated), 1.0);
  EXPECT_TRUE(truncated);
  EXPECT_THROW(ComputeAde(Trajectory{}, b), ValidationError);
}

TEST(RoundAdeTest, TruncatesAtRoundEnd) {
  // Realized positions 0..3 along x; a prediction issued at step 2 can only
  // be scored against step 3.
  const std::vector<Vec2> realized{Vec2(0, 0), Vec2(1, 0), Vec2(2, 0), Vec2(3, 0)};
  const std::vector<IssuedPrediction> issued{
      {0, {Vec2(1, 1), Vec2(2, 1), Vec2(3, 1)}},   // mean 1
      {2, {Vec2(3, 3), Vec2(4, 3), Vec2(5, 3)}},   // only the first counts: 3
      {3, {Vec2(9, 9)}},                          // nothing to score
  };
  const auto ade = RoundAde(issued, realized);
  ASSERT_TRUE(ade.has_value());
  EXPECT_DOUBLE_EQ(*ade, 2.0);
  EXPECT_FALSE(RoundAde(std::vector<IssuedPrediction>{{3, {Vec2(0, 0)}}}, realized).has_value());
}

TEST(DetourTest, OnSegmentIsZero) {
  const std::vector<Vec2> path{Vec2(-4, 0), Vec2(-1, 0), Vec2(2, 0), Vec2(4, 0)};
  EXPECT_EQ(ComputeDetour(path, Vec2(-4, 0), Vec2(4, 0)), 0.0);
}

TEST(DetourTest, ConstantLateralOffset) {
  const std::vector<Vec2> path{Vec2(-3, 0.5), Vec2(0, 0.5), Vec2(3, 0.5)};
  EXPECT_DOUBLE_EQ(ComputeDetour(path, Vec2(-4, 0), Vec2(4, 0)), 0.5);
}

TEST(DetourTest, SemicircleAgainstNumericIntegral) {
  // Uniform-angle samples on a semicircle over the segment. Oracle: the mean
  // of r sin(phi) over the same angles.
  const double r = 2.0;
  const int n = 181;
  std::vector<Vec2> path;
  for (int i = 0; i < n; ++i) {
    const double phi = std::numbers::pi * i / (n - 1);
    path.push_back(Vec2(-r * std::cos(phi), r * std::sin(phi)));
  }
  double oracle = 0.0;
  for (int i = 0; i < n; ++i) {
    const double phi = std::numbers::pi * i / (n - 1);
    oracle += std::abs(r * std::sin(phi));
  }
  oracle /= n;
  EXPECT_NEAR(ComputeDetour(path, Vec2(-r, 0), Vec2(r, 0)), oracle, 1e-12);
  // And the continuum value 2r/pi is approached.
  EXPECT_NEAR(ComputeDetour(path, Vec2(-r, 0), Vec2(r, 0)), 2 * r / std::numbers::pi, 0.02);
}

TEST(DetourTest, DegenerateSegmentUsesPointDistance) {
  const std::vector<Vec2> path{Vec2(3, 4), Vec2(0, 0)};
  EXPECT_DOUBLE_EQ(ComputeDetour(path, Vec2(0, 0), Vec2(0, 0)), 2.5);
}

TEST(MinDistanceTest, ParallelLines) {
  std::vector<Vec2> robot, human;
  for (int k = 0; k < 10; ++k) {
    robot.push_back(Vec2(0.1 * k, 0));
    human.push_back(Vec2(0.1 * k, 1));
  }
  const std::vector<std::vector<Vec2>> humans{human};
  EXPECT_DOUBLE_EQ(ComputeMinDistance(robot, humans), 1.0);
}

TEST(MinDistanceTest, CrossingOffsetInTime) {
  // Robot along +x from x = a, human along -y from y = b, both at 1 m/s.
  // |r(t) - h(t)|^2 = (a + t)^2 + (b - t)^2 is minimal at t* = (b - a) / 2
  // with value |a + b| / sqrt(2); the samples include t*.
  const double a = -3.0, b = 3.0 + 0.7 * std::sqrt(2.0);
  const double t_star = (b - a) / 2;
  std::vector<Vec2> robot, human;
  for (int k = -20; k <= 20; ++k) {
    const double t = t_star + 0.1 * k;
    robot.push_back(Vec2(a + t, 0));
    human.push_back(Vec2(0, b - t));
  }
  const std::vector<std::vector<Vec2>> humans{human};
  EXPECT_NEAR(ComputeMinDistance(robot, humans), 0.7, 1e-12);
}

TEST(MinDistanceTest, IdenticalIsZeroAndCollisionsAgree) {
  const std::vector<Vec2> path{Vec2(0, 0), Vec2(1, 0)};
  const std::vector<std::vector<Vec2>> same{path};
  EXPECT_EQ(ComputeMinDistance(path, same), 0.0);
  EXPECT_EQ(CountCollisionSteps(path, same, 0.5), 2);
}

TEST(CollisionTest, FlagIffBelowThreshold) {
  for (double gap : {0.3, 0.499999, 0.5, 0.5000001, 0.9}) {
    const std::vector<Vec2> robot{Vec2(0, 0), Vec2(1, 0), Vec2(2, 0)};
    const std::vector<std::vector<Vec2>> humans{{Vec2(0, 3), Vec2(1, gap), Vec2(2, 3)}};
    const double d = ComputeMinDistance(robot, humans);
    EXPECT_EQ(CountCollisionSteps(robot, humans, 0.5) > 0, d < 0.5) << gap;
  }
}

TEST(TimeToGoalTest, Examples) {
  const Vec2 goal(4, 0);
  EXPECT_EQ(ComputeTimeToGoal(std::vector<Vec2>{Vec2(3.8, 0)}, goal, 0.3), 0);
  std::vector<Vec2> line;
  for (int k = 0; k <= 25; ++k) line.push_back(Vec2(0.2 * k, 0));
  EXPECT_EQ(ComputeTimeToGoal(line, goal, 0.3), 19);
  EXPECT_EQ(ComputeTimeToGoal(std::vector<Vec2>{Vec2(-4, 0), Vec2(-4, 1)}, goal, 0.3), kNotReached);
  EXPECT_THROW(ComputeTimeToGoal(line, goal, 0.0), ValidationError);
}

}  // namespace
}  // namespace atom
