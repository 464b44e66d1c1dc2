#ifndef ATOM_CORE_GEOMETRY_H
#define ATOM_CORE_GEOMETRY_H

#include <limits>
#include <vector>

#include "atom/core/types.h"

namespace atom {

struct Segment {
  Vec2 a;
  Vec2 b;
};

// Closest point on segment [a, b] to p.
Vec2 ClosestPointOnSegment(const Vec2& p, const Segment& s);
double DistanceToSegment(const Vec2& p, const Segment& s);
// True when the closed segments share at least one point.
bool SegmentsIntersect(const Segment& s, const Segment& t);

// Static environment geometry: a union of line segments.
class Obstacle {
 public:
  Obstacle() = default;
  // Throws ValidationError on zero-length or non-finite segments.
  explicit Obstacle(std::vector<Segment> segments);

  const std::vector<Segment>& segments() const { return segments_; }
  bool empty() const { return segments_.empty(); }

 private:
  std::vector<Segment> segments_;
};

struct ObstacleProximity {
  double distance = std::numeric_limits<double>::infinity();
  Vec2 closest = Vec2::Zero();
  // Set when the closest point is a segment endpoint.
  bool at_endpoint = false;
  // Index of the segment achieving the minimum, -1 for an empty obstacle.
  int segment = -1;
};

// Minimum point-to-segment distance. +infinity for an empty obstacle.
double DistanceToObstacle(const Vec2& p, const Obstacle& obstacle);
ObstacleProximity NearestObstaclePoint(const Vec2& p, const Obstacle& obstacle);
// True when the straight segment from p to q touches the obstacle.
bool Blocked(const Vec2& p, const Vec2& q, const Obstacle& obstacle);

}  // namespace atom

#endif  // ATOM_CORE_GEOMETRY_H
