#include "atom/core/geometry.h"

#include <algorithm>
#include <utility>

namespace atom {

Vec2 ClosestPointOnSegment(const Vec2& p, const Segment& s) {
  const Vec2 ab = s.b - s.a;
  const double len2 = ab.squaredNorm();
  if (len2 <= 0.0) return s.a;
  const double t = std::clamp((p - s.a).dot(ab) / len2, 0.0, 1.0);
  return s.a + t * ab;
}

double DistanceToSegment(const Vec2& p, const Segment& s) {
  return (p - ClosestPointOnSegment(p, s)).norm();
}

namespace {

double Cross(const Vec2& a, const Vec2& b) { return a.x() * b.y() - a.y() * b.x(); }

bool OnSegment(const Vec2& p, const Segment& s) {
  return p.x() >= std::min(s.a.x(), s.b.x()) && p.x() <= std::max(s.a.x(), s.b.x()) &&
         p.y() >= std::min(s.a.y(), s.b.y()) && p.y() <= std::max(s.a.y(), s.b.y());
}

int Orientation(const Vec2& a, const Vec2& b, const Vec2& c) {
  const double v = Cross(b - a, c - a);
  return (v > 0.0) - (v < 0.0);
}

}  // namespace

bool SegmentsIntersect(const Segment& s, const Segment& t) {
  const int o1 = Orientation(s.a, s.b, t.a);
  const int o2 = Orientation(s.a, s.b, t.b);
  const int o3 = Orientation(t.a, t.b, s.a);
  const int o4 = Orientation(t.a, t.b, s.b);
  if (o1 != o2 && o3 != o4) return true;
  return (o1 == 0 && OnSegment(t.a, s)) || (o2 == 0 && OnSegment(t.b, s)) ||
         (o3 == 0 && OnSegment(s.a, t)) || (o4 == 0 && OnSegment(s.b, t));
}

Obstacle::Obstacle(std::vector<Segment> segments) : segments_(std::move(segments)) {
  for (const auto& s : segments_) {
    if (!IsFinite(s.a) || !IsFinite(s.b)) throw ValidationError("non-finite obstacle segment");
    if ((s.b - s.a).norm() <= 0.0) throw ValidationError("obstacle segment has zero length");
  }
}

ObstacleProximity NearestObstaclePoint(const Vec2& p, const Obstacle& obstacle) {
  ObstacleProximity best;
  const auto& segs = obstacle.segments();
  for (std::size_t i = 0; i < segs.size(); ++i) {
    const Segment& s = segs[i];
    const Vec2 ab = s.b - s.a;
    const double t = (p - s.a).dot(ab) / ab.squaredNorm();
    Vec2 c;
    bool endpoint = true;
    if (t <= 0.0) {
      c = s.a;
    } else if (t >= 1.0) {
      c = s.b;
    } else {
      c = s.a + t * ab;
      endpoint = false;
    }
    const double dist = (p - c).norm();
    if (dist < best.distance) {
      best = {dist, c, endpoint, static_cast<int>(i)};
    }
  }
  return best;
}

double DistanceToObstacle(const Vec2& p, const Obstacle& obstacle) {
  return NearestObstaclePoint(p, obstacle).distance;
}

bool Blocked(const Vec2& p, const Vec2& q, const Obstacle& obstacle) {
  for (const auto& s : obstacle.segments()) {
    if (SegmentsIntersect({p, q}, s)) return true;
  }
  return false;
}

}  // namespace atom
