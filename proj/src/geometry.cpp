#include "forestflight/geometry.hpp"

#include <algorithm>
#include <cmath>

#include "forestflight/error.hpp"

namespace forestflight::geometry {

double distance(Point a, Point b) { return std::hypot(a.x - b.x, a.y - b.y); }

ConeParams cone_params(double speed) {
  if (!(speed > 0.0) || !std::isfinite(speed)) {
    throw ValidationError("speed must be positive and finite");
  }
  ConeParams c;
  c.speed = speed;
  c.half_angle = std::atan(1.0 / speed);
  c.sin_alpha = 2.0 * speed / (1.0 + speed * speed);
  // sin(atan(1/nu)) = 1/sqrt(1+nu^2), cos(atan(1/nu)) = nu/sqrt(1+nu^2).
  const double norm = std::sqrt(1.0 + speed * speed);
  c.sin_half = 1.0 / norm;
  c.cos_half = speed / norm;
  return c;
}

double SlopedSegment::y_at(double x) const {
  const double dx = end.x - start.x;
  if (dx <= 0.0) return start.y;
  return start.y + (end.y - start.y) * (x - start.x) / dx;
}

std::optional<Point> segment_intersection(const SlopedSegment& a, const SlopedSegment& b) {
  const Point da = a.end - a.start;
  const Point db = b.end - b.start;
  const double cross = da.x * db.y - da.y * db.x;
  const double la = std::hypot(da.x, da.y);
  const double lb = std::hypot(db.x, db.y);
  if (la <= 0.0 || lb <= 0.0) return std::nullopt;
  if (std::fabs(cross) <= 1e-12 * la * lb) return std::nullopt;
  const Point w = b.start - a.start;
  const double t = (w.x * db.y - w.y * db.x) / cross;
  const double u = (w.x * da.y - w.y * da.x) / cross;
  const double ta = kEps / la;
  const double tb = kEps / lb;
  if (t < -ta || t > 1.0 + ta || u < -tb || u > 1.0 + tb) return std::nullopt;
  // Solve from the segment that yields the symmetric answer regardless of
  // argument order.
  const Point pa = a.start + std::clamp(t, 0.0, 1.0) * da;
  const Point pb = b.start + std::clamp(u, 0.0, 1.0) * db;
  return Point{0.5 * (pa.x + pb.x), 0.5 * (pa.y + pb.y)};
}

bool collinear_overlap(const SlopedSegment& a, const SlopedSegment& b) {
  const Point da = a.end - a.start;
  const Point db = b.end - b.start;
  const double la = std::hypot(da.x, da.y);
  const double lb = std::hypot(db.x, db.y);
  if (la <= 0.0 || lb <= 0.0) return false;
  const double cross = da.x * db.y - da.y * db.x;
  if (std::fabs(cross) > 1e-12 * la * lb) return false;
  // Distance of b.start from a's supporting line.
  const Point w = b.start - a.start;
  if (std::fabs(w.x * da.y - w.y * da.x) / la > kEps) return false;
  const double lo = std::max(a.start.x, b.start.x);
  const double hi = std::min(a.end.x, b.end.x);
  return hi - lo > kEps;
}

Point tangent_point(const Disk& d, const ConeParams& cone, int slope_sign, Side side) {
  const double s = slope_sign >= 0 ? 1.0 : -1.0;
  // Unit normal of a line with direction (cos b, s sin b), pointing up.
  const Point normal{-s * cone.sin_half, cone.cos_half};
  const double k = side == Side::upper ? d.radius : -d.radius;
  return d.center + k * normal;
}

}  // namespace forestflight::geometry
