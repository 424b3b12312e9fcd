#pragma once

#include <optional>

namespace forestflight::geometry {

// Absolute tolerance for every geometric predicate, in meters.
inline constexpr double kEps = 1e-9;

// x is longitudinal (direction of flight), y is lateral.
struct Point {
  double x = 0.0;
  double y = 0.0;

  friend bool operator==(const Point&, const Point&) = default;
};

inline Point operator+(Point a, Point b) { return {a.x + b.x, a.y + b.y}; }
inline Point operator-(Point a, Point b) { return {a.x - b.x, a.y - b.y}; }
inline Point operator*(double s, Point p) { return {s * p.x, s * p.y}; }
double distance(Point a, Point b);

struct Disk {
  Point center;
  double radius = 1.0;
};

enum class Side { upper, lower };

// Reachable cone of the single integrator (x' = nu, |y'| <= 1). Trajectories
// have lateral slope bounded by 1/nu = tan(half_angle).
struct ConeParams {
  double speed = 1.0;
  double half_angle = 0.0;  // alpha/2 = atan(1/nu)
  double sin_alpha = 0.0;   // 2 nu / (1 + nu^2)
  double sin_half = 0.0;
  double cos_half = 0.0;

  double slope() const { return 1.0 / speed; }
};

ConeParams cone_params(double speed);

// A boundary segment of slope slope_sign/nu with start.x < end.x.
struct SlopedSegment {
  Point start;
  Point end;
  int slope_sign = 1;

  double y_at(double x) const;
};

// Unique crossing point of two segments within both extents (tolerance kEps).
// Parallel segments never report a point, even when collinear.
std::optional<Point> segment_intersection(const SlopedSegment& a, const SlopedSegment& b);

// True when a and b are collinear and their x-extents overlap by more than
// kEps.
bool collinear_overlap(const SlopedSegment& a, const SlopedSegment& b);

// Point where the line of slope slope_sign/nu touches the disk on the given
// side.
Point tangent_point(const Disk& d, const ConeParams& cone, int slope_sign, Side side);

}  // namespace forestflight::geometry
