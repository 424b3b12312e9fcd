#pragma once

#include <cstddef>
#include <optional>
#include <utility>
#include <vector>

#include "forestflight/forest.hpp"
#include "forestflight/geometry.hpp"

// Brute-force doomed-set computation on a discretized x grid. Deliberately
// independent of the shadow construction so the two can be compared.
namespace forestflight::oracle {

using geometry::Point;

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
};

// Sorted, pairwise disjoint closed intervals.
class IntervalSet {
 public:
  IntervalSet() = default;
  explicit IntervalSet(std::vector<Interval> parts);

  static IntervalSet single(double lo, double hi) { return IntervalSet({{lo, hi}}); }

  const std::vector<Interval>& parts() const { return parts_; }
  bool empty() const { return parts_.empty(); }
  bool contains(double y) const;
  double measure() const;

  // Widen every interval by d on both sides, merge overlaps, then intersect
  // with [lo, hi].
  void dilate(double d, double lo, double hi);
  // Remove the union of `cuts`. Pieces of zero length are dropped.
  void subtract(std::vector<Interval> cuts);
  // Complement within [lo, hi]; pieces of zero length are dropped.
  IntervalSet complement(double lo, double hi) const;

  // Sorted, disjoint, finite, lo <= hi.
  bool valid() const;

 private:
  void normalize();
  std::vector<Interval> parts_;
};

// Tree cross-sections at a given x, bucketed by x for fast lookup.
class TreeColumns {
 public:
  explicit TreeColumns(const forest::Forest& f);
  void sections(double x, std::vector<Interval>& out) const;

 private:
  double r_;
  double bucket_;
  double x0_ = 0.0;
  std::vector<std::vector<Point>> buckets_;
};

// Safe sets S(x_k) at x_k = x_from - k * dx, k = 0..steps.
class SafeSweep {
 public:
  double x_from() const { return x_from_; }
  double x_to() const { return x_to_; }
  double dx() const { return dx_; }
  double lateral_lo() const { return lat_lo_; }
  double lateral_hi() const { return lat_hi_; }
  std::size_t steps() const { return snapshots_.size(); }

  double x_at(std::size_t k) const { return x_from_ - static_cast<double>(k) * dx_; }
  // Snapshot nearest to x (clamped to the swept range).
  const IntervalSet& at(double x) const;
  const IntervalSet& snapshot(std::size_t k) const { return snapshots_[k]; }

  bool is_doomed(Point p) const { return !at(p.x).contains(p.y); }

  friend SafeSweep sweep_safe(const forest::Forest& f, double speed, double x_from, double x_to,
                              double dx);

 private:
  double x_from_ = 0.0;
  double x_to_ = 0.0;
  double dx_ = 0.0;
  double lat_lo_ = 0.0;
  double lat_hi_ = 0.0;
  std::vector<IntervalSet> snapshots_;
};

// Lateral domain is [-w, 2w] for window width w.
SafeSweep sweep_safe(const forest::Forest& f, double speed, double x_from, double x_to, double dx);

double default_dx(double radius, double speed);

// Sweep from just right of every tree down to p.x.
bool oracle_is_doomed(Point p, const forest::Forest& f, double speed, double dx);

// Connected components of the discretized doomed set (adjacent columns whose
// doomed intervals overlap), as lateral extents.
std::vector<std::pair<double, double>> doomed_components(const SafeSweep& s);

// Corridor verdict from the oracle: some doomed component spans at least w.
// The sweep runs from the right edge of the forest down to x_to.
bool oracle_crossing_exists(const forest::Forest& f, double speed, double x_to, double dx);

// Forward reachable set from `start` at start_x. Returns the last x at which
// the set is non-empty (x_end if it never dies).
double forward_reach(const TreeColumns& trees, double speed, IntervalSet start, double start_x,
                     double x_end, double dx);

// depth(y0): survival distance of the forward reachable set seeded at
// (start_x, y0), capped at x_end - start_x.
class SurvivalDepth {
 public:
  SurvivalDepth(const forest::Forest& f, double speed, double start_x, double x_end, double dx);
  double operator()(double y0) const;

 private:
  TreeColumns trees_;
  double speed_;
  double start_x_;
  double x_end_;
  double dx_;
};

SurvivalDepth survival_depth(const forest::Forest& f, double speed, double start_x, double dx,
                             std::optional<double> x_end = std::nullopt);

// Least-squares line through (depth, log S(depth)) where S is the empirical
// survival function, keeping points with upper >= S >= lower.
struct SurvivalFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r_squared = 0.0;
  std::size_t points = 0;
};
SurvivalFit fit_log_survival(std::vector<double> depths, double upper = 0.5, double lower = 0.02);

}  // namespace forestflight::oracle
