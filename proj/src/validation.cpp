#include "forestflight/validation.hpp"

#include <cmath>

#include "forestflight/rng.hpp"
#include "forestflight/sweep_oracle.hpp"

namespace forestflight::validation {

forest::Forest fixed_count_forest(std::size_t trees, forest::Window window, double radius,
                                  std::uint64_t seed) {
  forest::validate(window);
  forest::Forest f;
  f.window = window;
  f.tree_radius = radius;
  f.seed = seed;
  f.density = static_cast<double>(trees) / (window.width * window.length);
  rng::Stream s(seed, "validation.forest", 0);
  for (std::size_t i = 0; i < trees; ++i) {
    const double x = s.uniform() * window.length;
    const double y = s.uniform() * window.width;
    f.centers.push_back({x, y});
  }
  return f;
}

bool near_boundary(const shadow::ShadowSet& s, geometry::Point p, double d) {
  const bool here = s.is_doomed(p);
  constexpr int kDirections = 32;
  const double pi = std::acos(-1.0);
  for (double radius : {0.25 * d, 0.5 * d, 0.75 * d, d}) {
    for (int k = 0; k < kDirections; ++k) {
      const double a = 2.0 * pi * k / kDirections;
      if (s.is_doomed({p.x + radius * std::cos(a), p.y + radius * std::sin(a)}) != here) return true;
    }
  }
  return false;
}

InstanceComparison compare_instance(const forest::Forest& f, double speed, std::size_t points, double dx,
                                    double band, std::uint64_t seed) {
  const auto cone = geometry::cone_params(speed);
  const double clip = -f.tree_radius / cone.sin_half;
  const auto set = shadow::build_shadow_set(f, speed, clip);
  double right = f.window.length;
  for (const auto& c : f.centers) right = std::max(right, c.x + f.tree_radius);
  const auto sweep = oracle::sweep_safe(f, speed, right + dx, clip, dx);

  InstanceComparison out;
  out.max_width = shadow::max_normalized_width(set, f.window.width);
  out.shadow_crossing = out.max_width < 1.0;
  out.oracle_crossing = true;
  for (const auto& [lo, hi] : oracle::doomed_components(sweep)) {
    if (hi - lo >= f.window.width) out.oracle_crossing = false;
  }
  rng::Stream s(seed, "validation.points", 0);
  std::vector<geometry::Point> pts(points);
  for (auto& p : pts) {
    p.x = s.uniform() * f.window.length;
    p.y = s.uniform() * f.window.width;
  }
  const auto doomed = set.classify(pts);
  out.points = points;
  for (std::size_t i = 0; i < points; ++i) {
    if (static_cast<bool>(doomed[i]) == sweep.is_doomed(pts[i])) {
      ++out.agree;
      continue;
    }
    ++out.disagree;
    if (!near_boundary(set, pts[i], band)) ++out.disagree_far;
  }
  return out;
}

}  // namespace forestflight::validation
