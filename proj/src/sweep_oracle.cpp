#include "forestflight/sweep_oracle.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "forestflight/error.hpp"

namespace forestflight::oracle {
namespace {

void check_dx(double dx) {
  if (!(dx > 0.0) || !std::isfinite(dx)) throw ValidationError("dx must be positive");
}

double forest_right_edge(const forest::Forest& f) {
  double x = 0.0;
  for (const auto& c : f.centers) x = std::max(x, c.x);
  return x + f.tree_radius;
}

}  // namespace

IntervalSet::IntervalSet(std::vector<Interval> parts) : parts_(std::move(parts)) { normalize(); }

void IntervalSet::normalize() {
  std::sort(parts_.begin(), parts_.end(), [](const Interval& a, const Interval& b) { return a.lo < b.lo; });
  std::vector<Interval> out;
  out.reserve(parts_.size());
  for (const auto& iv : parts_) {
    if (iv.hi < iv.lo) continue;
    if (!out.empty() && iv.lo <= out.back().hi) {
      out.back().hi = std::max(out.back().hi, iv.hi);
    } else {
      out.push_back(iv);
    }
  }
  parts_ = std::move(out);
}

bool IntervalSet::contains(double y) const {
  auto it = std::upper_bound(parts_.begin(), parts_.end(), y,
                             [](double v, const Interval& iv) { return v < iv.lo; });
  if (it == parts_.begin()) return false;
  --it;
  return y <= it->hi;
}

double IntervalSet::measure() const {
  double m = 0.0;
  for (const auto& iv : parts_) m += iv.hi - iv.lo;
  return m;
}

void IntervalSet::dilate(double d, double lo, double hi) {
  for (auto& iv : parts_) {
    iv.lo = std::max(lo, iv.lo - d);
    iv.hi = std::min(hi, iv.hi + d);
  }
  normalize();
}

void IntervalSet::subtract(std::vector<Interval> cuts) {
  if (cuts.empty() || parts_.empty()) return;
  const IntervalSet c(std::move(cuts));
  std::vector<Interval> out;
  std::size_t j = 0;
  const auto& cp = c.parts_;
  for (const auto& iv : parts_) {
    double cur = iv.lo;
    while (j < cp.size() && cp[j].hi < cur) ++j;
    std::size_t k = j;
    bool alive = true;
    while (k < cp.size() && cp[k].lo <= iv.hi) {
      if (cp[k].lo > cur) out.push_back({cur, cp[k].lo});
      cur = std::max(cur, cp[k].hi);
      if (cur >= iv.hi) {
        alive = false;
        break;
      }
      ++k;
    }
    if (alive && iv.hi > cur) out.push_back({cur, iv.hi});
    // A point interval not touched by any cut survives as is.
    if (alive && iv.hi == iv.lo && cur == iv.lo && (k == j || cp[j].lo > iv.lo)) out.push_back(iv);
  }
  parts_ = std::move(out);
  normalize();
}

IntervalSet IntervalSet::complement(double lo, double hi) const {
  std::vector<Interval> out;
  double cur = lo;
  for (const auto& iv : parts_) {
    if (iv.hi < lo) continue;
    if (iv.lo > hi) break;
    if (iv.lo > cur) out.push_back({cur, iv.lo});
    cur = std::max(cur, iv.hi);
  }
  if (hi > cur) out.push_back({cur, hi});
  IntervalSet s;
  s.parts_ = std::move(out);
  return s;
}

bool IntervalSet::valid() const {
  for (std::size_t i = 0; i < parts_.size(); ++i) {
    const auto& iv = parts_[i];
    if (!std::isfinite(iv.lo) || !std::isfinite(iv.hi) || iv.hi < iv.lo) return false;
    if (i > 0 && iv.lo <= parts_[i - 1].hi) return false;
  }
  return true;
}

TreeColumns::TreeColumns(const forest::Forest& f) : r_(f.tree_radius), bucket_(2.0 * f.tree_radius) {
  if (f.centers.empty()) return;
  double lo = f.centers.front().x;
  double hi = lo;
  for (const auto& c : f.centers) {
    lo = std::min(lo, c.x);
    hi = std::max(hi, c.x);
  }
  x0_ = lo;
  buckets_.resize(static_cast<std::size_t>((hi - lo) / bucket_) + 1);
  for (const auto& c : f.centers) {
    buckets_[static_cast<std::size_t>((c.x - lo) / bucket_)].push_back(c);
  }
}

void TreeColumns::sections(double x, std::vector<Interval>& out) const {
  out.clear();
  if (buckets_.empty()) return;
  const double b0 = std::floor((x - r_ - x0_) / bucket_);
  const double b1 = std::floor((x + r_ - x0_) / bucket_);
  const double last = static_cast<double>(buckets_.size() - 1);
  if (b1 < 0.0 || b0 > last) return;
  const auto i0 = static_cast<std::size_t>(std::max(0.0, b0));
  const auto i1 = static_cast<std::size_t>(std::min(last, b1));
  const double r2 = r_ * r_;
  for (std::size_t i = i0; i <= i1; ++i) {
    for (const auto& c : buckets_[i]) {
      const double d = x - c.x;
      if (d * d > r2) continue;
      const double h = std::sqrt(r2 - d * d);
      out.push_back({c.y - h, c.y + h});
    }
  }
}

const IntervalSet& SafeSweep::at(double x) const {
  const double k = std::round((x_from_ - x) / dx_);
  const double last = static_cast<double>(snapshots_.size() - 1);
  return snapshots_[static_cast<std::size_t>(std::clamp(k, 0.0, last))];
}

double default_dx(double radius, double speed) { return std::min(radius, 1.0 / speed) / 100.0; }

SafeSweep sweep_safe(const forest::Forest& f, double speed, double x_from, double x_to, double dx) {
  check_dx(dx);
  if (!(x_from > x_to)) throw ValidationError("backward sweep needs x_from > x_to");
  geometry::cone_params(speed);
  SafeSweep s;
  s.x_from_ = x_from;
  s.x_to_ = x_to;
  s.dx_ = dx;
  s.lat_lo_ = -f.window.width;
  s.lat_hi_ = 2.0 * f.window.width;
  const TreeColumns trees(f);
  const auto steps = static_cast<std::size_t>(std::ceil((x_from - x_to) / dx - 1e-9));
  s.snapshots_.reserve(steps + 1);
  std::vector<Interval> cuts;
  IntervalSet cur = IntervalSet::single(s.lat_lo_, s.lat_hi_);
  trees.sections(x_from, cuts);
  cur.subtract(cuts);
  s.snapshots_.push_back(cur);
  const double grow = dx / speed;
  for (std::size_t k = 1; k <= steps; ++k) {
    cur.dilate(grow, s.lat_lo_, s.lat_hi_);
    trees.sections(s.x_at(k), cuts);
    cur.subtract(cuts);
    s.snapshots_.push_back(cur);
  }
  return s;
}

bool oracle_is_doomed(Point p, const forest::Forest& f, double speed, double dx) {
  const double x_from = std::max(forest_right_edge(f), p.x) + dx;
  return sweep_safe(f, speed, x_from, p.x, dx).is_doomed(p);
}

std::vector<std::pair<double, double>> doomed_components(const SafeSweep& s) {
  // Node per doomed interval per column; union across adjacent columns.
  std::vector<std::vector<Interval>> cols(s.steps());
  std::vector<std::size_t> offset(s.steps() + 1, 0);
  for (std::size_t k = 0; k < s.steps(); ++k) {
    cols[k] = s.snapshot(k).complement(s.lateral_lo(), s.lateral_hi()).parts();
    offset[k + 1] = offset[k] + cols[k].size();
  }
  std::vector<std::size_t> parent(offset.back());
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](std::size_t x) {
    while (parent[x] != x) {
      parent[x] = parent[parent[x]];
      x = parent[x];
    }
    return x;
  };
  for (std::size_t k = 0; k + 1 < s.steps(); ++k) {
    const auto& a = cols[k];
    const auto& b = cols[k + 1];
    std::size_t i = 0;
    std::size_t j = 0;
    while (i < a.size() && j < b.size()) {
      if (a[i].lo <= b[j].hi && b[j].lo <= a[i].hi) {
        const std::size_t ra = find(offset[k] + i);
        const std::size_t rb = find(offset[k + 1] + j);
        if (ra != rb) parent[ra] = rb;
      }
      if (a[i].hi < b[j].hi) {
        ++i;
      } else {
        ++j;
      }
    }
  }
  std::vector<std::pair<double, double>> ext(parent.size(), {0.0, 0.0});
  std::vector<bool> used(parent.size(), false);
  for (std::size_t k = 0; k < s.steps(); ++k) {
    for (std::size_t i = 0; i < cols[k].size(); ++i) {
      const std::size_t r = find(offset[k] + i);
      if (!used[r]) {
        used[r] = true;
        ext[r] = {cols[k][i].lo, cols[k][i].hi};
      } else {
        ext[r].first = std::min(ext[r].first, cols[k][i].lo);
        ext[r].second = std::max(ext[r].second, cols[k][i].hi);
      }
    }
  }
  std::vector<std::pair<double, double>> out;
  for (std::size_t r = 0; r < parent.size(); ++r) {
    if (used[r]) out.push_back(ext[r]);
  }
  return out;
}

bool oracle_crossing_exists(const forest::Forest& f, double speed, double x_to, double dx) {
  if (f.centers.empty()) return true;
  const double x_from = std::max(forest_right_edge(f), x_to) + dx;
  const SafeSweep s = sweep_safe(f, speed, x_from, x_to, dx);
  for (const auto& [lo, hi] : doomed_components(s)) {
    if (hi - lo >= f.window.width) return false;
  }
  return true;
}

double forward_reach(const TreeColumns& trees, double speed, IntervalSet start, double start_x,
                     double x_end, double dx) {
  check_dx(dx);
  std::vector<Interval> cuts;
  trees.sections(start_x, cuts);
  start.subtract(cuts);
  if (start.empty()) return start_x;
  const double grow = dx / speed;
  const double inf = std::numeric_limits<double>::infinity();
  double x = start_x;
  for (std::size_t k = 1;; ++k) {
    const double nx = start_x + static_cast<double>(k) * dx;
    if (nx > x_end) return x_end;
    start.dilate(grow, -inf, inf);
    trees.sections(nx, cuts);
    start.subtract(cuts);
    if (start.empty()) return x;
    x = nx;
  }
}

SurvivalDepth::SurvivalDepth(const forest::Forest& f, double speed, double start_x, double x_end,
                             double dx)
    : trees_(f), speed_(speed), start_x_(start_x), x_end_(x_end), dx_(dx) {
  check_dx(dx);
  geometry::cone_params(speed);
}

double SurvivalDepth::operator()(double y0) const {
  return forward_reach(trees_, speed_, IntervalSet::single(y0, y0), start_x_, x_end_, dx_) - start_x_;
}

SurvivalDepth survival_depth(const forest::Forest& f, double speed, double start_x, double dx,
                             std::optional<double> x_end) {
  return SurvivalDepth(f, speed, start_x, x_end.value_or(f.window.length), dx);
}

SurvivalFit fit_log_survival(std::vector<double> depths, double upper, double lower) {
  if (depths.empty()) throw ValidationError("no survival depths");
  if (!(upper > lower && lower > 0.0)) throw ValidationError("need 0 < lower < upper");
  std::sort(depths.begin(), depths.end());
  const auto n = static_cast<double>(depths.size());
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0, syy = 0.0;
  SurvivalFit fit;
  for (std::size_t i = 0; i < depths.size(); ++i) {
    // Fraction strictly deeper than the i-th order statistic.
    const double surv = 1.0 - static_cast<double>(i + 1) / n;
    if (surv > upper || surv < lower) continue;
    const double x = depths[i];
    const double y = std::log(surv);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    syy += y * y;
    ++fit.points;
  }
  if (fit.points < 3) return fit;
  const auto m = static_cast<double>(fit.points);
  const double vx = sxx - sx * sx / m;
  const double vy = syy - sy * sy / m;
  const double cxy = sxy - sx * sy / m;
  if (vx <= 0.0 || vy <= 0.0) return fit;
  fit.slope = cxy / vx;
  fit.intercept = (sy - fit.slope * sx) / m;
  fit.r_squared = cxy * cxy / (vx * vy);
  return fit;
}

}  // namespace forestflight::oracle
