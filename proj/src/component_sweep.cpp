// Occupied components by an exact right-to-left sweep of vertical sections.
//
// A section of the doomed set is a union of disjoint intervals. Moving left by
// dx every interval erodes by dx/nu on both sides and absorbs the chords of
// the trees present, so an interval's upper end is the maximum of one line of
// slope 1/nu and the upper arcs of its active trees (lower end symmetric).
// A tree is active from its right end to its tangency column; after that its
// tangency line dominates. Intervals never split: they are born at trees,
// merge when they touch and die at apexes.

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <optional>
#include <vector>

#include "forestflight/shadow.hpp"

namespace forestflight::shadow {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kTol = 1e-12;

// y = slope * x + icpt with slope +1/nu for upper ends, -1/nu for lower ends.
struct Line {
  bool valid = false;
  double icpt = 0.0;
};

struct Section {
  Line hi;
  Line lo;
  std::vector<std::size_t> arcs;  // active trees
  std::size_t rep = 0;            // tree in the same component
};

struct Sweeper {
  const forest::Forest& f;
  double nu;
  double slope;
  double r;
  std::vector<Section> live;
  std::vector<std::size_t> parent;
  std::vector<double> x_left;  // per tree root candidate: leftmost death column

  std::size_t find(std::size_t i) {
    while (parent[i] != i) {
      parent[i] = parent[parent[i]];
      i = parent[i];
    }
    return i;
  }
  void unite(std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    if (a == b) return;
    if (b < a) std::swap(a, b);
    parent[b] = a;
    x_left[a] = std::min(x_left[a], x_left[b]);
  }

  double arc(std::size_t t, double x, int side) const {
    const double dx = x - f.centers[t].x;
    return f.centers[t].y + side * std::sqrt(std::max(0.0, r * r - dx * dx));
  }
  double hi_at(const Section& s, double x) const {
    double y = s.hi.valid ? slope * x + s.hi.icpt : -kInf;
    for (std::size_t t : s.arcs) y = std::max(y, arc(t, x, +1));
    return y;
  }
  double lo_at(const Section& s, double x) const {
    double y = s.lo.valid ? -slope * x + s.lo.icpt : kInf;
    for (std::size_t t : s.arcs) y = std::min(y, arc(t, x, -1));
    return y;
  }

  // Largest x in [x_lo, x_hi] where a >= b, a rising line or upper arc and b a
  // falling line or lower arc. Candidates are the exact crossings.
  std::optional<double> line_vs_arc(double m, double q, std::size_t t, int side, double x_lo,
                                    double x_hi) const {
    // (m x + q - cy)^2 + (x - cx)^2 = r^2
    const double cx = f.centers[t].x;
    const double cy = f.centers[t].y;
    const double k = q - cy;
    const double A = m * m + 1.0;
    const double B = 2.0 * (m * k - cx);
    const double C = k * k + cx * cx - r * r;
    const double disc = B * B - 4.0 * A * C;
    if (disc < 0.0) return std::nullopt;
    const double sq = std::sqrt(disc);
    std::optional<double> best;
    for (double x : {(-B + sq) / (2.0 * A), (-B - sq) / (2.0 * A)}) {
      if (x < x_lo - kTol || x > x_hi + kTol) continue;
      if (side * (m * x + q - cy) < -1e-9) continue;
      if (!best || x > *best) best = x;
    }
    return best;
  }

  std::optional<double> arc_vs_arc(std::size_t ta, std::size_t tb, double x_lo, double x_hi) const {
    const Point a = f.centers[ta];
    const Point b = f.centers[tb];
    const double dx = b.x - a.x;
    const double dy = b.y - a.y;
    const double d2 = dx * dx + dy * dy;
    if (d2 > 4.0 * r * r || d2 < kTol) return std::nullopt;
    const double d = std::sqrt(d2);
    const double h = std::sqrt(std::max(0.0, r * r - d2 / 4.0));
    const Point mid{(a.x + b.x) / 2.0, (a.y + b.y) / 2.0};
    std::optional<double> best;
    for (int s : {1, -1}) {
      const Point p{mid.x - s * h * dy / d, mid.y + s * h * dx / d};
      if (p.x < x_lo - kTol || p.x > x_hi + kTol) continue;
      // Upper arc of a, lower arc of b.
      if (p.y < a.y - 1e-9 || p.y > b.y + 1e-9) continue;
      if (!best || p.x > *best) best = p.x;
    }
    return best;
  }

  // Leftward merge column of live[k] and live[k + 1] within [x_lo, x_hi].
  std::optional<double> merge_at(std::size_t k, double x_lo, double x_hi) const {
    const Section& a = live[k];
    const Section& b = live[k + 1];
    if (hi_at(a, x_hi) >= lo_at(b, x_hi) - kTol) return x_hi;
    std::optional<double> best;
    auto take = [&](std::optional<double> x) {
      if (x && (!best || *x > *best)) best = x;
    };
    for (std::size_t tb : b.arcs) {
      if (a.hi.valid) take(line_vs_arc(slope, a.hi.icpt, tb, -1, x_lo, x_hi));
      for (std::size_t ta : a.arcs) take(arc_vs_arc(ta, tb, x_lo, x_hi));
    }
    if (b.lo.valid) {
      for (std::size_t ta : a.arcs) take(line_vs_arc(-slope, b.lo.icpt, ta, +1, x_lo, x_hi));
    }
    // Two lines never meet leftward: the upper one falls, the lower one rises.
    return best;
  }

  // Apex column of an interval with no active trees.
  std::optional<double> death_at(std::size_t k, double x_hi) const {
    const Section& s = live[k];
    if (!s.arcs.empty() || !s.hi.valid || !s.lo.valid) return std::nullopt;
    // slope x + hi = -slope x + lo
    const double x = (s.lo.icpt - s.hi.icpt) / (2.0 * slope);
    return std::min(x, x_hi);
  }
};

}  // namespace

TreeComponents sweep_components(const forest::Forest& f, double speed, double clip_x) {
  const ConeParams cone = geometry::cone_params(speed);
  Sweeper sw{f, speed, 1.0 / speed, f.tree_radius, {}, {}, {}};
  const std::size_t n = f.size();
  sw.parent.resize(n);
  std::iota(sw.parent.begin(), sw.parent.end(), std::size_t{0});
  sw.x_left.assign(n, kInf);
  const double r = f.tree_radius;
  const double tan_dx = r * cone.sin_half;

  // Tree events, rightmost first; starts before expiries at equal columns.
  struct Event {
    double x;
    int kind;  // 0 start, 1 expiry
    std::size_t tree;
  };
  std::vector<Event> events;
  events.reserve(2 * n);
  std::vector<char> started(n, 0);
  for (std::size_t i = 0; i < n; ++i) {
    events.push_back({f.centers[i].x + r, 0, i});
    events.push_back({f.centers[i].x - tan_dx, 1, i});
  }
  std::sort(events.begin(), events.end(), [](const Event& a, const Event& b) {
    if (a.x != b.x) return a.x > b.x;
    if (a.kind != b.kind) return a.kind < b.kind;
    return a.tree < b.tree;
  });

  auto kill = [&](std::size_t k, double x) {
    const std::size_t root = sw.find(sw.live[k].rep);
    sw.x_left[root] = std::min(sw.x_left[root], x);
    sw.live.erase(sw.live.begin() + static_cast<std::ptrdiff_t>(k));
  };
  auto merge = [&](std::size_t k) {
    Section& a = sw.live[k];
    Section& b = sw.live[k + 1];
    a.hi = b.hi;
    a.arcs.insert(a.arcs.end(), b.arcs.begin(), b.arcs.end());
    sw.unite(a.rep, b.rep);
    sw.live.erase(sw.live.begin() + static_cast<std::ptrdiff_t>(k + 1));
  };

  // Internal events (merges, deaths) strictly right of x_stop, from x_cur.
  auto advance = [&](double x_cur, double x_stop) {
    for (;;) {
      double best = -kInf;
      std::size_t best_k = 0;
      bool best_merge = false;
      for (std::size_t k = 0; k < sw.live.size(); ++k) {
        if (auto x = sw.death_at(k, x_cur); x && *x > best) {
          best = *x;
          best_k = k;
          best_merge = false;
        }
        if (k + 1 < sw.live.size()) {
          if (auto x = sw.merge_at(k, x_stop, x_cur); x && *x > best) {
            best = *x;
            best_k = k;
            best_merge = true;
          }
        }
      }
      if (best < x_stop || best == -kInf) return x_cur;
      x_cur = best;
      if (best_merge) {
        merge(best_k);
      } else {
        kill(best_k, best);
      }
    }
  };

  double x_cur = events.empty() ? clip_x : events.front().x;
  for (const Event& e : events) {
    if (e.x < clip_x) break;
    x_cur = advance(x_cur, e.x);
    x_cur = e.x;
    const std::size_t t = e.tree;
    const Point c = f.centers[t];
    if (e.kind == 0) {
      started[t] = 1;
      std::size_t k = 0;
      while (k < sw.live.size() && sw.hi_at(sw.live[k], e.x) < c.y - kTol) ++k;
      if (k < sw.live.size() && sw.lo_at(sw.live[k], e.x) <= c.y + kTol) {
        sw.live[k].arcs.push_back(t);
        sw.unite(sw.live[k].rep, t);
      } else {
        Section s;
        s.arcs.push_back(t);
        s.rep = t;
        sw.live.insert(sw.live.begin() + static_cast<std::ptrdiff_t>(k), std::move(s));
      }
    } else {
      if (!started[t]) continue;
      for (Section& s : sw.live) {
        const auto it = std::find(s.arcs.begin(), s.arcs.end(), t);
        if (it == s.arcs.end()) continue;
        s.arcs.erase(it);
        // Tangency lines through (x_t, c.y +- r cos).
        const double up = c.y + r * cone.cos_half - sw.slope * e.x;
        const double down = c.y - r * cone.cos_half + sw.slope * e.x;
        if (!s.hi.valid || up > s.hi.icpt) s.hi = {true, up};
        if (!s.lo.valid || down < s.lo.icpt) s.lo = {true, down};
        break;
      }
    }
  }
  advance(x_cur, clip_x);
  for (const Section& s : sw.live) {
    const std::size_t root = sw.find(s.rep);
    sw.x_left[root] = std::min(sw.x_left[root], clip_x);
  }

  TreeComponents out;
  out.component_of.assign(n, kNoTree);
  std::vector<std::size_t> label(n, kNoTree);
  for (std::size_t i = 0; i < n; ++i) {
    if (!started[i]) continue;
    const std::size_t root = sw.find(i);
    if (label[root] == kNoTree) {
      label[root] = out.components.size();
      Component comp;
      comp.y_min = kInf;
      comp.y_max = -kInf;
      comp.x_min = sw.x_left[root];
      comp.x_max = -kInf;
      out.components.push_back(comp);
    }
    Component& comp = out.components[label[root]];
    out.component_of[i] = label[root];
    comp.members.push_back(i);
    const Point c = f.centers[i];
    // Trees cut by the clip column contribute only their visible chord.
    double half = r;
    if (c.x < clip_x) {
      const double dx = clip_x - c.x;
      half = std::sqrt(std::max(0.0, r * r - dx * dx));
    }
    comp.y_min = std::min(comp.y_min, c.y - half);
    comp.y_max = std::max(comp.y_max, c.y + half);
    comp.x_max = std::max(comp.x_max, c.x + r);
  }
  for (Component& comp : out.components) {
    comp.x_min = std::max(comp.x_min, clip_x);
  }
  return out;
}

double max_normalized_width(const TreeComponents& c, double window_width) {
  double best = 0.0;
  for (const Component& comp : c.components) best = std::max(best, comp.lateral_extent());
  return best / window_width;
}

}  // namespace forestflight::shadow
