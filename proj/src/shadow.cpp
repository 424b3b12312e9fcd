#include "forestflight/shadow.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <string>

#include "forestflight/error.hpp"
#include "forestflight/kernels.hpp"

namespace forestflight::shadow {
namespace {

using geometry::kEps;

constexpr double kInf = std::numeric_limits<double>::infinity();

Point to_frame(Point p, bool mirrored) { return mirrored ? Point{-p.x, p.y} : p; }

bool is_primary(const Shadow& s) { return s.kind != ShadowKind::induced; }

double line_hi(const Shadow& s, double x, const ConeParams& cone) {
  const Point a = s.top_outline.apex;
  return a.y + (x - a.x) / cone.speed;
}

double line_lo(const Shadow& s, double x, const ConeParams& cone) {
  const Point a = s.top_outline.apex;
  return a.y - (x - a.x) / cone.speed;
}

// World-coordinate apex/top/bottom from the frame description.
void set_world_segments(Shadow& s, Point top_end, Point bottom_end) {
  const Point a = s.top_outline.apex;
  if (!s.mirrored) {
    s.apex = a;
    s.top = {a, top_end, +1};
    s.bottom = {a, bottom_end, -1};
    return;
  }
  s.apex = {-a.x, a.y};
  s.top = {{-top_end.x, top_end.y}, s.apex, -1};
  s.bottom = {{-bottom_end.x, bottom_end.y}, s.apex, +1};
}

Shadow frame_primary(const Disk& tree, const ConeParams& cone, std::size_t tree_id) {
  Shadow s;
  const Point apex{tree.center.x - tree.radius / cone.sin_half, tree.center.y};
  s.top_outline = {apex, tree, +1};
  s.bottom_outline = {apex, tree, -1};
  s.tree = tree_id;
  s.key = {tree_id, tree_id, tree_id, tree_id};
  return s;
}

// x values at which hi or lo change their analytic form, within [lo, hi].
void add_breakpoints(const Shadow& s, const ConeParams& cone, double lo, double hi,
                     std::vector<double>& out) {
  auto add = [&](double x) {
    if (x > lo && x < hi) out.push_back(x);
  };
  auto add_outline = [&](const Outline& o) {
    add(o.apex.x);
    add(o.tangency_x(cone));
    add(o.tree.center.x);
  };
  add_outline(s.top_outline);
  add_outline(s.bottom_outline);
  if (s.kind == ShadowKind::induced) {
    add_outline(s.pocket_upper);
    add_outline(s.pocket_lower);
  }
}

template <class F>
double golden_max(F&& f, double a, double b, int iters) {
  constexpr double kPhi = 0.6180339887498949;
  double c = b - kPhi * (b - a);
  double d = a + kPhi * (b - a);
  double fc = f(c);
  double fd = f(d);
  double best = std::max({f(a), f(b), fc, fd});
  for (int i = 0; i < iters && b - a > 1e-12; ++i) {
    if (fc >= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - kPhi * (b - a);
      fc = f(c);
      best = std::max(best, fc);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + kPhi * (b - a);
      fd = f(d);
      best = std::max(best, fd);
    }
  }
  return best;
}

// First x in [a, b] with g(x) <= 0, given g(a) > 0 and g convex on [a, b].
std::optional<double> first_root_convex(const std::function<double(double)>& g, double a, double b) {
  double right = b;
  if (g(b) > 0.0) {
    // Locate the minimum; if it stays positive there is no root.
    constexpr double kPhi = 0.6180339887498949;
    double lo = a;
    double hi = b;
    double c = hi - kPhi * (hi - lo);
    double d = lo + kPhi * (hi - lo);
    double gc = g(c);
    double gd = g(d);
    for (int i = 0; i < 200 && hi - lo > 1e-13 * std::max(1.0, std::fabs(hi)); ++i) {
      if (gc <= gd) {
        hi = d;
        d = c;
        gd = gc;
        c = hi - kPhi * (hi - lo);
        gc = g(c);
      } else {
        lo = c;
        c = d;
        gc = gd;
        d = lo + kPhi * (hi - lo);
        gd = g(d);
      }
      if (std::min(gc, gd) <= 0.0) break;
    }
    if (gc <= 0.0) {
      right = c;
    } else if (gd <= 0.0) {
      right = d;
    } else {
      return std::nullopt;
    }
  }
  double left = a;
  for (int i = 0; i < 200 && right - left > 1e-13 * std::max(1.0, std::fabs(right)); ++i) {
    const double mid = 0.5 * (left + right);
    if (g(mid) > 0.0) {
      left = mid;
    } else {
      right = mid;
    }
  }
  return right;
}

struct Box {
  double x0, x1, y0, y1;
};

bool overlaps(const Box& a, const Box& b) {
  return a.x0 <= b.x1 + kEps && b.x0 <= a.x1 + kEps && a.y0 <= b.y1 + kEps && b.y0 <= a.y1 + kEps;
}

// Induced children follow their parents' outlines, which run along whole tree
// arcs outside the parent regions, so pairing needs the outline hull too.
Box outline_box(const Shadow& s, const Box& region, double clip_x) {
  Box b = region;
  for (const Outline* o : {&s.top_outline, &s.bottom_outline}) {
    const Disk& t = o->tree;
    b.x0 = std::min(b.x0, std::max(o->apex.x, clip_x));
    b.x1 = std::max(b.x1, t.center.x + t.radius);
    b.y0 = std::min({b.y0, o->apex.y, t.center.y - t.radius});
    b.y1 = std::max({b.y1, o->apex.y, t.center.y + t.radius});
  }
  return b;
}

std::uint64_t cell_key(std::int64_t ix, std::int64_t iy) {
  return (static_cast<std::uint64_t>(static_cast<std::uint32_t>(ix)) << 32) |
         static_cast<std::uint32_t>(iy);
}

class BoxGrid {
 public:
  BoxGrid(double cw, double ch) : cw_(cw), ch_(ch) {}

  template <class F>
  void for_cells(const Box& b, F&& f) const {
    const auto ix0 = static_cast<std::int64_t>(std::floor(b.x0 / cw_));
    const auto ix1 = static_cast<std::int64_t>(std::floor(b.x1 / cw_));
    const auto iy0 = static_cast<std::int64_t>(std::floor(b.y0 / ch_));
    const auto iy1 = static_cast<std::int64_t>(std::floor(b.y1 / ch_));
    for (auto ix = ix0; ix <= ix1; ++ix) {
      for (auto iy = iy0; iy <= iy1; ++iy) f(cell_key(ix, iy));
    }
  }

  void insert(std::size_t id, const Box& b,
              std::unordered_map<std::uint64_t, std::vector<std::size_t>>& cells) const {
    for_cells(b, [&](std::uint64_t k) { cells[k].push_back(id); });
  }

 private:
  double cw_;
  double ch_;
};

struct UnionFind {
  std::vector<std::size_t> parent;
  std::vector<std::size_t> rank;

  std::size_t add() {
    parent.push_back(parent.size());
    rank.push_back(0);
    return parent.size() - 1;
  }
  std::size_t find(std::size_t x) {
    while (parent[x] != x) {
      parent[x] = parent[parent[x]];
      x = parent[x];
    }
    return x;
  }
  void unite(std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    if (a == b) return;
    if (rank[a] < rank[b]) std::swap(a, b);
    parent[b] = a;
    if (rank[a] == rank[b]) ++rank[a];
  }
};

}  // namespace

double Outline::tangency_x(const ConeParams& cone) const {
  return tree.center.x - tree.radius * cone.sin_half;
}

double Outline::operator()(double x, const ConeParams& cone) const {
  const double s = side >= 0 ? 1.0 : -1.0;
  if (x <= tangency_x(cone)) return apex.y + s * (x - apex.x) / cone.speed;
  const double dx = x - tree.center.x;
  return tree.center.y + s * std::sqrt(std::max(0.0, tree.radius * tree.radius - dx * dx));
}

double frame_x_end(const Shadow& s) {
  return is_primary(s) ? s.top_outline.end_x() : s.closure_x;
}

double frame_hi(const Shadow& s, double x, const ConeParams& cone) {
  if (is_primary(s)) return s.top_outline(x, cone);
  if (x <= s.pocket_upper.apex.x) return line_hi(s, x, cone);
  return s.pocket_upper(x, cone);
}

double frame_lo(const Shadow& s, double x, const ConeParams& cone) {
  if (is_primary(s)) return s.bottom_outline(x, cone);
  if (x <= s.pocket_lower.apex.x) return line_lo(s, x, cone);
  return s.pocket_lower(x, cone);
}

bool Shadow::contains(Point p, const ConeParams& cone) const {
  const Point q = to_frame(p, mirrored);
  if (q.x < top_outline.apex.x - kEps || q.x > frame_x_end(*this) + kEps) return false;
  const double x = std::clamp(q.x, top_outline.apex.x, frame_x_end(*this));
  // Near the apex the band is thinner than the x tolerance; widen by the slope.
  const double slack = kEps * (1.0 + 1.0 / cone.speed);
  return q.y <= frame_hi(*this, x, cone) + slack && q.y >= frame_lo(*this, x, cone) - slack;
}

Shadow left_primary_shadow(const Disk& tree, const ConeParams& cone, std::size_t tree_id) {
  Shadow s = frame_primary(tree, cone, tree_id);
  s.kind = ShadowKind::left_primary;
  set_world_segments(s, geometry::tangent_point(tree, cone, +1, geometry::Side::upper),
                     geometry::tangent_point(tree, cone, -1, geometry::Side::lower));
  return s;
}

Shadow right_primary_shadow(const Disk& tree, const ConeParams& cone, std::size_t tree_id) {
  const Disk mirrored_tree{{-tree.center.x, tree.center.y}, tree.radius};
  Shadow s = frame_primary(mirrored_tree, cone, tree_id);
  s.kind = ShadowKind::right_primary;
  s.mirrored = true;
  set_world_segments(s, geometry::tangent_point(mirrored_tree, cone, +1, geometry::Side::upper),
                     geometry::tangent_point(mirrored_tree, cone, -1, geometry::Side::lower));
  return s;
}

// Pocket between up's bottom outline and low's top outline. It opens where
// the gap first turns positive right of both apexes and closes at the next
// zero. The later apex may sit inside the other region; the slices before the
// pocket opens are then empty or already doomed.
std::optional<Shadow> induced_shadow_ordered(const Shadow& up, const Shadow& low, const ConeParams& cone) {
  if (up.mirrored != low.mirrored) return std::nullopt;
  const double nu = cone.speed;
  const Point U = up.top_outline.apex;
  const Point L = low.top_outline.apex;
  const Outline& upper = up.bottom_outline;
  const Outline& lower = low.top_outline;
  // Cheap reject: the facing outlines live in [U.x, end] x [tree.y - r, U.y]
  // and [L.x, end] x [L.y, tree.y + r].
  if (upper.tree.center.y - upper.tree.radius > lower.tree.center.y + lower.tree.radius + kEps ||
      L.y > U.y + kEps || std::max(U.x, L.x) > std::min(upper.end_x(), lower.end_x())) {
    return std::nullopt;
  }
  // The apexes must keep their roles: U not below L's region, L not above U's.
  if (U.x >= L.x) {
    if (U.x > lower.end_x() || U.y < low.bottom_outline(U.x, cone) + kEps) return std::nullopt;
  } else if (L.x > upper.end_x() || L.y > up.top_outline(L.x, cone) - kEps) {
    return std::nullopt;
  }

  const double x_begin = std::max(U.x, L.x);
  const double x_stop = std::min(upper.end_x(), lower.end_x());
  if (x_stop < x_begin) return std::nullopt;
  const std::function<double(double)> gap = [&](double x) {
    return upper(x, cone) - lower(x, cone) - kEps;
  };
  std::vector<double> cuts{x_begin};
  for (double t : {upper.tangency_x(cone), lower.tangency_x(cone)}) {
    if (t > x_begin && t < x_stop) cuts.push_back(t);
  }
  std::sort(cuts.begin(), cuts.end());
  cuts.push_back(x_stop);
  // gap is convex on every piece, so a piece that starts closed is either
  // closed throughout or opens once and stays open.
  bool open = gap(x_begin) > 0.0;
  std::optional<double> closure;
  for (std::size_t i = 0; !closure && i + 1 < cuts.size(); ++i) {
    if (cuts[i + 1] <= cuts[i]) continue;
    if (!open) {
      open = gap(cuts[i + 1]) > 0.0;
      continue;
    }
    closure = first_root_convex(gap, cuts[i], cuts[i + 1]);
  }
  if (!closure) return std::nullopt;

  Shadow s;
  s.kind = ShadowKind::induced;
  s.mirrored = up.mirrored;
  const Point apex{(U.x + L.x) / 2.0 - nu * (U.y - L.y) / 2.0, (U.y + L.y) / 2.0 + (L.x - U.x) / (2.0 * nu)};
  s.top_outline = {apex, up.top_outline.tree, +1};
  s.bottom_outline = {apex, low.bottom_outline.tree, -1};
  s.pocket_upper = upper;
  s.pocket_lower = lower;
  s.crossing = {(U.x + L.x) / 2.0 + nu * (U.y - L.y) / 2.0, (U.y + L.y) / 2.0 + (U.x - L.x) / (2.0 * nu)};
  s.closure_x = *closure;
  s.key = {up.key[0], up.key[3], low.key[0], low.key[3]};
  set_world_segments(s, U, L);
  if (s.mirrored) s.crossing.x = -s.crossing.x;
  return s;
}

std::vector<Shadow> induced_shadows(const Shadow& a, const Shadow& b, const ConeParams& cone) {
  std::vector<Shadow> out;
  if (a.mirrored != b.mirrored) return out;
  // Higher apex as the upper parent first.
  const bool a_first = a.top_outline.apex.y >= b.top_outline.apex.y;
  const Shadow& p = a_first ? a : b;
  const Shadow& q = a_first ? b : a;
  if (auto s = induced_shadow_ordered(p, q, cone)) out.push_back(std::move(*s));
  if (auto s = induced_shadow_ordered(q, p, cone)) out.push_back(std::move(*s));
  return out;
}

std::optional<Shadow> induced_shadow(const Shadow& a, const Shadow& b, const ConeParams& cone) {
  auto all = induced_shadows(a, b, cone);
  if (all.empty()) return std::nullopt;
  return std::move(all.front());
}

std::pair<double, double> lateral_range(const Shadow& s, const ConeParams& cone, double clip_x) {
  const double x0 = std::max(s.top_outline.apex.x, clip_x);
  const double x1 = frame_x_end(s);
  if (x0 > x1) return {kInf, -kInf};
  // Every piece of hi and lo is monotone between consecutive breakpoints, so
  // the extremes are attained at breakpoints or ends.
  std::vector<double> xs{x0, x1};
  add_breakpoints(s, cone, x0, x1, xs);
  double lo = kInf;
  double hi = -kInf;
  for (double x : xs) {
    hi = std::max(hi, frame_hi(s, x, cone));
    lo = std::min(lo, frame_lo(s, x, cone));
  }
  return {lo, hi};
}

bool regions_intersect(const Shadow& a, const Shadow& b, const ConeParams& cone, double clip_x) {
  if (a.mirrored != b.mirrored) return false;
  const double x0 = std::max({a.top_outline.apex.x, b.top_outline.apex.x, clip_x});
  const double x1 = std::min(frame_x_end(a), frame_x_end(b));
  if (x0 > x1 + kEps) return false;
  if (x0 >= x1) {
    const double x = std::min(x0, std::max(x1, std::max(a.top_outline.apex.x, b.top_outline.apex.x)));
    const double xa = std::clamp(x, a.top_outline.apex.x, frame_x_end(a));
    const double xb = std::clamp(x, b.top_outline.apex.x, frame_x_end(b));
    return std::min(frame_hi(a, xa, cone), frame_hi(b, xb, cone)) -
               std::max(frame_lo(a, xa, cone), frame_lo(b, xb, cone)) >=
           -kEps;
  }
  auto g = [&](double x) {
    return std::min(frame_hi(a, x, cone), frame_hi(b, x, cone)) -
           std::max(frame_lo(a, x, cone), frame_lo(b, x, cone));
  };
  // Each primary region is convex, so g is concave on the overlap. Induced
  // regions are convex only piecewise; split at breakpoints and sample.
  if (is_primary(a) && is_primary(b)) return golden_max(g, x0, x1, 80) >= -kEps;
  std::vector<double> xs{x0, x1};
  add_breakpoints(a, cone, x0, x1, xs);
  add_breakpoints(b, cone, x0, x1, xs);
  std::sort(xs.begin(), xs.end());
  for (std::size_t i = 0; i + 1 < xs.size(); ++i) {
    const double lo = xs[i];
    const double hi = xs[i + 1];
    if (g(lo) >= -kEps || g(hi) >= -kEps) return true;
    if (hi - lo <= 0.0) continue;
    constexpr int kSamples = 8;
    int best = 0;
    double best_g = -kInf;
    for (int k = 0; k <= kSamples; ++k) {
      const double v = g(lo + (hi - lo) * k / kSamples);
      if (v > best_g) {
        best_g = v;
        best = k;
      }
    }
    if (best_g >= -kEps) return true;
    const double step = (hi - lo) / kSamples;
    const double a0 = std::max(lo, lo + (best - 1) * step);
    const double b0 = std::min(hi, lo + (best + 1) * step);
    if (golden_max(g, a0, b0, 60) >= -kEps) return true;
  }
  return false;
}

std::vector<Point> region_polygon(const Shadow& s, const ConeParams& cone, double clip_x,
                                  int arc_segments) {
  const double x0 = std::max(s.top_outline.apex.x, clip_x);
  const double x1 = frame_x_end(s);
  std::vector<Point> out;
  if (x0 > x1) return out;
  std::vector<double> xs{x0, x1};
  add_breakpoints(s, cone, x0, x1, xs);
  // Arc samples: uniform in angle over each outline's disk.
  auto add_arc = [&](const Outline& o) {
    const double c = o.tree.center.x;
    const double r = o.tree.radius;
    const double pi = std::acos(-1.0);
    for (int k = 0; k <= arc_segments; ++k) {
      const double x = c - r * std::cos(pi * k / arc_segments);
      if (x > x0 && x < x1) xs.push_back(x);
    }
  };
  add_arc(s.top_outline);
  add_arc(s.bottom_outline);
  if (s.kind == ShadowKind::induced) {
    add_arc(s.pocket_upper);
    add_arc(s.pocket_lower);
  }
  std::sort(xs.begin(), xs.end());
  xs.erase(std::unique(xs.begin(), xs.end()), xs.end());
  for (double x : xs) out.push_back({x, frame_lo(s, x, cone)});
  for (auto it = xs.rbegin(); it != xs.rend(); ++it) out.push_back({*it, frame_hi(s, *it, cone)});
  if (s.mirrored) {
    for (auto& p : out) p.x = -p.x;
    std::reverse(out.begin(), out.end());
  }
  return out;
}

// ---------------------------------------------------------------------------

ShadowSet build_shadow_set(const forest::Forest& f, double speed, double clip_x, Regions regions) {
  ShadowSet set;
  set.cone_ = geometry::cone_params(speed);
  set.clip_x_ = clip_x;
  const ConeParams& cone = set.cone_;
  const double r = f.tree_radius;
  set.cell_w_ = r / cone.sin_half + r;
  set.cell_h_ = 2.0 * r;
  const BoxGrid grid(set.cell_w_, set.cell_h_);

  std::vector<Box> boxes;
  std::vector<Box> hulls;
  std::vector<std::pair<double, double>> ranges;
  UnionFind uf;
  std::unordered_map<std::uint64_t, std::vector<std::size_t>> cells;
  // Keys are 4-tuples of tree ids; hash them into one word for lookup.
  auto hash_key = [](const std::array<std::size_t, 4>& k) {
    std::uint64_t h = 1469598103934665603ull;
    for (std::size_t v : k) {
      h ^= static_cast<std::uint64_t>(v) + 0x9e3779b97f4a7c15ull + (h << 6) + (h >> 2);
    }
    return h;
  };
  std::unordered_map<std::uint64_t, std::vector<std::size_t>> seen;
  // As a parent a shadow is fixed by its apex and its top and bottom outlines,
  // all determined by (key[0], key[3]). Only the first shadow of each such
  // class spawns children; the others only add region.
  std::unordered_map<std::uint64_t, std::size_t> parent_class;
  std::vector<char> spawns;

  auto add = [&](Shadow s) -> bool {
    auto& bucket = seen[hash_key(s.key)];
    for (std::size_t id : bucket) {
      if (set.shadows_[id].key == s.key) {
        ++set.stats_.duplicate_keys;
        return false;
      }
    }
    const auto range = lateral_range(s, cone, clip_x);
    if (range.first > range.second) return false;
    const std::size_t id = set.shadows_.size();
    const std::uint64_t pc = (static_cast<std::uint64_t>(s.key[0]) << 32) ^ static_cast<std::uint64_t>(s.key[3]);
    const auto [rep, fresh] = parent_class.try_emplace(pc, id);
    const bool spawn = fresh || set.shadows_[rep->second].key[0] != s.key[0] ||
                       set.shadows_[rep->second].key[3] != s.key[3];
    if (!spawn && regions == Regions::components) return false;
    if (id >= kMaxShadows) {
      throw ValidationError("shadow set exceeds " + std::to_string(kMaxShadows) +
                            " regions; use the component sweep for widths");
    }
    spawns.push_back(spawn);
    set.stats_.representatives += spawn;
    s.clipped = s.top_outline.apex.x < clip_x;
    bucket.push_back(id);
    const Box box{std::max(s.top_outline.apex.x, clip_x), frame_x_end(s), range.first, range.second};
    set.shadows_.push_back(std::move(s));
    boxes.push_back(box);
    hulls.push_back(outline_box(set.shadows_.back(), box, clip_x));
    ranges.push_back(range);
    uf.add();
    return true;
  };

  for (std::size_t i = 0; i < f.size(); ++i) {
    if (add(left_primary_shadow(f.tree(i), cone, i))) ++set.stats_.primaries;
  }

  std::vector<std::size_t> near;
  for (std::size_t i = 0; i < set.shadows_.size(); ++i) {
    if (!spawns[i]) {
      // Same apex as the class representative. The remaining boundary lies on
      // the representative, its parents or their trees, so the region can
      // neither widen nor bridge components.
      const auto& k = set.shadows_[i].key;
      uf.unite(i, parent_class.at((static_cast<std::uint64_t>(k[0]) << 32) ^ static_cast<std::uint64_t>(k[3])));
      continue;
    }
    near.clear();
    grid.for_cells(hulls[i], [&](std::uint64_t k) {
      const auto it = cells.find(k);
      if (it == cells.end()) return;
      near.insert(near.end(), it->second.begin(), it->second.end());
    });
    std::sort(near.begin(), near.end());
    near.erase(std::unique(near.begin(), near.end()), near.end());
    for (std::size_t j : near) {
      if (!overlaps(hulls[i], hulls[j])) continue;
      ++set.stats_.pair_tests;
      if (uf.find(i) != uf.find(j) && overlaps(boxes[i], boxes[j]) && regions_intersect(set.shadows_[i], set.shadows_[j], cone, clip_x)) {
        uf.unite(i, j);
      }
      if (set.shadows_[i].clipped || set.shadows_[j].clipped) continue;
      for (const auto& [u, l] : {std::pair{i, j}, std::pair{j, i}}) {
        if (regions == Regions::components) {
          // The child's apex class is known up front.
          const std::size_t t = set.shadows_[u].key[0];
          const std::size_t b = set.shadows_[l].key[3];
          const auto it = parent_class.find((static_cast<std::uint64_t>(t) << 32) ^ static_cast<std::uint64_t>(b));
          if (it != parent_class.end() && set.shadows_[it->second].key[0] == t &&
              set.shadows_[it->second].key[3] == b) {
            continue;
          }
        }
        auto child = induced_shadow_ordered(set.shadows_[u], set.shadows_[l], cone);
        if (!child) continue;
        child->parents = std::pair{u, l};
        if (!add(std::move(*child))) continue;
        const std::size_t c = set.shadows_.size() - 1;
        ++set.stats_.induced;
        uf.unite(c, i);
        uf.unite(c, j);
        const auto& pr = ranges;
        const double span_lo = std::min(pr[i].first, pr[j].first);
        const double span_hi = std::max(pr[i].second, pr[j].second);
        if (pr[c].first < span_lo - 1e-7 || pr[c].second > span_hi + 1e-7) ++set.stats_.extent_escapes;
      }
    }
    grid.insert(i, hulls[i], cells);
  }

  // Components.
  const std::size_t n = set.shadows_.size();
  set.component_of_.assign(n, 0);
  std::unordered_map<std::size_t, std::size_t> label;
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t root = uf.find(i);
    auto [it, fresh] = label.try_emplace(root, set.components_.size());
    if (fresh) {
      Component c;
      c.y_min = kInf;
      c.y_max = -kInf;
      c.x_min = kInf;
      c.x_max = -kInf;
      set.components_.push_back(c);
    }
    Component& c = set.components_[it->second];
    set.component_of_[i] = it->second;
    c.members.push_back(i);
    c.y_min = std::min(c.y_min, boxes[i].y0);
    c.y_max = std::max(c.y_max, boxes[i].y1);
    c.x_min = std::min(c.x_min, boxes[i].x0);
    c.x_max = std::max(c.x_max, boxes[i].x1);
  }
  for (std::size_t i = 0; i < n; ++i) grid.insert(i, boxes[i], set.grid_);
  return set;
}

std::vector<std::size_t> ShadowSet::candidates_near(Point p) const {
  const auto ix = static_cast<std::int64_t>(std::floor(p.x / cell_w_));
  const auto iy = static_cast<std::int64_t>(std::floor(p.y / cell_h_));
  std::vector<std::size_t> out;
  // Points on a cell edge may belong to a box indexed only in the neighbour.
  for (std::int64_t dx = -1; dx <= 1; ++dx) {
    for (std::int64_t dy = -1; dy <= 1; ++dy) {
      const auto it = grid_.find(cell_key(ix + dx, iy + dy));
      if (it != grid_.end()) out.insert(out.end(), it->second.begin(), it->second.end());
    }
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

bool ShadowSet::is_doomed(Point p) const {
  if (p.x < clip_x_ - kEps) return false;
  for (std::size_t id : candidates_near(p)) {
    if (shadows_[id].contains(p, cone_)) return true;
  }
  return false;
}

std::vector<std::uint8_t> ShadowSet::classify(const std::vector<Point>& points) const {
  std::vector<std::uint8_t> out(points.size(), 0);
  if (shadows_.empty() || points.empty()) return out;
  // Bucket the query points by grid cell so each shadow only sees nearby
  // points, then run primaries through the batch kernels.
  std::unordered_map<std::uint64_t, std::vector<std::size_t>> buckets;
  for (std::size_t i = 0; i < points.size(); ++i) {
    if (points[i].x < clip_x_ - kEps) continue;
    const auto ix = static_cast<std::int64_t>(std::floor(points[i].x / cell_w_));
    const auto iy = static_cast<std::int64_t>(std::floor(points[i].y / cell_h_));
    buckets[cell_key(ix, iy)].push_back(i);
  }
  const kernels::Table& k = kernels::active();
  std::vector<double> xs;
  std::vector<double> ys;
  std::vector<std::uint8_t> hit;
  for (const auto& [cell, idx] : buckets) {
    const Point probe = points[idx.front()];
    const auto candidates = candidates_near(probe);
    xs.resize(idx.size());
    ys.resize(idx.size());
    hit.assign(idx.size(), 0);
    for (std::size_t t = 0; t < idx.size(); ++t) {
      xs[t] = points[idx[t]].x;
      ys[t] = points[idx[t]].y;
    }
    for (std::size_t id : candidates) {
      const Shadow& s = shadows_[id];
      if (s.kind == ShadowKind::left_primary) {
        const Outline& o = s.top_outline;
        const double r = o.tree.radius + kEps;
        k.disk_hits(xs.data(), ys.data(), xs.size(), o.tree.center.x, o.tree.center.y, r * r, hit.data());
        k.wedge_hits(xs.data(), ys.data(), xs.size(), o.apex.x, o.apex.y, o.apex.x - kEps,
                     o.tangency_x(cone_), cone_.slope(), kEps * (1.0 + cone_.slope()), hit.data());
      } else {
        for (std::size_t t = 0; t < idx.size(); ++t) {
          if (!hit[t] && s.contains({xs[t], ys[t]}, cone_)) hit[t] = 1;
        }
      }
    }
    for (std::size_t t = 0; t < idx.size(); ++t) out[idx[t]] = hit[t];
  }
  return out;
}

const std::vector<Component>& occupied_components(const ShadowSet& s) { return s.components(); }

double max_normalized_width(const ShadowSet& s, double window_width) {
  double best = 0.0;
  for (const auto& c : s.components()) best = std::max(best, c.lateral_extent());
  return best / window_width;
}

bool crossing_exists(const forest::Forest& f, double speed) {
  const ConeParams cone = geometry::cone_params(speed);
  const double clip = -f.tree_radius / cone.sin_half;
  return max_normalized_width(sweep_components(f, speed, clip), f.window.width) < 1.0;
}

}  // namespace forestflight::shadow
