#include "forestflight/continuum.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <unordered_map>

#include "json.hpp"

#include "forestflight/error.hpp"
#include "forestflight/parallel.hpp"
#include "forestflight/rng.hpp"

namespace forestflight::continuum {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kPi = 3.14159265358979323846;

struct DisjointSets {
  std::vector<std::size_t> parent;
  explicit DisjointSets(std::size_t n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
  std::size_t find(std::size_t x) {
    while (parent[x] != x) {
      parent[x] = parent[parent[x]];
      x = parent[x];
    }
    return x;
  }
  // Returns the surviving root.
  std::size_t unite(std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    if (a != b) parent[a] = b;
    return b;
  }
};

std::uint64_t cell_key(std::int64_t ix, std::int64_t iy) {
  return (static_cast<std::uint64_t>(static_cast<std::uint32_t>(ix)) << 32) |
         static_cast<std::uint32_t>(iy);
}

void check_positive(double v, const char* what) {
  if (!(v > 0.0) || !std::isfinite(v)) throw ValidationError(std::string(what) + " must be positive");
}

double kernel_area(const GilbertSpec& spec) {
  switch (spec.shape) {
    case Shape::disk:
      return kPi * 4.0 * spec.a * spec.a;
    case Shape::square:
      return 4.0 * spec.a * spec.a;
    case Shape::rectangle:
      return 4.0 * spec.a * spec.b;
  }
  return 0.0;
}

GilbertSpec unit_spec(Shape shape, double side) {
  GilbertSpec spec;
  spec.shape = shape;
  spec.a = shape == Shape::disk ? 0.5 : 1.0;
  spec.b = spec.a;
  spec.window = {side, side};
  return spec;
}

}  // namespace

const char* shape_name(Shape s) {
  switch (s) {
    case Shape::disk:
      return "disk";
    case Shape::square:
      return "square";
    case Shape::rectangle:
      return "rectangle";
  }
  return "?";
}

Shape parse_shape(const std::string& name) {
  if (name == "disk") return Shape::disk;
  if (name == "square") return Shape::square;
  if (name == "rectangle") return Shape::rectangle;
  throw ValidationError("unknown shape '" + name + "' (expected disk, square or rectangle)");
}

void validate(const GilbertSpec& spec) {
  check_positive(spec.a, "shape size");
  if (spec.shape == Shape::rectangle) check_positive(spec.b, "rectangle width");
  if (!(spec.intensity >= 0.0) || !std::isfinite(spec.intensity)) {
    throw ValidationError("intensity must be >= 0");
  }
  forest::validate(spec.window);
}

double degree(const GilbertSpec& spec) { return spec.intensity * kernel_area(spec); }

double intensity_for_degree(const GilbertSpec& spec, double d) { return d / kernel_area(spec); }

Point half_extent(const GilbertSpec& spec) {
  switch (spec.shape) {
    case Shape::disk:
      return {spec.a, spec.a};
    case Shape::square:
      return {spec.a / 2.0, spec.a / 2.0};
    case Shape::rectangle:
      return {spec.a / 2.0, spec.b / 2.0};
  }
  return {0.0, 0.0};
}

bool shapes_overlap(const GilbertSpec& spec, Point p, Point q) {
  const double dx = p.x - q.x;
  const double dy = p.y - q.y;
  if (spec.shape == Shape::disk) return dx * dx + dy * dy < 4.0 * spec.a * spec.a;
  const Point h = half_extent(spec);
  return std::fabs(dx) < 2.0 * h.x && std::fabs(dy) < 2.0 * h.y;
}

std::vector<Point> sample_points(const GilbertSpec& spec, std::uint64_t seed) {
  validate(spec);
  rng::Stream s(seed, "continuum.points", 0);
  const auto n = s.poisson(spec.intensity * spec.window.width * spec.window.length);
  std::vector<Point> pts;
  pts.reserve(n);
  for (std::uint64_t i = 0; i < n; ++i) {
    const double x = s.uniform() * spec.window.length;
    const double y = s.uniform() * spec.window.width;
    pts.push_back({x, y});
  }
  return pts;
}

Occupied occupied_components(const GilbertSpec& spec, const std::vector<Point>& centers) {
  validate(spec);
  Occupied occ;
  occ.centers = centers;
  const std::size_t n = centers.size();
  const Point h = half_extent(spec);
  const double cw = 2.0 * h.x;
  const double ch = 2.0 * h.y;
  std::unordered_map<std::uint64_t, std::vector<std::size_t>> grid;
  grid.reserve(n);
  DisjointSets ds(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto ix = static_cast<std::int64_t>(std::floor(centers[i].x / cw));
    const auto iy = static_cast<std::int64_t>(std::floor(centers[i].y / ch));
    for (std::int64_t dx = -1; dx <= 1; ++dx) {
      for (std::int64_t dy = -1; dy <= 1; ++dy) {
        const auto it = grid.find(cell_key(ix + dx, iy + dy));
        if (it == grid.end()) continue;
        for (std::size_t j : it->second) {
          if (shapes_overlap(spec, centers[i], centers[j])) ds.unite(i, j);
        }
      }
    }
    grid[cell_key(ix, iy)].push_back(i);
  }
  occ.component_of.assign(n, 0);
  std::unordered_map<std::size_t, std::size_t> label;
  for (std::size_t i = 0; i < n; ++i) {
    auto [it, fresh] = label.try_emplace(ds.find(i), occ.components.size());
    if (fresh) occ.components.push_back({{}, kInf, -kInf, kInf, -kInf});
    ComponentExtent& c = occ.components[it->second];
    occ.component_of[i] = it->second;
    c.members.push_back(i);
    c.x_min = std::min(c.x_min, centers[i].x - h.x);
    c.x_max = std::max(c.x_max, centers[i].x + h.x);
    c.y_min = std::min(c.y_min, centers[i].y - h.y);
    c.y_max = std::max(c.y_max, centers[i].y + h.y);
  }
  return occ;
}

Occupied occupied_components(const GilbertSpec& spec, std::uint64_t seed) {
  return occupied_components(spec, sample_points(spec, seed));
}

bool spans_height(const GilbertSpec& spec, const ComponentExtent& c) {
  return c.y_min <= 0.0 && c.y_max >= spec.window.width;
}

bool vacant_crossing(const GilbertSpec& spec, const Occupied& occ) {
  for (const auto& c : occ.components) {
    if (spans_height(spec, c)) return false;
  }
  return true;
}

bool vacant_crossing(const GilbertSpec& spec, std::uint64_t seed) {
  return vacant_crossing(spec, occupied_components(spec, seed));
}

double critical_degree_trial(Shape shape, double window_multiple, double max_degree,
                             std::uint64_t seed, std::uint64_t trial) {
  check_positive(window_multiple, "window multiple");
  check_positive(max_degree, "maximum degree");
  if (shape == Shape::rectangle) throw ValidationError("critical degree is defined for disk or square");
  GilbertSpec spec = unit_spec(shape, window_multiple);
  spec.intensity = intensity_for_degree(spec, max_degree);
  const double side = window_multiple;
  rng::Stream s(seed, "continuum.critical", trial);
  const auto n = s.poisson(spec.intensity * side * side);
  struct Marked {
    Point p;
    double mark;
  };
  std::vector<Marked> pts(n);
  for (auto& m : pts) {
    m.p.x = s.uniform() * side;
    m.p.y = s.uniform() * side;
    m.mark = s.uniform();
  }
  // Thinning: the realization at degree t * max_degree keeps marks below t.
  std::sort(pts.begin(), pts.end(), [](const Marked& a, const Marked& b) { return a.mark < b.mark; });
  const Point h = half_extent(spec);
  std::unordered_map<std::uint64_t, std::vector<std::size_t>> grid;
  grid.reserve(n);
  DisjointSets ds(n);
  std::vector<double> y_lo(n);
  std::vector<double> y_hi(n);
  for (std::size_t i = 0; i < n; ++i) {
    const Point p = pts[i].p;
    y_lo[i] = p.y - h.y;
    y_hi[i] = p.y + h.y;
    const auto ix = static_cast<std::int64_t>(std::floor(p.x));
    const auto iy = static_cast<std::int64_t>(std::floor(p.y));
    std::size_t root = i;
    for (std::int64_t dx = -1; dx <= 1; ++dx) {
      for (std::int64_t dy = -1; dy <= 1; ++dy) {
        const auto it = grid.find(cell_key(ix + dx, iy + dy));
        if (it == grid.end()) continue;
        for (std::size_t j : it->second) {
          if (!shapes_overlap(spec, p, pts[j].p)) continue;
          const std::size_t a = ds.find(root);
          const std::size_t b = ds.find(j);
          if (a == b) continue;
          const double lo = std::min(y_lo[a], y_lo[b]);
          const double hi = std::max(y_hi[a], y_hi[b]);
          root = ds.unite(a, b);
          y_lo[root] = lo;
          y_hi[root] = hi;
        }
      }
    }
    grid[cell_key(ix, iy)].push_back(i);
    const std::size_t r = ds.find(root);
    if (y_lo[r] <= 0.0 && y_hi[r] >= side) return pts[i].mark * max_degree;
  }
  return kInf;
}

DegreeEstimate estimate_critical_degree(Shape shape, double window_multiple, const DegreeOptions& opt) {
  if (opt.trials < 100) throw ValidationError("degree estimation needs at least 100 trials");
  if (!(opt.tol > 0.0)) throw ValidationError("tolerance must be positive");
  std::vector<double> crit(opt.trials);
  parallel_for(opt.trials, opt.threads, [&](std::size_t i) {
    crit[i] = critical_degree_trial(shape, window_multiple, opt.max_degree, opt.seed, i);
  });
  std::sort(crit.begin(), crit.end());
  const auto n = static_cast<double>(opt.trials);
  auto frequency = [&](double d) {
    return static_cast<double>(std::lower_bound(crit.begin(), crit.end(), d) - crit.begin()) / n;
  };
  DegreeEstimate est;
  est.shape = shape;
  est.window_multiple = window_multiple;
  est.trials = opt.trials;
  double lo = 0.0;
  double hi = opt.max_degree;
  int it = 0;
  for (; it < opt.max_iterations && hi - lo > opt.tol / 4.0; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (frequency(mid) < 0.5) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  est.iterations = it;
  // A median at the top of the range means the maximum degree was too small.
  est.converged = hi - lo <= opt.tol / 4.0 && hi < opt.max_degree;
  est.estimate = 0.5 * (lo + hi);
  auto quantile = [&](double q) {
    const double pos = q * (n - 1.0);
    const auto k = static_cast<std::size_t>(pos);
    const double frac = pos - static_cast<double>(k);
    const double a = crit[k];
    const double b = crit[std::min(k + 1, crit.size() - 1)];
    return a + frac * (b - a);
  };
  const double spread = quantile(0.6) - quantile(0.4);
  const double dq_df = std::isfinite(spread) ? spread / 0.2 : opt.max_degree;
  est.half_width = std::sqrt(0.25 / n) * dq_df + 0.5 * (hi - lo);
  return est;
}

std::string to_json(const DegreeEstimate& e) {
  nlohmann::json j;
  j["spec"] = {{"shape", shape_name(e.shape)}, {"window_multiple", e.window_multiple}};
  j["estimate"] = e.estimate;
  j["half_width"] = e.half_width;
  j["trials"] = e.trials;
  j["depth"] = e.window_multiple;
  j["iterations"] = e.iterations;
  j["converged"] = e.converged;
  return j.dump(2);
}

GilbertSpec shadow_rectangle_spec(double density, double radius, double speed, forest::Window window) {
  check_positive(radius, "radius");
  const auto cone = geometry::cone_params(speed);
  GilbertSpec spec;
  spec.shape = Shape::rectangle;
  spec.a = radius / cone.sin_half;
  spec.b = radius / cone.cos_half;
  spec.intensity = density;
  spec.window = window;
  validate(spec);
  return spec;
}

bool shadow_rectangle_model(double density, double radius, double speed, forest::Window window,
                            std::uint64_t seed) {
  const GilbertSpec spec = shadow_rectangle_spec(density, radius, speed, window);
  // Same centres as the tree forest for this seed, so the verdict is coupled
  // to the shadow model on identical realizations.
  const auto f = forest::sample_poisson_forest(density, window, radius, seed);
  return vacant_crossing(spec, occupied_components(spec, f.centers));
}

}  // namespace forestflight::continuum
