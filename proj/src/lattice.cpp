#include "forestflight/lattice.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <numeric>

#include "json.hpp"

#include "forestflight/error.hpp"
#include "forestflight/parallel.hpp"
#include "forestflight/rng.hpp"

namespace forestflight::lattice {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct DisjointSets {
  std::vector<std::uint32_t> parent;
  explicit DisjointSets(std::size_t n) : parent(n) { std::iota(parent.begin(), parent.end(), 0u); }
  std::uint32_t find(std::uint32_t x) {
    while (parent[x] != x) {
      parent[x] = parent[parent[x]];
      x = parent[x];
    }
    return x;
  }
  void unite(std::uint32_t a, std::uint32_t b) {
    a = find(a);
    b = find(b);
    if (a != b) parent[a] = b;
  }
};

const char* graph_name(Graph g) { return g == Graph::square ? "square" : "hexagonal"; }
const char* mode_name(Mode m) { return m == Mode::site ? "site" : "bond"; }

}  // namespace

void validate(const LatticeSpec& spec) {
  if (spec.depth < 1) throw ValidationError("lattice depth must be >= 1");
  if (spec.width < 0) throw ValidationError("lattice width must be >= 0");
  if (!(spec.p >= 0.0 && spec.p <= 1.0)) throw ValidationError("open probability must lie in [0, 1]");
}

std::string describe(const LatticeSpec& spec) {
  return std::string(spec.directed ? "directed " : "") + graph_name(spec.graph) + " " + mode_name(spec.mode);
}

LatticeGraph::LatticeGraph(const LatticeSpec& spec)
    : graph_(spec.graph), mode_(spec.mode), directed_(spec.directed) {
  validate(spec);
  const auto n = static_cast<std::size_t>(spec.depth);
  if (spec.width > 0) {
    width_ = static_cast<std::size_t>(spec.width);
  } else if (directed_) {
    width_ = std::max<std::size_t>(
        2, static_cast<std::size_t>(std::lround(std::pow(static_cast<double>(n), kDirectedAspectExponent))));
  } else {
    width_ = n;
  }
  if (spec.source == Source::single) {
    sources_.push_back(width_ / 2);
  } else {
    sources_.resize(width_);
    std::iota(sources_.begin(), sources_.end(), std::size_t{0});
  }
  const bool box = graph_ == Graph::square && !directed_;
  if (box) {
    layer_count_ = mode_ == Mode::bond ? n + 1 : n;
  } else {
    layer_count_ = n + 1;
  }
  incident_.assign(vertex_count(), {});
  auto id = [&](std::size_t t, std::size_t i) { return t * width_ + i; };
  auto link = [&](std::size_t a, std::size_t b) {
    const std::size_t e = edge_from_.size();
    edge_from_.push_back(a);
    edge_to_.push_back(b);
    incident_[a].push_back(e);
    if (!directed_) incident_[b].push_back(e);
  };
  for (std::size_t t = 0; t < layer_count_; ++t) {
    for (std::size_t i = 0; i < width_; ++i) {
      const std::size_t v = id(t, i);
      if (box) {
        if (i + 1 < width_) link(v, id(t, i + 1));
        if (t + 1 < layer_count_) link(v, id(t + 1, i));
        continue;
      }
      if (t + 1 == layer_count_) continue;
      const std::size_t next = t + 1;
      if (graph_ == Graph::square) {
        if (t % 2 == 0) {
          link(v, id(next, i));
          if (i + 1 < width_) link(v, id(next, i + 1));
        } else {
          if (i > 0) link(v, id(next, i - 1));
          link(v, id(next, i));
        }
      } else {
        if (t % 2 == 0) {
          link(v, id(next, i));
        } else if (t % 4 == 1) {
          if (i > 0) link(v, id(next, i - 1));
          link(v, id(next, i));
        } else {
          link(v, id(next, i));
          if (i + 1 < width_) link(v, id(next, i + 1));
        }
      }
    }
  }
}

ClusterResult LatticeGraph::percolate(const std::vector<double>& u, double p) const {
  ClusterResult out;
  const std::size_t nv = vertex_count();
  constexpr std::size_t kNone = std::numeric_limits<std::size_t>::max();
  std::vector<std::size_t> from(nv, kNone);
  std::vector<bool> seen(nv, false);
  std::deque<std::size_t> queue;
  const bool site = mode_ == Mode::site;
  for (std::size_t i : sources_) {
    if (site && !(u[i] < p)) continue;
    seen[i] = true;
    queue.push_back(i);
  }
  std::size_t hit = kNone;
  const std::size_t last_layer = layer_count_ - 1;
  while (!queue.empty()) {
    const std::size_t v = queue.front();
    queue.pop_front();
    ++out.cluster_size;
    if (hit == kNone && layer_of(v) == last_layer) hit = v;
    for (std::size_t e : incident_[v]) {
      const std::size_t w = edge_from_[e] == v ? edge_to_[e] : edge_from_[e];
      if (seen[w]) continue;
      if (site ? !(u[w] < p) : !(u[e] < p)) continue;
      seen[w] = true;
      from[w] = v;
      queue.push_back(w);
    }
  }
  if (hit != kNone) {
    out.crossed = true;
    std::vector<std::size_t> path;
    for (std::size_t v = hit; v != kNone; v = from[v]) path.push_back(v);
    std::reverse(path.begin(), path.end());
    out.path = std::move(path);
  }
  return out;
}

double LatticeGraph::critical_p(const std::vector<double>& u) const {
  return directed_ ? critical_directed(u) : critical_undirected(u);
}

double LatticeGraph::critical_directed(const std::vector<double>& u) const {
  // value[v]: smallest p at which v is reachable from layer 0.
  const bool site = mode_ == Mode::site;
  std::vector<double> value(vertex_count(), kInf);
  for (std::size_t i : sources_) value[i] = site ? u[i] : 0.0;
  for (std::size_t t = 0; t + 1 < layer_count_; ++t) {
    for (std::size_t i = 0; i < width_; ++i) {
      const std::size_t v = t * width_ + i;
      if (value[v] == kInf) continue;
      for (std::size_t e : incident_[v]) {
        const std::size_t w = edge_to_[e];
        const double cand = site ? value[v] : std::max(value[v], u[e]);
        value[w] = std::min(value[w], cand);
      }
    }
    if (site) {
      for (std::size_t i = 0; i < width_; ++i) {
        double& x = value[(t + 1) * width_ + i];
        if (x != kInf) x = std::max(x, u[(t + 1) * width_ + i]);
      }
    }
  }
  double best = kInf;
  for (std::size_t i = 0; i < width_; ++i) best = std::min(best, value[(layer_count_ - 1) * width_ + i]);
  return best;
}

double LatticeGraph::critical_undirected(const std::vector<double>& u) const {
  const std::size_t nv = vertex_count();
  const auto source = static_cast<std::uint32_t>(nv);
  const auto target = static_cast<std::uint32_t>(nv + 1);
  DisjointSets ds(nv + 2);
  const std::size_t last_layer = layer_count_ - 1;
  std::vector<std::uint32_t> order(u.size());
  std::iota(order.begin(), order.end(), 0u);
  std::sort(order.begin(), order.end(), [&](std::uint32_t a, std::uint32_t b) { return u[a] < u[b]; });
  if (mode_ == Mode::bond) {
    for (std::size_t i : sources_) ds.unite(static_cast<std::uint32_t>(i), source);
    for (std::size_t i = 0; i < width_; ++i) {
      ds.unite(static_cast<std::uint32_t>(last_layer * width_ + i), target);
    }
    for (std::uint32_t e : order) {
      ds.unite(static_cast<std::uint32_t>(edge_from_[e]), static_cast<std::uint32_t>(edge_to_[e]));
      if (ds.find(source) == ds.find(target)) return u[e];
    }
    return kInf;
  }
  std::vector<bool> open(nv, false);
  std::vector<bool> is_source(width_, false);
  for (std::size_t i : sources_) is_source[i] = true;
  for (std::uint32_t v : order) {
    open[v] = true;
    if (layer_of(v) == 0 && is_source[v]) ds.unite(v, source);
    if (layer_of(v) == last_layer) ds.unite(v, target);
    for (std::size_t e : incident_[v]) {
      const std::size_t w = edge_from_[e] == v ? edge_to_[e] : edge_from_[e];
      if (open[w]) ds.unite(v, static_cast<std::uint32_t>(w));
    }
    if (ds.find(source) == ds.find(target)) return u[v];
  }
  return kInf;
}

std::vector<double> trial_uniforms(const LatticeGraph& g, std::uint64_t seed, std::uint64_t trial) {
  rng::Stream s(seed, "lattice.trial", trial);
  std::vector<double> u(g.variable_count());
  for (auto& x : u) x = s.uniform();
  return u;
}

ClusterResult percolate_trial(const LatticeSpec& spec, std::uint64_t seed) {
  const LatticeGraph g(spec);
  return g.percolate(trial_uniforms(g, seed, 0), spec.p);
}

namespace {

struct Bisection {
  double estimate = 0.0;
  double half_width = 0.0;
  int iterations = 0;
  bool converged = false;
};

Bisection bisect_half(const LatticeSpec& spec, const EstimateOptions& opt) {
  const LatticeGraph g(spec);
  std::vector<double> sorted(opt.trials);
  parallel_for(opt.trials, opt.threads, [&](std::size_t i) {
    sorted[i] = g.critical_p(trial_uniforms(g, opt.seed, i));
  });
  std::sort(sorted.begin(), sorted.end());
  const auto n = static_cast<double>(opt.trials);
  auto frequency = [&](double p) {
    // Fraction of trials that cross at p, i.e. critical value below p.
    return static_cast<double>(std::lower_bound(sorted.begin(), sorted.end(), p) - sorted.begin()) / n;
  };
  Bisection out;
  double lo = 0.0;
  double hi = 1.0;
  int it = 0;
  for (; it < opt.max_iterations && hi - lo > opt.tol / 4.0; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (frequency(mid) < 0.5) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  out.iterations = it;
  out.converged = hi - lo <= opt.tol / 4.0;
  out.estimate = 0.5 * (lo + hi);
  // Slope of the crossing curve from the 40% and 60% quantiles.
  auto quantile = [&](double q) {
    const double pos = q * (n - 1.0);
    const auto k = static_cast<std::size_t>(pos);
    const double frac = pos - static_cast<double>(k);
    const double a = sorted[k];
    const double b = sorted[std::min(k + 1, sorted.size() - 1)];
    return a + frac * (b - a);
  };
  const double q40 = quantile(0.4);
  const double q60 = quantile(0.6);
  const double dq_df = std::isfinite(q60 - q40) ? (q60 - q40) / 0.2 : 1.0;
  const double se = std::sqrt(0.25 / n);
  out.half_width = se * dq_df + 0.5 * (hi - lo);
  return out;
}

}  // namespace

ThresholdEstimate estimate_threshold(LatticeSpec spec, const EstimateOptions& opt) {
  if (opt.trials < 100) throw ValidationError("threshold estimation needs at least 100 trials");
  if (!(opt.tol > 0.0)) throw ValidationError("tolerance must be positive");
  spec.p = 0.5;
  validate(spec);
  ThresholdEstimate est;
  est.spec = spec;
  est.trials = opt.trials;
  est.depth = spec.depth;
  const bool fit = spec.directed && opt.extrapolate && spec.depth >= 64;
  if (!fit) {
    const Bisection b = bisect_half(spec, opt);
    est.estimate = b.estimate;
    est.half_width = b.half_width;
    est.iterations = b.iterations;
    est.converged = b.converged;
    est.finite_depth = b.estimate;
    return est;
  }
  // Weighted least squares on (n^-shift, p50) over four depths; an explicit
  // width shrinks with the depth exponent so the box shape stays fixed.
  double sw = 0.0, sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  est.converged = true;
  for (int k = 3; k >= 0; --k) {
    LatticeSpec sub = spec;
    sub.depth = spec.depth >> k;
    if (spec.width > 0) {
      const double scale = std::pow(static_cast<double>(sub.depth) / spec.depth, kDirectedAspectExponent);
      sub.width = std::max(2, static_cast<int>(std::lround(spec.width * scale)));
    }
    const Bisection b = bisect_half(sub, opt);
    est.series.push_back({sub.depth, LatticeGraph(sub).width(), b.estimate, b.half_width});
    est.iterations += b.iterations;
    est.converged = est.converged && b.converged;
    const double x = std::pow(static_cast<double>(sub.depth), -kDirectedShiftExponent);
    const double w = 1.0 / std::max(b.half_width * b.half_width, 1e-12);
    sw += w;
    sx += w * x;
    sy += w * b.estimate;
    sxx += w * x * x;
    sxy += w * x * b.estimate;
  }
  const double det = sw * sxx - sx * sx;
  est.estimate = (sxx * sy - sx * sxy) / det;
  est.half_width = std::sqrt(sxx / det);
  est.finite_depth = est.series.back().estimate;
  return est;
}

std::string to_json(const ThresholdEstimate& e) {
  const LatticeGraph g(e.spec);
  nlohmann::json j;
  j["spec"] = {{"graph", graph_name(e.spec.graph)},
               {"directed", e.spec.directed},
               {"mode", mode_name(e.spec.mode)},
               {"depth", e.spec.depth},
               {"width", g.width()},
               {"sources", g.sources().size()}};
  j["estimate"] = e.estimate;
  j["half_width"] = e.half_width;
  j["trials"] = e.trials;
  j["depth"] = e.depth;
  j["finite_depth_estimate"] = e.finite_depth;
  if (!e.series.empty()) {
    auto& arr = j["depth_series"] = nlohmann::json::array();
    for (const DepthPoint& d : e.series) {
      arr.push_back({{"depth", d.depth}, {"width", d.width}, {"estimate", d.estimate}, {"half_width", d.half_width}});
    }
  }
  j["iterations"] = e.iterations;
  j["converged"] = e.converged;
  return j.dump(2);
}

double triangle_open_probability(double density, double radius, double speed) {
  if (!(density >= 0.0) || !std::isfinite(density)) throw ValidationError("density must be >= 0");
  if (!(radius > 0.0) || !std::isfinite(radius)) throw ValidationError("radius must be positive");
  const auto cone = geometry::cone_params(speed);
  return std::exp(-2.0 * density * radius * radius / cone.sin_alpha);
}

Trajectory lattice_path_to_trajectory(const LatticeSpec& spec, const std::vector<std::size_t>& path,
                                      double radius, double speed, geometry::Point origin) {
  if (!(radius > 0.0) || !std::isfinite(radius)) throw ValidationError("radius must be positive");
  const auto cone = geometry::cone_params(speed);
  Trajectory traj;
  traj.interval = radius / (speed * cone.sin_half);
  traj.waypoints.push_back(origin);
  if (path.empty()) return traj;
  if (!(spec.graph == Graph::hexagonal && spec.directed)) {
    throw ValidationError("trajectories are defined for directed hexagonal paths");
  }
  const LatticeGraph g(spec);
  const double step_x = radius / cone.sin_half;
  const double step_y = radius / cone.cos_half;
  // Lateral embedding of the brick wall: layers 2 and 3 (mod 4) sit half a
  // site higher.
  auto lateral = [&](std::size_t v) {
    const std::size_t t = g.layer_of(v);
    return static_cast<double>(g.index_in_layer(v)) + ((t % 4 >= 2) ? 0.5 : 0.0);
  };
  for (std::size_t k = 0; k < path.size(); ++k) {
    if (path[k] >= g.vertex_count()) throw ValidationError("path vertex out of range");
  }
  geometry::Point cur = origin;
  for (std::size_t k = 0; k + 1 < path.size(); ++k) {
    const std::size_t v = path[k];
    const std::size_t w = path[k + 1];
    bool linked = false;
    for (std::size_t e : g.incident(v)) linked = linked || g.edge_to(e) == w;
    if (!linked) throw ValidationError("path step " + std::to_string(k) + " is not a lattice edge");
    if (g.layer_of(v) % 2 == 0) continue;
    const int input = lateral(w) > lateral(v) ? 1 : -1;
    cur = {cur.x + step_x, cur.y + input * step_y};
    traj.waypoints.push_back(cur);
    traj.inputs.push_back(input);
  }
  return traj;
}

}  // namespace forestflight::lattice
