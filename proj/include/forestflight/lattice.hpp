#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "forestflight/geometry.hpp"

namespace forestflight::lattice {

enum class Graph { square, hexagonal };
enum class Mode { site, bond };
// boundary: every site of layer 0. single: its middle site.
enum class Source { boundary, single };

// Undirected square: a box of n rows by n (site) or n + 1 (bond) columns,
// crossed left to right. The bond box is self-dual, so its crossing
// probability at p = 1/2 is exactly 1/2.
//
// Directed graphs are layered: layer t = 0..n, `width` sites per layer, open
// lateral boundaries, and a crossing reaches layer n.
//   square:    even t: i -> i, i+1    odd t: i -> i-1, i
//   hexagonal: brick wall; even t: i -> i, t = 1 mod 4: i -> i-1, i,
//              t = 3 mod 4: i -> i, i+1
// Undirected hexagonal uses the same brick wall without orientation.
//
// Width 0 means n for undirected graphs and round(n^theta) for directed ones,
// theta = nu_perp / nu_par of directed percolation. In that box shape the
// crossing probability at p_c tends to a constant, whereas a wide row keeps
// adding independent starts and a single seed dies out at p_c.
inline constexpr double kDirectedAspectExponent = 0.6326;
// 1 / nu_par: the 1/2 point approaches p_c as n^-shift.
inline constexpr double kDirectedShiftExponent = 0.5768;

struct LatticeSpec {
  Graph graph = Graph::square;
  bool directed = false;
  Mode mode = Mode::site;
  int depth = 256;
  int width = 0;
  double p = 0.5;
  Source source = Source::boundary;
};

void validate(const LatticeSpec& spec);
std::string describe(const LatticeSpec& spec);

struct ClusterResult {
  bool crossed = false;
  // Vertices reachable from the source boundary through open sites/bonds.
  std::size_t cluster_size = 0;
  // Source-to-target vertex sequence when crossed.
  std::optional<std::vector<std::size_t>> path;
};

// Vertex/edge structure of a LatticeSpec, independent of p.
class LatticeGraph {
 public:
  explicit LatticeGraph(const LatticeSpec& spec);

  std::size_t vertex_count() const { return layer_count_ * width_; }
  std::size_t edge_count() const { return edge_from_.size(); }
  std::size_t layer_count() const { return layer_count_; }
  std::size_t width() const { return width_; }
  std::size_t layer_of(std::size_t v) const { return v / width_; }
  std::size_t index_in_layer(std::size_t v) const { return v % width_; }
  bool directed() const { return directed_; }
  Mode mode() const { return mode_; }
  Graph graph() const { return graph_; }
  // Layer-0 sites of the source.
  const std::vector<std::size_t>& sources() const { return sources_; }

  std::size_t edge_from(std::size_t e) const { return edge_from_[e]; }
  std::size_t edge_to(std::size_t e) const { return edge_to_[e]; }
  // Edges leaving (directed) or touching (undirected) v.
  const std::vector<std::size_t>& incident(std::size_t v) const { return incident_[v]; }

  // Number of uniforms a trial consumes: one per site or one per bond.
  std::size_t variable_count() const { return mode_ == Mode::site ? vertex_count() : edge_count(); }

  // Outcome at open probability p, variable i open iff u[i] < p.
  ClusterResult percolate(const std::vector<double>& u, double p) const;
  // Smallest p at which the configuration u crosses (inf if it never does).
  // crossed(u, p) == (critical_p(u) < p) for every p.
  double critical_p(const std::vector<double>& u) const;

 private:
  double critical_undirected(const std::vector<double>& u) const;
  double critical_directed(const std::vector<double>& u) const;

  Graph graph_;
  Mode mode_;
  bool directed_;
  std::size_t layer_count_ = 0;
  std::size_t width_ = 0;
  std::vector<std::size_t> sources_;
  std::vector<std::size_t> edge_from_;
  std::vector<std::size_t> edge_to_;
  std::vector<std::vector<std::size_t>> incident_;
};

std::vector<double> trial_uniforms(const LatticeGraph& g, std::uint64_t seed, std::uint64_t trial);

ClusterResult percolate_trial(const LatticeSpec& spec, std::uint64_t seed);

struct DepthPoint {
  int depth = 0;
  std::size_t width = 0;
  double estimate = 0.0;  // crossing frequency 1/2
  double half_width = 0.0;
};

struct ThresholdEstimate {
  LatticeSpec spec;
  double estimate = 0.0;
  double half_width = 0.0;
  std::size_t trials = 0;
  int depth = 0;
  int iterations = 0;
  bool converged = false;
  // Directed graphs with extrapolation: the 1/2 points at n/8, n/4, n/2, n,
  // fitted as p(n) = p_c + a n^-shift. `estimate` is then p_c and
  // `finite_depth` the raw value at n.
  std::vector<DepthPoint> series;
  double finite_depth = 0.0;
};

struct EstimateOptions {
  std::size_t trials = 2000;
  double tol = 1e-3;
  int max_iterations = 60;
  std::uint64_t seed = 1;
  unsigned threads = 0;  // 0: hardware concurrency
  bool extrapolate = true;  // directed graphs only
};

// Bisection on p for crossing frequency 1/2. Trials share their uniforms
// across bisection steps (common random numbers), so the frequency is
// monotone in p. The half-width combines the binomial standard error at the
// median, mapped through the local slope, with the final bracket. Directed
// graphs are extrapolated in depth unless opt.extrapolate is false; the
// half-width is then the standard error of the fitted intercept.
ThresholdEstimate estimate_threshold(LatticeSpec spec, const EstimateOptions& opt);
std::string to_json(const ThresholdEstimate& e);

// Open probability of one triangle in the flight-to-lattice construction:
// exp(-2 rho r^2 / sin(alpha)).
double triangle_open_probability(double density, double radius, double speed);

// Piecewise-linear trajectory for a directed hexagonal path. Each out-degree
// two edge becomes one interval of duration T = r / (nu sin(alpha/2)) with
// input +1 or -1; out-degree one edges join consecutive triangles and add no
// motion.
struct Trajectory {
  std::vector<geometry::Point> waypoints;
  std::vector<int> inputs;
  double interval = 0.0;
};

Trajectory lattice_path_to_trajectory(const LatticeSpec& spec, const std::vector<std::size_t>& path,
                                      double radius, double speed,
                                      geometry::Point origin = {0.0, 0.0});

}  // namespace forestflight::lattice
