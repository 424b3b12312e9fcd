#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "forestflight/forest.hpp"
#include "forestflight/geometry.hpp"

namespace forestflight::continuum {

using geometry::Point;

enum class Shape { disk, square, rectangle };

// Shapes centred on Poisson points inside `window`.
//   disk:      radius a; two disks touch when their centres are < 2a apart
//   square:    axis-aligned, side a
//   rectangle: axis-aligned, a longitudinal (x) by b lateral (y)
struct GilbertSpec {
  Shape shape = Shape::disk;
  double a = 1.0;
  double b = 1.0;
  double intensity = 0.0;
  forest::Window window;
};

void validate(const GilbertSpec& spec);

// Expected neighbour count: intensity times the area of the set of centre
// offsets at which two shapes overlap. For disks of radius a this is
// intensity * pi * (2a)^2, i.e. pi D^2 for the connection distance D = 2a;
// that is the convention under which the disk and square models have the
// critical values near 4.51 and 4.40.
double degree(const GilbertSpec& spec);
double intensity_for_degree(const GilbertSpec& spec, double degree);

// Half-extents of one shape (x, y).
Point half_extent(const GilbertSpec& spec);
bool shapes_overlap(const GilbertSpec& spec, Point p, Point q);

struct ComponentExtent {
  std::vector<std::size_t> members;
  double x_min = 0.0;
  double x_max = 0.0;
  double y_min = 0.0;
  double y_max = 0.0;
};

struct Occupied {
  std::vector<Point> centers;
  std::vector<std::size_t> component_of;
  std::vector<ComponentExtent> components;
};

std::vector<Point> sample_points(const GilbertSpec& spec, std::uint64_t seed);
Occupied occupied_components(const GilbertSpec& spec, const std::vector<Point>& centers);
Occupied occupied_components(const GilbertSpec& spec, std::uint64_t seed);

// Blocked iff an occupied component covers the full window height.
bool spans_height(const GilbertSpec& spec, const ComponentExtent& c);
bool vacant_crossing(const GilbertSpec& spec, const Occupied& occ);
bool vacant_crossing(const GilbertSpec& spec, std::uint64_t seed);

// Smallest degree at which one realization (thinned from a process of degree
// `max_degree`) contains a height-spanning component; infinity if none.
// Shapes have unit connection size (disk radius 1/2, unit square).
double critical_degree_trial(Shape shape, double window_multiple, double max_degree,
                             std::uint64_t seed, std::uint64_t trial);

struct DegreeEstimate {
  Shape shape = Shape::disk;
  double window_multiple = 0.0;
  double estimate = 0.0;
  double half_width = 0.0;
  std::size_t trials = 0;
  int iterations = 0;
  bool converged = false;
};

struct DegreeOptions {
  std::size_t trials = 1000;
  double tol = 1e-3;
  double max_degree = 9.0;
  int max_iterations = 60;
  std::uint64_t seed = 1;
  unsigned threads = 0;
};

// Bisection on degree for spanning frequency 1/2; trials are coupled across
// steps through thinning.
DegreeEstimate estimate_critical_degree(Shape shape, double window_multiple, const DegreeOptions& opt);
std::string to_json(const DegreeEstimate& e);

// Rectangles r / sin(alpha/2) long and r / cos(alpha/2) wide on the points of
// a Poisson process of intensity `density`; each fits inside its tree's left
// primary shadow. Returns the vacant crossing verdict.
GilbertSpec shadow_rectangle_spec(double density, double radius, double speed, forest::Window window);
bool shadow_rectangle_model(double density, double radius, double speed, forest::Window window,
                            std::uint64_t seed);

const char* shape_name(Shape s);
Shape parse_shape(const std::string& name);

}  // namespace forestflight::continuum
