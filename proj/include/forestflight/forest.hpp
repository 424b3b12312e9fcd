#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "forestflight/geometry.hpp"

namespace forestflight::forest {

using geometry::Point;

// Rectangle R(w, l): x in [0, length] (longitudinal), y in [0, width] (lateral).
struct Window {
  double width = 1.0;
  double length = 1.0;
};

enum class MixtureBranch { first, second };

// A realization of a constant-radius Poisson forest. Trees may overlap.
struct Forest {
  Window window;
  double tree_radius = 1.0;
  std::vector<Point> centers;
  double density = 0.0;
  std::uint64_t seed = 0;
  // Set by sample_mixed_forest: which intensity generated the centers.
  std::optional<MixtureBranch> branch;

  geometry::Disk tree(std::size_t i) const { return {centers[i], tree_radius}; }
  std::size_t size() const { return centers.size(); }
};

void validate(const Window& w);

// Count ~ Poisson(density * w * l), centers i.i.d. uniform. Bit-identical for
// identical (density, window, radius, seed).
Forest sample_poisson_forest(double density, Window window, double radius, std::uint64_t seed);

// Non-ergodic mixture: with probability q the whole realization uses
// density_first, otherwise density_second.
Forest sample_mixed_forest(double density_first, double density_second, double q, Window window,
                           double radius, std::uint64_t seed);

// (x, y) -> (sx * x, sy * y). The image of a Poisson process of rate rho is a
// Poisson process of rate rho / (sx * sy); the recorded density follows.
Forest scale_forest(const Forest& f, double sx, double sy);

// CSV: "# forest v1, w=<w>, l=<l>, r=<r>, rho=<rho>, seed=<seed>" then one
// "x,y" row per tree, 17 significant digits.
std::string to_csv(const Forest& f);
Forest from_csv(const std::string& text);
void save_forest(const Forest& f, const std::filesystem::path& path);
Forest load_forest(const std::filesystem::path& path);

}  // namespace forestflight::forest
