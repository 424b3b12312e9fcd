#pragma once

#include <cstddef>
#include <cstdint>

#include "forestflight/forest.hpp"
#include "forestflight/shadow.hpp"

// Cross-checks between the shadow construction and the sweep oracle.
namespace forestflight::validation {

// Exactly `trees` uniform centres in a width x length window.
forest::Forest fixed_count_forest(std::size_t trees, forest::Window window, double radius,
                                  std::uint64_t seed);

// True when some point within distance d of p is classified differently.
bool near_boundary(const shadow::ShadowSet& s, geometry::Point p, double d);

struct InstanceComparison {
  std::size_t points = 0;
  std::size_t agree = 0;
  std::size_t disagree = 0;
  // Disagreements farther than `band` from every region boundary.
  std::size_t disagree_far = 0;
  bool shadow_crossing = true;
  bool oracle_crossing = true;
  double max_width = 0.0;
};

// Classifies `points` uniform query points in the window with both methods.
// Shadows and the oracle sweep are both clipped one primary length left of
// the window.
InstanceComparison compare_instance(const forest::Forest& f, double speed, std::size_t points, double dx,
                                    double band, std::uint64_t seed);

}  // namespace forestflight::validation
