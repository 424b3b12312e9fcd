#pragma once

#include <cstddef>
#include <array>
#include <cstdint>
#include <limits>
#include <optional>
#include <unordered_map>
#include <utility>
#include <vector>

#include "forestflight/forest.hpp"
#include "forestflight/geometry.hpp"

namespace forestflight::shadow {

using geometry::ConeParams;
using geometry::Disk;
using geometry::Point;
using geometry::SlopedSegment;

inline constexpr std::size_t kNoTree = std::numeric_limits<std::size_t>::max();

enum class ShadowKind { left_primary, right_primary, induced };

// Upper boundary of a left-type shadow cluster as seen from the right: the
// slope +1/nu line from `apex` up to the tangency on `tree`, then the upper
// semicircle of `tree` to its rightmost point. Bottom outlines mirror this in
// y. Every left shadow (primary or induced) has exactly one top and one
// bottom outline, because induced shadows inherit their bounding lines from
// their parents.
struct Outline {
  Point apex;
  Disk tree;
  int side = 1;  // +1 top outline, -1 bottom outline

  double tangency_x(const ConeParams& cone) const;
  double end_x() const { return tree.center.x + tree.radius; }
  double operator()(double x, const ConeParams& cone) const;
};

// A doomed-state region. Geometry is stored in the left-shadow frame; right
// primary shadows set `mirrored` and are evaluated through x -> -x.
struct Shadow {
  ShadowKind kind = ShadowKind::left_primary;
  Point apex;
  SlopedSegment top;
  SlopedSegment bottom;

  // Primary: generating tree. Induced: indices (upper, lower) of the parents
  // inside the owning ShadowSet, when built there.
  std::optional<std::size_t> tree;
  std::optional<std::pair<std::size_t, std::size_t>> parents;

  // Left-frame description.
  Outline top_outline;
  Outline bottom_outline;
  // Induced only: the pocket is bounded above by the upper parent's bottom
  // outline and below by the lower parent's top outline, closing at
  // closure_x.
  Outline pocket_upper;
  Outline pocket_lower;
  Point crossing;  // crossing of the upper parent's bottom line and the lower parent's top line
  double closure_x = 0.0;

  // Tree ids of (top line, pocket upper, pocket lower, bottom line); equal
  // keys describe identical regions.
  std::array<std::size_t, 4> key{kNoTree, kNoTree, kNoTree, kNoTree};
  bool mirrored = false;
  bool clipped = false;

  // Closed-region membership, tolerance kEps.
  bool contains(Point p, const ConeParams& cone) const;
};

Shadow left_primary_shadow(const Disk& tree, const ConeParams& cone, std::size_t tree_id = kNoTree);
Shadow right_primary_shadow(const Disk& tree, const ConeParams& cone, std::size_t tree_id = kNoTree);

// Induced shadows of two left-type (or two right-type) shadows: one per role
// assignment whose facing outlines (upper's bottom, lower's top) open a pocket
// right of both apexes and meet again. Symmetric in (a, b); at most two.
std::vector<Shadow> induced_shadows(const Shadow& a, const Shadow& b, const ConeParams& cone);
// Only the assignment with `up` as the upper parent.
std::optional<Shadow> induced_shadow_ordered(const Shadow& up, const Shadow& low, const ConeParams& cone);
// The first of induced_shadows (higher apex as the upper parent), if any.
std::optional<Shadow> induced_shadow(const Shadow& a, const Shadow& b, const ConeParams& cone);

struct Component {
  std::vector<std::size_t> members;
  double y_min = 0.0;
  double y_max = 0.0;
  double x_min = 0.0;
  double x_max = 0.0;

  double lateral_extent() const { return y_max - y_min; }
  double longitudinal_extent() const { return x_max - x_min; }
};

// What build_shadow_set stores.
enum class Regions { all, components };

struct BuildStats {
  std::size_t primaries = 0;
  std::size_t induced = 0;
  std::size_t duplicate_keys = 0;
  // Shadows that spawn children (one per apex class).
  std::size_t representatives = 0;
  std::size_t pair_tests = 0;
  // Induced shadows whose lateral extent escapes their parents' union.
  std::size_t extent_escapes = 0;
};

// Fixpoint of pairwise induced-shadow construction over all left primary
// shadows of a forest, with connected components of the union of regions.
class ShadowSet {
 public:
  ShadowSet() = default;

  const ConeParams& cone() const { return cone_; }
  double clip_x() const { return clip_x_; }
  const std::vector<Shadow>& shadows() const { return shadows_; }
  const std::vector<Component>& components() const { return components_; }
  std::size_t component_of(std::size_t shadow) const { return component_of_[shadow]; }
  const BuildStats& stats() const { return stats_; }

  bool is_doomed(Point p) const;
  // Batch variant; primary regions go through the vectorized kernels.
  std::vector<std::uint8_t> classify(const std::vector<Point>& points) const;

  friend ShadowSet build_shadow_set(const forest::Forest& f, double speed, double clip_x, Regions regions);

 private:
  std::vector<std::size_t> candidates_near(Point p) const;

  ConeParams cone_{};
  double clip_x_ = -std::numeric_limits<double>::infinity();
  std::vector<Shadow> shadows_;
  std::vector<std::size_t> component_of_;
  std::vector<Component> components_;
  BuildStats stats_;
  // Uniform grid over shadow bounding boxes, for point queries.
  double cell_w_ = 1.0;
  double cell_h_ = 1.0;
  std::unordered_map<std::uint64_t, std::vector<std::size_t>> grid_;
};

// Induced shadows can grow combinatorially in dense forests at high speed; the
// builder gives up with a ValidationError past this many. sweep_components
// has no such limit.
inline constexpr std::size_t kMaxShadows = 1'000'000;

// clip_x: regions are restricted to x >= clip_x, and shadows whose apex lies
// left of clip_x spawn no induced children. Regions::components keeps one
// shadow per apex class, which leaves components and their extents unchanged
// but drops pocket variants needed for point queries.
ShadowSet build_shadow_set(const forest::Forest& f, double speed,
                           double clip_x = -std::numeric_limits<double>::infinity(),
                           Regions regions = Regions::all);

const std::vector<Component>& occupied_components(const ShadowSet& s);

// Occupied components as sets of trees, found by an exact sweep of vertical
// sections of the occupied region: moving left, each section interval erodes
// by dx/nu per side and absorbs the chords of the trees present. Near-linear
// in the number of trees, unlike the pairwise fixpoint, and the partition of
// trees and the lateral extents agree with build_shadow_set. Members are tree
// ids; component_of is kNoTree for trees entirely left of clip_x.
struct TreeComponents {
  std::vector<std::size_t> component_of;
  std::vector<Component> components;
};
TreeComponents sweep_components(const forest::Forest& f, double speed,
                                double clip_x = -std::numeric_limits<double>::infinity());
double max_normalized_width(const TreeComponents& c, double window_width);
double max_normalized_width(const ShadowSet& s, double window_width);
bool crossing_exists(const forest::Forest& f, double speed);

// Lateral range [lo, hi] of a shadow region restricted to x >= clip_x; empty
// (lo > hi) when nothing remains.
std::pair<double, double> lateral_range(const Shadow& s, const ConeParams& cone, double clip_x);

// Region in the left frame: lo(x) <= y <= hi(x) for x in [apex.x, frame_x_end].
double frame_x_end(const Shadow& s);
double frame_hi(const Shadow& s, double x, const ConeParams& cone);
double frame_lo(const Shadow& s, double x, const ConeParams& cone);

// Closed-region intersection test (tolerance kEps) for two shadows of the same
// handedness, restricted to frame x >= clip_x.
bool regions_intersect(const Shadow& a, const Shadow& b, const ConeParams& cone,
                       double clip_x = -std::numeric_limits<double>::infinity());

// Boundary polygon in world coordinates, counter-clockwise, restricted to
// x >= clip_x. Arcs are sampled at `arc_segments` per half circle.
std::vector<Point> region_polygon(const Shadow& s, const ConeParams& cone, double clip_x,
                                  int arc_segments = 32);

}  // namespace forestflight::shadow
