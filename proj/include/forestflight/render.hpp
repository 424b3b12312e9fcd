#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "forestflight/bounds.hpp"
#include "forestflight/experiment.hpp"
#include "forestflight/forest.hpp"
#include "forestflight/shadow.hpp"

namespace forestflight::render {

// Trees dark, shadow regions light grey, vacant region white. User units are
// meters with y pointing up; disks are 64-gons. Output is a pure function of
// the inputs.
std::string shadow_svg(const forest::Forest& f, const shadow::ShadowSet& s);
void render_shadow_svg(const forest::Forest& f, double speed, const std::filesystem::path& out);

inline constexpr int kContourLevels = 9;  // 0.1, 0.2, ..., 0.9

// Log-log heatmap of the mean normalized width, bilinearly interpolated
// between grid points (no extrapolation past the grid), with contour lines
// and the two speed-bound curves.
std::string phase_svg(const experiment::PhaseTable& t, const std::vector<bounds::BoundRow>& bound_rows);
void render_phase_svg(const experiment::PhaseTable& t, const std::vector<bounds::BoundRow>& bound_rows,
                      const std::filesystem::path& out);

}  // namespace forestflight::render
