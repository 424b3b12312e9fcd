#pragma once

#include <optional>
#include <string>
#include <vector>

namespace forestflight::bounds {

// Threshold inputs for the closed-form speed bounds.
//
// p_hex_site is the directed hexagonal site threshold. It has no closed form;
// the default is the output of `lattice estimate --graph hexagonal --mode site
// --directed` (seed 1, 2000 trials). The brick wall alternates out-degree one
// and two, so pairs of sites act in series and the value is close to the
// square root of the directed square site threshold. For reference,
// undirected hexagonal lattices have bond threshold at most (1 + sqrt(33))/8
// and site threshold at most sqrt(3)/2.
// d_crit_square is the critical degree of the Gilbert unit-square model.
struct BoundConfig {
  double p_hex_site = 0.8400;
  double d_crit_square = 4.395;
};

// Throws ValidationError unless p_hex_site in (0, 1), d_crit_square > 0 and
// log(1/sqrt(p_hex_site)) < d_crit_square / 2, which keeps the two regimes
// disjoint.
void validate(const BoundConfig& cfg);

// rho r^2 / sin(alpha) with sin(alpha) = 2 nu / (1 + nu^2).
double load(double density, double radius, double speed);

// Guaranteed feasible: load < log(1/sqrt(p_hex_site)).
bool sub_critical_condition(double density, double radius, double speed, const BoundConfig& cfg);
// Guaranteed infeasible: load > d_crit_square / 2.
bool super_critical_condition(double density, double radius, double speed, const BoundConfig& cfg);

struct SpeedBounds {
  // Largest speed satisfying the feasibility condition; absent when no speed
  // does.
  std::optional<double> nu_lower;
  // Speed beyond which flight is impossible; 0 when impossible at every speed.
  double nu_upper = 0.0;
};

// Both bounds solve sin(alpha) = C for the larger root (1 + sqrt(1 - C^2))/C.
// The smaller root also satisfies the equation; below it the lattice
// construction degenerates (slow flight shrinks its triangles) and it is not a
// statement about feasibility, so it is not reported.
SpeedBounds speed_bounds(double density, double radius, const BoundConfig& cfg);

struct BoundRow {
  double density = 0.0;
  std::optional<double> nu_lower;
  double nu_upper = 0.0;
};

// `samples` log-spaced densities in [rho_min, rho_max].
std::vector<BoundRow> phase_boundary_table(double rho_min, double rho_max, double radius,
                                           const BoundConfig& cfg, int samples);

// "rho,nu_lower,nu_upper" with an empty field where nu_lower is undefined.
std::string to_csv(const std::vector<BoundRow>& rows);

enum class Regime { sub_critical, super_critical, neither };
Regime classify(double density, double radius, double speed, const BoundConfig& cfg);
const char* regime_name(Regime r);

}  // namespace forestflight::bounds
