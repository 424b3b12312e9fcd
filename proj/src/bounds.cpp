#include "forestflight/bounds.hpp"

#include <cmath>
#include <cstdio>
#include <limits>

#include "forestflight/error.hpp"

namespace forestflight::bounds {
namespace {

void check_inputs(double density, double radius) {
  if (!(density >= 0.0) || !std::isfinite(density)) throw ValidationError("density must be >= 0");
  if (!(radius > 0.0) || !std::isfinite(radius)) throw ValidationError("radius must be positive");
}

double feasibility_level(const BoundConfig& cfg) { return std::log(1.0 / std::sqrt(cfg.p_hex_site)); }

double upper_root(double c) { return (1.0 + std::sqrt(1.0 - c * c)) / c; }

}  // namespace

void validate(const BoundConfig& cfg) {
  if (!(cfg.p_hex_site > 0.0 && cfg.p_hex_site < 1.0)) {
    throw ValidationError("p_hex_site must lie in (0, 1)");
  }
  if (!(cfg.d_crit_square > 0.0) || !std::isfinite(cfg.d_crit_square)) {
    throw ValidationError("d_crit_square must be positive");
  }
  if (!(feasibility_level(cfg) < cfg.d_crit_square / 2.0)) {
    throw ValidationError("bound config needs log(1/sqrt(p_hex_site)) < d_crit_square / 2");
  }
}

double load(double density, double radius, double speed) {
  check_inputs(density, radius);
  if (!(speed > 0.0) || !std::isfinite(speed)) throw ValidationError("speed must be positive");
  return density * radius * radius * (1.0 + speed * speed) / (2.0 * speed);
}

bool sub_critical_condition(double density, double radius, double speed, const BoundConfig& cfg) {
  validate(cfg);
  return load(density, radius, speed) < feasibility_level(cfg);
}

bool super_critical_condition(double density, double radius, double speed, const BoundConfig& cfg) {
  validate(cfg);
  return load(density, radius, speed) > cfg.d_crit_square / 2.0;
}

SpeedBounds speed_bounds(double density, double radius, const BoundConfig& cfg) {
  validate(cfg);
  check_inputs(density, radius);
  SpeedBounds b;
  const double m = density * radius * radius;
  if (m == 0.0) {
    b.nu_lower = std::numeric_limits<double>::infinity();
    b.nu_upper = std::numeric_limits<double>::infinity();
    return b;
  }
  const double c = m / feasibility_level(cfg);
  if (c < 1.0) b.nu_lower = upper_root(c);
  const double c2 = 2.0 * m / cfg.d_crit_square;
  b.nu_upper = c2 < 1.0 ? upper_root(c2) : 0.0;
  return b;
}

std::vector<BoundRow> phase_boundary_table(double rho_min, double rho_max, double radius,
                                           const BoundConfig& cfg, int samples) {
  if (!(rho_min > 0.0) || !(rho_max >= rho_min)) throw ValidationError("density range must be positive");
  if (samples < 1) throw ValidationError("samples must be >= 1");
  std::vector<BoundRow> rows;
  const double l0 = std::log(rho_min);
  const double l1 = std::log(rho_max);
  for (int i = 0; i < samples; ++i) {
    const double t = samples == 1 ? 0.0 : static_cast<double>(i) / (samples - 1);
    const double rho = std::exp(l0 + t * (l1 - l0));
    const auto b = speed_bounds(rho, radius, cfg);
    rows.push_back({rho, b.nu_lower, b.nu_upper});
  }
  return rows;
}

std::string to_csv(const std::vector<BoundRow>& rows) {
  std::string out = "rho,nu_lower,nu_upper\n";
  char buf[96];
  for (const auto& r : rows) {
    std::snprintf(buf, sizeof buf, "%.10g,", r.density);
    out += buf;
    if (r.nu_lower) {
      std::snprintf(buf, sizeof buf, "%.10g", *r.nu_lower);
      out += buf;
    }
    std::snprintf(buf, sizeof buf, ",%.10g\n", r.nu_upper);
    out += buf;
  }
  return out;
}

Regime classify(double density, double radius, double speed, const BoundConfig& cfg) {
  if (sub_critical_condition(density, radius, speed, cfg)) return Regime::sub_critical;
  if (super_critical_condition(density, radius, speed, cfg)) return Regime::super_critical;
  return Regime::neither;
}

const char* regime_name(Regime r) {
  switch (r) {
    case Regime::sub_critical:
      return "sub-critical (collision-free flight guaranteed)";
    case Regime::super_critical:
      return "super-critical (no collision-free flight)";
    case Regime::neither:
      return "neither condition holds";
  }
  return "?";
}

}  // namespace forestflight::bounds
