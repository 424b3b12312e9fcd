#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "forestflight/bounds.hpp"
#include "forestflight/forest.hpp"

namespace forestflight::experiment {

inline constexpr int kConfigVersion = 1;

struct ExperimentConfig {
  double width = 200.0;
  double expected_trees = 8000.0;
  std::size_t trials = 50;
  double radius = 1.0;
  std::vector<double> densities{0.003, 0.005, 0.007, 0.01, 0.013, 0.017};
  std::vector<double> speeds{10, 15, 20, 25, 30, 35, 40, 45, 50, 60, 70, 85, 100, 120, 140, 170, 200};
  std::uint64_t seed = 1;
  bounds::BoundConfig bounds;
};

// Desk scale: w = 200, 8,000 expected trees, 50 trials per point.
ExperimentConfig desk_preset();
// Full scale: w = 500, 50,000 expected trees, 200 trials per point.
ExperimentConfig paper_preset();

void validate(const ExperimentConfig& cfg);

// Versioned JSON; see docs/config.md.
std::string to_json(const ExperimentConfig& cfg);
ExperimentConfig config_from_json(const std::string& text);
ExperimentConfig load_config(const std::filesystem::path& path);
// Stable hash of everything that affects results.
std::uint64_t config_hash(const ExperimentConfig& cfg);

// Window length for density rho: expected_trees / (rho * w).
double window_length(const ExperimentConfig& cfg, double density);
forest::Window window_for(const ExperimentConfig& cfg, double density);
// Forest for (density, trial). Independent of speed, so every speed sees the
// same realizations.
forest::Forest trial_forest(const ExperimentConfig& cfg, double density, std::size_t trial);
// Normalized maximum width of one trial.
double trial_width(const ExperimentConfig& cfg, double density, double speed, std::size_t trial);

struct Summary {
  double mean = 0.0;
  double p10 = 0.0;
  double p90 = 0.0;
  double stddev = 0.0;
};

// Linear-interpolation percentile on sorted data (q in [0, 1]).
double percentile(std::vector<double> values, double q);
Summary summarize(const std::vector<double>& samples);

struct PhasePoint {
  double density = 0.0;
  double speed = 0.0;
  std::size_t trials = 0;
  std::vector<double> samples;
  double mean = 0.0;
  double p10 = 0.0;
  double p90 = 0.0;

  double standard_error() const;
};

PhasePoint run_phase_point(const ExperimentConfig& cfg, double density, double speed,
                           unsigned threads = 0);

struct RunOptions {
  unsigned threads = 0;
  // Per-point checkpoint files; empty disables checkpointing.
  std::filesystem::path checkpoint_dir;
  // Stop after this many newly computed points (for testing resume).
  std::optional<std::size_t> max_new_points;
};

// Points in density-major order.
struct PhaseTable {
  std::vector<double> densities;
  std::vector<double> speeds;
  std::vector<PhasePoint> points;

  const PhasePoint& at(std::size_t density_index, std::size_t speed_index) const {
    return points[density_index * speeds.size() + speed_index];
  }
  bool complete() const { return points.size() == densities.size() * speeds.size(); }
};

PhaseTable run_phase_diagram(const ExperimentConfig& cfg, const RunOptions& opt = {});

// "rho,nu,trials,mean,p10,p90".
std::string to_csv(const PhaseTable& t);
PhaseTable table_from_csv(const std::string& text);
// One file per point holding a "sample" column.
void write_samples(const PhaseTable& t, const std::filesystem::path& dir);

// Speed at which the mean width first reaches `level` along the speed grid of
// one density row, by linear interpolation between neighbouring grid speeds.
std::optional<double> crossing_speed(const PhaseTable& t, std::size_t density_index, double level);

struct TrendTest {
  double s = 0.0;
  double z = 0.0;
  double p_value = 1.0;
};

// Mann-Kendall test for monotone trend (two-sided normal approximation with
// tie correction).
TrendTest mann_kendall(const std::vector<double>& series);

std::string format_number(double v);
void write_text(const std::filesystem::path& path, const std::string& text);
std::string read_text(const std::filesystem::path& path);

}  // namespace forestflight::experiment
