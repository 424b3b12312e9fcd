#include <cmath>
#include <filesystem>
#include <vector>

#include "doctest.h"
#include "forestflight/error.hpp"
#include "forestflight/experiment.hpp"

using namespace forestflight;
using namespace forestflight::experiment;

namespace {

ExperimentConfig tiny() {
  ExperimentConfig c;
  c.width = 40.0;
  c.expected_trees = 300.0;
  c.trials = 6;
  c.densities = {0.005, 0.02};
  c.speeds = {2, 10, 40};
  c.seed = 17;
  return c;
}

std::filesystem::path scratch(const char* name) {
  const auto p = std::filesystem::temp_directory_path() / name;
  std::filesystem::remove_all(p);
  return p;
}

PhaseTable hand_table(std::vector<double> means) {
  PhaseTable t;
  t.densities = {0.01};
  for (std::size_t i = 0; i < means.size(); ++i) {
    t.speeds.push_back(10.0 * (i + 1));
    PhasePoint p;
    p.density = 0.01;
    p.speed = t.speeds.back();
    p.mean = means[i];
    t.points.push_back(p);
  }
  return t;
}

}  // namespace

TEST_SUITE("experiment") {

TEST_CASE("presets") {
  const auto d = desk_preset();
  CHECK(d.width == 200.0);
  CHECK(d.expected_trees == 8000.0);
  CHECK(d.trials == 50);
  const auto p = paper_preset();
  CHECK(p.width == 500.0);
  CHECK(p.expected_trees == 50000.0);
  CHECK(p.trials == 200);
  for (double rho : {0.003, 0.01, 0.017}) {
    CHECK(std::find(d.densities.begin(), d.densities.end(), rho) != d.densities.end());
  }
  CHECK(window_length(p, 0.003) == doctest::Approx(33333.333).epsilon(1e-6));
  CHECK(window_length(p, 0.01) == doctest::Approx(10000.0));
}

TEST_CASE("config json round trip and hashing") {
  const auto c = tiny();
  const auto back = config_from_json(to_json(c));
  CHECK(to_json(back) == to_json(c));
  CHECK(config_hash(back) == config_hash(c));
  auto other = c;
  other.seed = 18;
  CHECK(config_hash(other) != config_hash(c));
  other = c;
  other.bounds.p_hex_site = 0.8;
  CHECK(config_hash(other) != config_hash(c));

  CHECK_THROWS_AS(config_from_json("{"), ValidationError);
  CHECK_THROWS_AS(config_from_json(R"({"version": 99})"), ValidationError);
  CHECK_THROWS_AS(config_from_json(R"({"version": 1, "bogus": 1})"), ValidationError);
  CHECK_THROWS_AS(config_from_json(R"({"version": 1, "speeds": []})"), ValidationError);
  CHECK_THROWS_AS(config_from_json(R"({"version": 1, "densities": [-0.1]})"), ValidationError);
  const auto full = config_from_json(R"({"version": 1, "preset": "paper", "trials": 3})");
  CHECK(full.width == 500.0);
  CHECK(full.trials == 3);
  CHECK_THROWS_AS(load_config("/nonexistent/forestflight.json"), IoError);
}

TEST_CASE("empty grid is rejected") {
  auto c = tiny();
  c.densities.clear();
  CHECK_THROWS_AS(validate(c), ValidationError);
  CHECK_THROWS_AS(run_phase_diagram(c), ValidationError);
}

TEST_CASE("trial forests are shared across speeds") {
  const auto c = tiny();
  const auto a = trial_forest(c, 0.02, 3);
  const auto b = trial_forest(c, 0.02, 3);
  CHECK(a.centers == b.centers);
  CHECK(a.window.length == doctest::Approx(window_length(c, 0.02)));
  CHECK(trial_forest(c, 0.02, 4).centers != a.centers);
  // Same realization, so widths are monotone over speeds.
  double prev = 0.0;
  for (double nu : {1.0, 5.0, 20.0, 80.0}) {
    const double w = trial_width(c, 0.02, nu, 3);
    CHECK(w >= prev);
    prev = w;
  }
}

TEST_CASE("slow flight stays near the single-shadow floor") {
  ExperimentConfig c;
  c.width = 500.0;
  c.expected_trees = 2000.0;
  const double w = trial_width(c, 0.01, 0.1, 0);
  CHECK(w < 0.05);
  CHECK(w >= 2.0 / 500.0 - 1e-12);
}

TEST_CASE("statistics") {
  CHECK(percentile({1, 2, 3, 4, 5}, 0.0) == 1.0);
  CHECK(percentile({1, 2, 3, 4, 5}, 1.0) == 5.0);
  CHECK(percentile({5, 1, 3}, 0.5) == 3.0);
  CHECK(percentile({0, 10}, 0.1) == doctest::Approx(1.0));
  const auto s = summarize({1, 2, 3, 4});
  CHECK(s.mean == 2.5);
  CHECK(s.p10 <= s.mean);
  CHECK(s.p90 >= s.mean);
  CHECK(s.stddev == doctest::Approx(std::sqrt(5.0 / 3.0)));
}

TEST_CASE("phase point invariants and thread independence") {
  const auto c = tiny();
  const auto a = run_phase_point(c, 0.02, 10, 1);
  const auto b = run_phase_point(c, 0.02, 10, 4);
  CHECK(a.samples == b.samples);
  CHECK(a.samples.size() == c.trials);
  for (double x : a.samples) CHECK(x >= 0.0);
  CHECK(a.p10 <= a.p90);
  CHECK(a.mean == b.mean);
  CHECK(a.standard_error() >= 0.0);
}

TEST_CASE("tables, csv and checkpoints") {
  const auto c = tiny();
  RunOptions one;
  one.threads = 1;
  const auto full = run_phase_diagram(c, one);
  CHECK(full.complete());
  RunOptions many;
  many.threads = 8;
  CHECK(to_csv(run_phase_diagram(c, many)) == to_csv(full));

  const std::string csv = to_csv(full);
  CHECK(csv.rfind("rho,nu,trials,mean,p10,p90\n", 0) == 0);
  const auto back = table_from_csv(csv);
  CHECK(to_csv(back) == csv);

  const auto dir = scratch("forestflight_ckpt_test");
  RunOptions partial;
  partial.checkpoint_dir = dir;
  partial.max_new_points = 2;
  const auto first = run_phase_diagram(c, partial);
  CHECK_FALSE(first.complete());
  partial.max_new_points.reset();
  const auto resumed = run_phase_diagram(c, partial);
  CHECK(to_csv(resumed) == csv);
  // A different configuration refuses to reuse the directory.
  auto other = c;
  other.seed = 99;
  CHECK_THROWS_AS(run_phase_diagram(other, partial), ValidationError);
  std::filesystem::remove_all(dir);

  const auto sdir = scratch("forestflight_samples_test");
  write_samples(full, sdir);
  std::size_t files = 0;
  for (const auto& e : std::filesystem::directory_iterator(sdir)) files += e.is_regular_file();
  CHECK(files == full.points.size());
  std::filesystem::remove_all(sdir);
}

TEST_CASE("crossing speed interpolation") {
  const auto t = hand_table({0.1, 0.3, 0.7, 1.0});
  const auto x = crossing_speed(t, 0, 0.5);
  REQUIRE(x);
  CHECK(*x == doctest::Approx(25.0));
  CHECK_FALSE(crossing_speed(t, 0, 1.5));
  CHECK_FALSE(crossing_speed(t, 0, 0.05));
}

TEST_CASE("trend test") {
  const auto up = mann_kendall({1, 2, 3, 4, 5, 6, 7, 8, 9, 10});
  CHECK(up.s == 45.0);
  CHECK(up.p_value < 0.01);
  const auto flat = mann_kendall({2, 2, 2, 2, 2, 2});
  CHECK(flat.s == 0.0);
  CHECK(flat.p_value == doctest::Approx(1.0));
  const auto down = mann_kendall({9, 7, 8, 5, 4, 3, 1});
  CHECK(down.z < 0.0);
}

TEST_CASE("file helpers") {
  const auto dir = scratch("forestflight_io_test");
  std::filesystem::create_directories(dir);
  write_text(dir / "a.txt", "hello\n");
  CHECK(read_text(dir / "a.txt") == "hello\n");
  CHECK_THROWS_AS(read_text(dir / "missing.txt"), IoError);
  std::filesystem::remove_all(dir);
  CHECK(format_number(0.5) == "0.5");
}

}
