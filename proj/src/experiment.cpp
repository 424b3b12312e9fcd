#include "forestflight/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "json.hpp"

#include "forestflight/error.hpp"
#include "forestflight/geometry.hpp"
#include "forestflight/parallel.hpp"
#include "forestflight/rng.hpp"
#include "forestflight/shadow.hpp"

namespace forestflight::experiment {
namespace {

using nlohmann::json;

json config_json(const ExperimentConfig& cfg) {
  json j;
  j["version"] = kConfigVersion;
  j["width"] = cfg.width;
  j["expected_trees"] = cfg.expected_trees;
  j["trials"] = cfg.trials;
  j["radius"] = cfg.radius;
  j["densities"] = cfg.densities;
  j["speeds"] = cfg.speeds;
  j["seed"] = cfg.seed;
  j["bounds"] = {{"p_hex_site", cfg.bounds.p_hex_site}, {"d_crit_square", cfg.bounds.d_crit_square}};
  return j;
}

template <class T>
T field(const json& j, const char* key, T fallback) {
  const auto it = j.find(key);
  if (it == j.end()) return fallback;
  try {
    return it->get<T>();
  } catch (const json::exception&) {
    throw ValidationError(std::string("config field '") + key + "' has the wrong type");
  }
}

std::string checkpoint_name(std::size_t di, std::size_t si) {
  return "point_" + std::to_string(di) + "_" + std::to_string(si) + ".json";
}

std::string hex64(std::uint64_t v) {
  char buf[24];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

std::optional<PhasePoint> read_checkpoint(const std::filesystem::path& path, std::uint64_t hash,
                                          double density, double speed, std::size_t trials) {
  if (!std::filesystem::exists(path)) return std::nullopt;
  json j;
  try {
    j = json::parse(read_text(path));
  } catch (const json::exception& e) {
    throw ValidationError("checkpoint " + path.string() + " is not valid JSON: " + e.what());
  }
  if (j.value("config_hash", std::string()) != hex64(hash)) {
    throw ValidationError("checkpoint " + path.string() +
                          " was written for a different configuration; remove it or use another directory");
  }
  PhasePoint p;
  p.density = j.at("density").get<double>();
  p.speed = j.at("speed").get<double>();
  p.samples = j.at("samples").get<std::vector<double>>();
  if (p.density != density || p.speed != speed || p.samples.size() != trials) {
    throw ValidationError("checkpoint " + path.string() + " does not match its grid point");
  }
  p.trials = trials;
  const Summary s = summarize(p.samples);
  p.mean = s.mean;
  p.p10 = s.p10;
  p.p90 = s.p90;
  return p;
}

void write_checkpoint(const std::filesystem::path& path, std::uint64_t hash, const PhasePoint& p) {
  json j;
  j["version"] = kConfigVersion;
  j["config_hash"] = hex64(hash);
  j["density"] = p.density;
  j["speed"] = p.speed;
  j["samples"] = p.samples;
  // Write then rename so an interrupted run never leaves a truncated file.
  const auto tmp = path.string() + ".tmp";
  write_text(tmp, j.dump());
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) throw IoError("cannot rename " + tmp + ": " + ec.message());
}

PhasePoint make_point(double density, double speed, std::vector<double> samples) {
  PhasePoint p;
  p.density = density;
  p.speed = speed;
  p.trials = samples.size();
  p.samples = std::move(samples);
  const Summary s = summarize(p.samples);
  p.mean = s.mean;
  p.p10 = s.p10;
  p.p90 = s.p90;
  return p;
}

}  // namespace

ExperimentConfig desk_preset() { return ExperimentConfig{}; }

ExperimentConfig paper_preset() {
  ExperimentConfig cfg;
  cfg.width = 500.0;
  cfg.expected_trees = 50000.0;
  cfg.trials = 200;
  return cfg;
}

void validate(const ExperimentConfig& cfg) {
  auto positive = [](double v) { return v > 0.0 && std::isfinite(v); };
  if (!positive(cfg.width)) throw ValidationError("width must be positive");
  if (!positive(cfg.expected_trees)) throw ValidationError("expected_trees must be positive");
  if (cfg.trials == 0) throw ValidationError("trials must be positive");
  if (!positive(cfg.radius)) throw ValidationError("radius must be positive");
  if (cfg.densities.empty()) throw ValidationError("density grid is empty");
  if (cfg.speeds.empty()) throw ValidationError("speed grid is empty");
  for (double d : cfg.densities) {
    if (!positive(d)) throw ValidationError("densities must be positive");
  }
  for (double v : cfg.speeds) {
    if (!positive(v)) throw ValidationError("speeds must be positive");
  }
  bounds::validate(cfg.bounds);
}

std::string to_json(const ExperimentConfig& cfg) { return config_json(cfg).dump(2) + "\n"; }

ExperimentConfig config_from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw ValidationError(std::string("config is not valid JSON: ") + e.what());
  }
  if (!j.is_object()) throw ValidationError("config must be a JSON object");
  const int version = field<int>(j, "version", -1);
  if (version != kConfigVersion) {
    throw ValidationError("unsupported config version " + std::to_string(version) + " (expected " +
                          std::to_string(kConfigVersion) + ")");
  }
  ExperimentConfig cfg;
  const std::string preset = field<std::string>(j, "preset", "desk");
  if (preset == "paper") {
    cfg = paper_preset();
  } else if (preset != "desk") {
    throw ValidationError("unknown preset '" + preset + "'");
  }
  static const char* known[] = {"version", "preset",  "width", "expected_trees", "trials", "radius",
                                "densities", "speeds", "seed", "bounds"};
  for (const auto& [key, value] : j.items()) {
    if (std::find(std::begin(known), std::end(known), key) == std::end(known)) {
      throw ValidationError("unknown config field '" + key + "'");
    }
  }
  cfg.width = field(j, "width", cfg.width);
  cfg.expected_trees = field(j, "expected_trees", cfg.expected_trees);
  cfg.trials = field(j, "trials", cfg.trials);
  cfg.radius = field(j, "radius", cfg.radius);
  cfg.densities = field(j, "densities", cfg.densities);
  cfg.speeds = field(j, "speeds", cfg.speeds);
  cfg.seed = field(j, "seed", cfg.seed);
  if (const auto it = j.find("bounds"); it != j.end()) {
    cfg.bounds.p_hex_site = field(*it, "p_hex_site", cfg.bounds.p_hex_site);
    cfg.bounds.d_crit_square = field(*it, "d_crit_square", cfg.bounds.d_crit_square);
  }
  validate(cfg);
  return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& path) { return config_from_json(read_text(path)); }

std::uint64_t config_hash(const ExperimentConfig& cfg) {
  const std::string s = config_json(cfg).dump();
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

double window_length(const ExperimentConfig& cfg, double density) {
  return cfg.expected_trees / (density * cfg.width);
}

forest::Window window_for(const ExperimentConfig& cfg, double density) {
  return {cfg.width, window_length(cfg, density)};
}

forest::Forest trial_forest(const ExperimentConfig& cfg, double density, std::size_t trial) {
  rng::Stream s(cfg.seed, "phase.forest:" + format_number(density), trial);
  return forest::sample_poisson_forest(density, window_for(cfg, density), cfg.radius, s.next_u64());
}

double trial_width(const ExperimentConfig& cfg, double density, double speed, std::size_t trial) {
  const auto f = trial_forest(cfg, density, trial);
  const auto cone = geometry::cone_params(speed);
  // Shadows starting more than one primary length left of the window cannot
  // reach it.
  const double clip = -cfg.radius / cone.sin_half;
  // The section sweep yields the same components as the fixpoint in
  // near-linear time.
  return shadow::max_normalized_width(shadow::sweep_components(f, speed, clip), cfg.width);
}

double percentile(std::vector<double> values, double q) {
  if (values.empty()) return 0.0;
  std::sort(values.begin(), values.end());
  const double pos = std::clamp(q, 0.0, 1.0) * static_cast<double>(values.size() - 1);
  const auto k = static_cast<std::size_t>(pos);
  const double frac = pos - static_cast<double>(k);
  if (k + 1 >= values.size()) return values.back();
  return values[k] + frac * (values[k + 1] - values[k]);
}

Summary summarize(const std::vector<double>& samples) {
  Summary s;
  if (samples.empty()) return s;
  double sum = 0.0;
  for (double v : samples) sum += v;
  const auto n = static_cast<double>(samples.size());
  s.mean = sum / n;
  double ss = 0.0;
  for (double v : samples) ss += (v - s.mean) * (v - s.mean);
  s.stddev = samples.size() > 1 ? std::sqrt(ss / (n - 1.0)) : 0.0;
  s.p10 = percentile(samples, 0.1);
  s.p90 = percentile(samples, 0.9);
  return s;
}

double PhasePoint::standard_error() const {
  if (samples.size() < 2) return 0.0;
  return summarize(samples).stddev / std::sqrt(static_cast<double>(samples.size()));
}

PhasePoint run_phase_point(const ExperimentConfig& cfg, double density, double speed, unsigned threads) {
  validate(cfg);
  std::vector<double> samples(cfg.trials);
  parallel_for(cfg.trials, threads, [&](std::size_t t) { samples[t] = trial_width(cfg, density, speed, t); });
  return make_point(density, speed, std::move(samples));
}

PhaseTable run_phase_diagram(const ExperimentConfig& cfg, const RunOptions& opt) {
  validate(cfg);
  PhaseTable table;
  table.densities = cfg.densities;
  table.speeds = cfg.speeds;
  const std::size_t ns = cfg.speeds.size();
  const std::size_t npoints = cfg.densities.size() * ns;
  const std::uint64_t hash = config_hash(cfg);
  if (!opt.checkpoint_dir.empty()) {
    std::error_code ec;
    std::filesystem::create_directories(opt.checkpoint_dir, ec);
    if (ec) throw IoError("cannot create " + opt.checkpoint_dir.string() + ": " + ec.message());
  }
  std::vector<std::optional<PhasePoint>> done(npoints);
  std::vector<std::size_t> todo;
  for (std::size_t k = 0; k < npoints; ++k) {
    if (!opt.checkpoint_dir.empty()) {
      done[k] = read_checkpoint(opt.checkpoint_dir / checkpoint_name(k / ns, k % ns), hash,
                                cfg.densities[k / ns], cfg.speeds[k % ns], cfg.trials);
    }
    if (!done[k]) todo.push_back(k);
  }
  if (opt.max_new_points && todo.size() > *opt.max_new_points) todo.resize(*opt.max_new_points);
  // One task per (point, trial); results land in fixed slots.
  std::vector<std::vector<double>> samples(todo.size(), std::vector<double>(cfg.trials));
  parallel_for(todo.size() * cfg.trials, opt.threads, [&](std::size_t task) {
    const std::size_t slot = task / cfg.trials;
    const std::size_t trial = task % cfg.trials;
    const std::size_t k = todo[slot];
    samples[slot][trial] = trial_width(cfg, cfg.densities[k / ns], cfg.speeds[k % ns], trial);
  });
  for (std::size_t slot = 0; slot < todo.size(); ++slot) {
    const std::size_t k = todo[slot];
    done[k] = make_point(cfg.densities[k / ns], cfg.speeds[k % ns], std::move(samples[slot]));
    if (!opt.checkpoint_dir.empty()) {
      write_checkpoint(opt.checkpoint_dir / checkpoint_name(k / ns, k % ns), hash, *done[k]);
    }
  }
  for (std::size_t k = 0; k < npoints; ++k) {
    if (!done[k]) break;
    table.points.push_back(std::move(*done[k]));
  }
  return table;
}

std::string format_number(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

std::string to_csv(const PhaseTable& t) {
  std::string out = "rho,nu,trials,mean,p10,p90\n";
  for (const auto& p : t.points) {
    out += format_number(p.density) + "," + format_number(p.speed) + "," + std::to_string(p.trials) + "," +
           format_number(p.mean) + "," + format_number(p.p10) + "," + format_number(p.p90) + "\n";
  }
  return out;
}

PhaseTable table_from_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line) || line.rfind("rho,nu,trials,mean,p10,p90", 0) != 0) {
    throw ValidationError("phase table line 1: expected header 'rho,nu,trials,mean,p10,p90'");
  }
  PhaseTable t;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::vector<double> v;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
      try {
        std::size_t used = 0;
        v.push_back(std::stod(cell, &used));
      } catch (const std::exception&) {
        throw ValidationError("phase table line " + std::to_string(lineno) + ": bad number '" + cell + "'");
      }
    }
    if (v.size() != 6) throw ValidationError("phase table line " + std::to_string(lineno) + ": expected 6 fields");
    PhasePoint p;
    p.density = v[0];
    p.speed = v[1];
    p.trials = static_cast<std::size_t>(v[2]);
    p.mean = v[3];
    p.p10 = v[4];
    p.p90 = v[5];
    if (std::find(t.densities.begin(), t.densities.end(), p.density) == t.densities.end()) {
      t.densities.push_back(p.density);
    }
    if (std::find(t.speeds.begin(), t.speeds.end(), p.speed) == t.speeds.end()) t.speeds.push_back(p.speed);
    t.points.push_back(p);
  }
  if (t.points.empty()) throw ValidationError("phase table is empty");
  // Rows must form the full density-major grid.
  if (!t.complete()) throw ValidationError("phase table is not a complete density x speed grid");
  for (std::size_t k = 0; k < t.points.size(); ++k) {
    if (t.points[k].density != t.densities[k / t.speeds.size()] ||
        t.points[k].speed != t.speeds[k % t.speeds.size()]) {
      throw ValidationError("phase table rows are not in density-major grid order");
    }
  }
  return t;
}

void write_samples(const PhaseTable& t, const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoError("cannot create " + dir.string() + ": " + ec.message());
  for (const auto& p : t.points) {
    std::string out = "sample\n";
    for (double s : p.samples) out += format_number(s) + "\n";
    write_text(dir / ("rho_" + format_number(p.density) + "_nu_" + format_number(p.speed) + ".csv"), out);
  }
}

std::optional<double> crossing_speed(const PhaseTable& t, std::size_t di, double level) {
  const std::size_t ns = t.speeds.size();
  for (std::size_t s = 0; s < ns; ++s) {
    const auto& p = t.at(di, s);
    if (p.mean < level) continue;
    if (s == 0) return std::nullopt;
    const auto& q = t.at(di, s - 1);
    const double f = (level - q.mean) / (p.mean - q.mean);
    return q.speed + f * (p.speed - q.speed);
  }
  return std::nullopt;
}

TrendTest mann_kendall(const std::vector<double>& x) {
  TrendTest out;
  const std::size_t n = x.size();
  if (n < 3) return out;
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) s += (x[j] > x[i]) - (x[j] < x[i]);
  }
  std::vector<double> sorted = x;
  std::sort(sorted.begin(), sorted.end());
  const auto nd = static_cast<double>(n);
  double var = nd * (nd - 1.0) * (2.0 * nd + 5.0);
  for (std::size_t i = 0; i < n;) {
    std::size_t j = i;
    while (j < n && sorted[j] == sorted[i]) ++j;
    const auto t = static_cast<double>(j - i);
    var -= t * (t - 1.0) * (2.0 * t + 5.0);
    i = j;
  }
  var /= 18.0;
  out.s = s;
  if (var <= 0.0) return out;
  const double sd = std::sqrt(var);
  out.z = s > 0 ? (s - 1.0) / sd : (s < 0 ? (s + 1.0) / sd : 0.0);
  out.p_value = std::erfc(std::fabs(out.z) / std::sqrt(2.0));
  return out;
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out << text;
  if (!out) throw IoError("write failed: " + path.string());
}

std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace forestflight::experiment
