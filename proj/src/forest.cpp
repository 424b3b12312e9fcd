#include "forestflight/forest.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "forestflight/error.hpp"
#include "forestflight/rng.hpp"

namespace forestflight::forest {
namespace {

void check_radius(double r) {
  if (!(r > 0.0) || !std::isfinite(r)) throw ValidationError("tree radius must be positive");
}

std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

double parse_double(std::string_view s, std::size_t line) {
  while (!s.empty() && s.front() == ' ') s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\r')) s.remove_suffix(1);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size() || !std::isfinite(v)) {
    throw ValidationError("forest file line " + std::to_string(line) + ": bad number '" +
                          std::string(s) + "'");
  }
  return v;
}

// Value of "key=<value>" inside the header.
std::string_view header_field(std::string_view header, std::string_view key) {
  const std::string needle = std::string(key) + "=";
  std::size_t pos = 0;
  while ((pos = header.find(needle, pos)) != std::string_view::npos) {
    if (pos == 0 || header[pos - 1] == ' ' || header[pos - 1] == ',') break;
    pos += needle.size();
  }
  if (pos == std::string_view::npos) {
    throw ValidationError("forest file line 1: missing header field '" + std::string(key) + "'");
  }
  const std::size_t start = pos + needle.size();
  const std::size_t stop = header.find(',', start);
  return header.substr(start, stop == std::string_view::npos ? header.npos : stop - start);
}

}  // namespace

void validate(const Window& w) {
  if (!(w.width > 0.0) || !(w.length > 0.0) || !std::isfinite(w.width) || !std::isfinite(w.length)) {
    throw ValidationError("window width and length must be positive");
  }
}

Forest sample_poisson_forest(double density, Window window, double radius, std::uint64_t seed) {
  if (!(density >= 0.0) || !std::isfinite(density)) throw ValidationError("density must be >= 0");
  validate(window);
  check_radius(radius);
  Forest f;
  f.window = window;
  f.tree_radius = radius;
  f.density = density;
  f.seed = seed;
  rng::Stream stream(seed, "forest.poisson", 0);
  const std::uint64_t count = stream.poisson(density * window.width * window.length);
  f.centers.reserve(count);
  for (std::uint64_t i = 0; i < count; ++i) {
    const double x = stream.uniform() * window.length;
    const double y = stream.uniform() * window.width;
    f.centers.push_back({x, y});
  }
  return f;
}

Forest sample_mixed_forest(double density_first, double density_second, double q, Window window,
                           double radius, std::uint64_t seed) {
  if (!(q >= 0.0 && q <= 1.0)) throw ValidationError("mixture probability must lie in [0, 1]");
  rng::Stream branch_stream(seed, "forest.mixture", 0);
  const bool first = branch_stream.uniform() < q;
  Forest f = sample_poisson_forest(first ? density_first : density_second, window, radius, seed);
  f.branch = first ? MixtureBranch::first : MixtureBranch::second;
  return f;
}

Forest scale_forest(const Forest& f, double sx, double sy) {
  if (!(sx > 0.0) || !(sy > 0.0) || !std::isfinite(sx) || !std::isfinite(sy)) {
    throw ValidationError("scale factors must be positive");
  }
  Forest out = f;
  out.window = {f.window.width * sy, f.window.length * sx};
  out.density = f.density / (sx * sy);
  for (auto& c : out.centers) c = {c.x * sx, c.y * sy};
  return out;
}

std::string to_csv(const Forest& f) {
  std::string out = "# forest v1, w=" + fmt17(f.window.width) + ", l=" + fmt17(f.window.length) +
                    ", r=" + fmt17(f.tree_radius) + ", rho=" + fmt17(f.density) +
                    ", seed=" + std::to_string(f.seed) + "\n";
  for (const auto& c : f.centers) {
    out += fmt17(c.x);
    out += ',';
    out += fmt17(c.y);
    out += '\n';
  }
  return out;
}

Forest from_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line) || line.rfind("# forest v1", 0) != 0) {
    throw ValidationError("forest file line 1: expected '# forest v1' header");
  }
  Forest f;
  f.window.width = parse_double(header_field(line, "w"), 1);
  f.window.length = parse_double(header_field(line, "l"), 1);
  f.tree_radius = parse_double(header_field(line, "r"), 1);
  f.density = parse_double(header_field(line, "rho"), 1);
  {
    const std::string_view s = header_field(line, "seed");
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), f.seed);
    if (ec != std::errc{}) throw ValidationError("forest file line 1: bad seed");
  }
  if (!(f.tree_radius > 0.0)) throw ValidationError("forest file line 1: radius must be positive");
  if (!(f.density >= 0.0)) throw ValidationError("forest file line 1: density must be >= 0");
  try {
    validate(f.window);
  } catch (const ValidationError& e) {
    throw ValidationError(std::string("forest file line 1: ") + e.what());
  }
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line == "\r" || line.rfind("x,y", 0) == 0) continue;
    const auto comma = line.find(',');
    if (comma == std::string::npos) {
      throw ValidationError("forest file line " + std::to_string(lineno) + ": expected 'x,y'");
    }
    const std::string_view view(line);
    const Point p{parse_double(view.substr(0, comma), lineno), parse_double(view.substr(comma + 1), lineno)};
    if (p.x < 0.0 || p.x > f.window.length || p.y < 0.0 || p.y > f.window.width) {
      throw ValidationError("forest file line " + std::to_string(lineno) + ": center outside window");
    }
    f.centers.push_back(p);
  }
  return f;
}

void save_forest(const Forest& f, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out << to_csv(f);
  if (!out) throw IoError("write failed: " + path.string());
}

Forest load_forest(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return from_csv(ss.str());
}

}  // namespace forestflight::forest
