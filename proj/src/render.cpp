#include "forestflight/render.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "forestflight/error.hpp"

namespace forestflight::render {
namespace {

constexpr double kPi = 3.14159265358979323846;

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4f", v);
  std::string s = buf;
  // Trim trailing zeros for compact, still deterministic output.
  while (!s.empty() && s.back() == '0') s.pop_back();
  if (!s.empty() && s.back() == '.') s.pop_back();
  if (s == "-0") s = "0";
  return s;
}

std::string polygon(const std::vector<geometry::Point>& pts, const char* fill) {
  std::string out = "<polygon fill=\"";
  out += fill;
  out += "\" points=\"";
  for (std::size_t i = 0; i < pts.size(); ++i) {
    if (i) out += ' ';
    out += num(pts[i].x) + "," + num(pts[i].y);
  }
  out += "\"/>\n";
  return out;
}

// Position of v within a sorted grid: index i and fraction t with
// v = g[i] + t (g[i+1] - g[i]).
std::pair<std::size_t, double> locate(const std::vector<double>& g, double v) {
  if (g.size() == 1) return {0, 0.0};
  std::size_t i = static_cast<std::size_t>(std::upper_bound(g.begin(), g.end(), v) - g.begin());
  i = std::clamp<std::size_t>(i, 1, g.size() - 1) - 1;
  const double t = std::clamp((v - g[i]) / (g[i + 1] - g[i]), 0.0, 1.0);
  return {i, t};
}

std::string ramp(double v) {
  // White to dark blue.
  const double t = std::clamp(v, 0.0, 1.0);
  const int r = static_cast<int>(std::lround(255 - t * (255 - 16)));
  const int g = static_cast<int>(std::lround(255 - t * (255 - 48)));
  const int b = static_cast<int>(std::lround(255 - t * (255 - 120)));
  char buf[16];
  std::snprintf(buf, sizeof buf, "#%02x%02x%02x", r, g, b);
  return buf;
}

}  // namespace

std::string shadow_svg(const forest::Forest& f, const shadow::ShadowSet& s) {
  const double x0 = std::min(0.0, std::isfinite(s.clip_x()) ? s.clip_x() : 0.0);
  const double x1 = f.window.length;
  const double w = f.window.width;
  const double px = std::min(8.0, 1600.0 / (x1 - x0));
  std::string out;
  out += "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  out += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + num((x1 - x0) * px) + "\" height=\"" +
         num(w * px) + "\" viewBox=\"" + num(x0) + " 0 " + num(x1 - x0) + " " + num(w) + "\">\n";
  out += "<rect x=\"" + num(x0) + "\" y=\"0\" width=\"" + num(x1 - x0) + "\" height=\"" + num(w) +
         "\" fill=\"#ffffff\"/>\n";
  out += "<g transform=\"matrix(1 0 0 -1 0 " + num(w) + ")\">\n";
  out += "<g class=\"shadows\">\n";
  for (const auto& sh : s.shadows()) {
    out += polygon(shadow::region_polygon(sh, s.cone(), s.clip_x(), 32), "#d3d3d3");
  }
  out += "</g>\n<g class=\"trees\">\n";
  for (std::size_t i = 0; i < f.size(); ++i) {
    std::vector<geometry::Point> pts;
    const auto c = f.centers[i];
    for (int k = 0; k < 64; ++k) {
      const double a = 2.0 * kPi * k / 64.0;
      pts.push_back({c.x + f.tree_radius * std::cos(a), c.y + f.tree_radius * std::sin(a)});
    }
    out += polygon(pts, "#2b2b2b");
  }
  out += "</g>\n</g>\n</svg>\n";
  return out;
}

void render_shadow_svg(const forest::Forest& f, double speed, const std::filesystem::path& out) {
  const auto cone = geometry::cone_params(speed);
  const auto set = shadow::build_shadow_set(f, speed, -f.tree_radius / cone.sin_half);
  experiment::write_text(out, shadow_svg(f, set));
}

std::string phase_svg(const experiment::PhaseTable& t, const std::vector<bounds::BoundRow>& bound_rows) {
  if (t.points.empty() || !t.complete()) throw ValidationError("phase table is empty or incomplete");
  std::vector<double> lr;
  std::vector<double> lv;
  for (double d : t.densities) lr.push_back(std::log10(d));
  for (double v : t.speeds) lv.push_back(std::log10(v));
  // Grid axes must be increasing for interpolation; the table order is kept
  // and indices are remapped through a sort.
  std::vector<std::size_t> ri(lr.size());
  std::vector<std::size_t> vi(lv.size());
  for (std::size_t i = 0; i < ri.size(); ++i) ri[i] = i;
  for (std::size_t i = 0; i < vi.size(); ++i) vi[i] = i;
  std::sort(ri.begin(), ri.end(), [&](std::size_t a, std::size_t b) { return lr[a] < lr[b]; });
  std::sort(vi.begin(), vi.end(), [&](std::size_t a, std::size_t b) { return lv[a] < lv[b]; });
  std::vector<double> gr;
  std::vector<double> gv;
  for (auto i : ri) gr.push_back(lr[i]);
  for (auto i : vi) gv.push_back(lv[i]);
  auto value = [&](std::size_t a, std::size_t b) { return t.at(ri[a], vi[b]).mean; };

  double xr0 = gr.front();
  double xr1 = gr.back();
  double yv0 = gv.front();
  double yv1 = gv.back();
  if (xr1 - xr0 < 1e-9) {
    xr0 -= 0.5;
    xr1 += 0.5;
  }
  if (yv1 - yv0 < 1e-9) {
    yv0 -= 0.5;
    yv1 += 0.5;
  }
  const double W = 640.0;
  const double H = 480.0;
  const double ml = 70.0;
  const double mr = 20.0;
  const double mt = 20.0;
  const double mb = 60.0;
  const double pw = W - ml - mr;
  const double ph = H - mt - mb;
  auto sx = [&](double lx) { return ml + (lx - xr0) / (xr1 - xr0) * pw; };
  auto sy = [&](double ly) { return mt + ph - (ly - yv0) / (yv1 - yv0) * ph; };
  auto interp = [&](double x, double y) {
    const auto [i, a] = locate(gr, x);
    const auto [j, b] = locate(gv, y);
    const std::size_t i1 = std::min(i + 1, gr.size() - 1);
    const std::size_t j1 = std::min(j + 1, gv.size() - 1);
    return (1 - a) * (1 - b) * value(i, j) + a * (1 - b) * value(i1, j) + (1 - a) * b * value(i, j1) +
           a * b * value(i1, j1);
  };

  std::string out;
  out += "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  out += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + num(W) + "\" height=\"" + num(H) +
         "\" viewBox=\"0 0 " + num(W) + " " + num(H) + "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  out += "<rect x=\"0\" y=\"0\" width=\"" + num(W) + "\" height=\"" + num(H) + "\" fill=\"#ffffff\"/>\n";
  out += "<defs><clipPath id=\"plot\"><rect x=\"" + num(ml) + "\" y=\"" + num(mt) + "\" width=\"" + num(pw) +
         "\" height=\"" + num(ph) + "\"/></clipPath></defs>\n";
  out += "<g class=\"heatmap\">\n";
  constexpr int kCells = 64;
  for (int a = 0; a < kCells; ++a) {
    for (int b = 0; b < kCells; ++b) {
      const double x = xr0 + (a + 0.5) / kCells * (xr1 - xr0);
      const double y = yv0 + (b + 0.5) / kCells * (yv1 - yv0);
      const double cx = sx(xr0 + static_cast<double>(a) / kCells * (xr1 - xr0));
      const double cy = sy(yv0 + static_cast<double>(b + 1) / kCells * (yv1 - yv0));
      out += "<rect x=\"" + num(cx) + "\" y=\"" + num(cy) + "\" width=\"" + num(pw / kCells + 0.05) +
             "\" height=\"" + num(ph / kCells + 0.05) + "\" fill=\"" + ramp(interp(x, y)) + "\"/>\n";
    }
  }
  out += "</g>\n";

  // Marching squares over the grid cells.
  out += "<g class=\"contours\" clip-path=\"url(#plot)\" fill=\"none\" stroke=\"#000000\" stroke-width=\"1\">\n";
  for (int level_index = 1; level_index <= kContourLevels; ++level_index) {
    const double level = level_index / 10.0;
    out += "<g class=\"contour\" data-level=\"" + num(level) + "\">";
    std::string d;
    for (std::size_t i = 0; i + 1 < gr.size(); ++i) {
      for (std::size_t j = 0; j + 1 < gv.size(); ++j) {
        const double c[4] = {value(i, j), value(i + 1, j), value(i + 1, j + 1), value(i, j + 1)};
        const double px[4] = {gr[i], gr[i + 1], gr[i + 1], gr[i]};
        const double py[4] = {gv[j], gv[j], gv[j + 1], gv[j + 1]};
        std::vector<std::pair<double, double>> hits;
        for (int e = 0; e < 4; ++e) {
          const int f = (e + 1) % 4;
          const bool ae = c[e] >= level;
          const bool af = c[f] >= level;
          if (ae == af) continue;
          const double s = (level - c[e]) / (c[f] - c[e]);
          hits.push_back({px[e] + s * (px[f] - px[e]), py[e] + s * (py[f] - py[e])});
        }
        for (std::size_t h = 0; h + 1 < hits.size(); h += 2) {
          d += "M" + num(sx(hits[h].first)) + " " + num(sy(hits[h].second)) + "L" + num(sx(hits[h + 1].first)) +
               " " + num(sy(hits[h + 1].second));
        }
      }
    }
    if (!d.empty()) out += "<path d=\"" + d + "\"/>";
    out += "</g>\n";
  }
  out += "</g>\n";

  // Bound curves.
  auto curve = [&](bool lower) {
    std::string pts;
    for (const auto& r : bound_rows) {
      const double v = lower ? (r.nu_lower ? *r.nu_lower : 0.0) : r.nu_upper;
      if (!(v > 0.0) || !std::isfinite(v)) continue;
      if (!pts.empty()) pts += ' ';
      pts += num(sx(std::log10(r.density))) + "," + num(sy(std::log10(v)));
    }
    return pts;
  };
  out += "<g class=\"bounds\" clip-path=\"url(#plot)\" fill=\"none\" stroke-width=\"2\">\n";
  out += "<polyline class=\"nu-lower\" stroke=\"#1a9641\" points=\"" + curve(true) + "\"/>\n";
  out += "<polyline class=\"nu-upper\" stroke=\"#d7191c\" points=\"" + curve(false) + "\"/>\n";
  out += "</g>\n";

  // Axes with decade ticks.
  out += "<g class=\"axes\" stroke=\"#000000\" fill=\"none\">\n";
  out += "<rect x=\"" + num(ml) + "\" y=\"" + num(mt) + "\" width=\"" + num(pw) + "\" height=\"" + num(ph) + "\"/>\n";
  out += "</g>\n<g class=\"labels\" fill=\"#000000\">\n";
  auto ticks = [&](double lo, double hi, bool x_axis) {
    std::string s;
    for (int e = static_cast<int>(std::floor(lo)); e <= static_cast<int>(std::ceil(hi)); ++e) {
      for (int m = 1; m <= 9; ++m) {
        const double l = e + std::log10(static_cast<double>(m));
        if (l < lo - 1e-9 || l > hi + 1e-9) continue;
        const double v = std::pow(10.0, l);
        char label[32];
        std::snprintf(label, sizeof label, "%g", v);
        const bool major = m == 1 || m == 2 || m == 5;
        if (x_axis) {
          const double x = sx(l);
          s += "<line x1=\"" + num(x) + "\" y1=\"" + num(mt + ph) + "\" x2=\"" + num(x) + "\" y2=\"" +
               num(mt + ph + (major ? 6 : 3)) + "\" stroke=\"#000000\"/>\n";
          if (major) {
            s += "<text x=\"" + num(x) + "\" y=\"" + num(mt + ph + 20) + "\" text-anchor=\"middle\">" + label +
                 "</text>\n";
          }
        } else {
          const double y = sy(l);
          s += "<line x1=\"" + num(ml - (major ? 6 : 3)) + "\" y1=\"" + num(y) + "\" x2=\"" + num(ml) + "\" y2=\"" +
               num(y) + "\" stroke=\"#000000\"/>\n";
          if (major) {
            s += "<text x=\"" + num(ml - 9) + "\" y=\"" + num(y + 4) + "\" text-anchor=\"end\">" + label +
                 "</text>\n";
          }
        }
      }
    }
    return s;
  };
  out += ticks(xr0, xr1, true);
  out += ticks(yv0, yv1, false);
  out += "<text x=\"" + num(ml + pw / 2) + "\" y=\"" + num(H - 15) +
         "\" text-anchor=\"middle\">tree density (1/m^2)</text>\n";
  out += "<text x=\"18\" y=\"" + num(mt + ph / 2) + "\" text-anchor=\"middle\" transform=\"rotate(-90 18 " +
         num(mt + ph / 2) + ")\">speed</text>\n";
  out += "</g>\n</svg>\n";
  return out;
}

void render_phase_svg(const experiment::PhaseTable& t, const std::vector<bounds::BoundRow>& bound_rows,
                      const std::filesystem::path& out) {
  experiment::write_text(out, phase_svg(t, bound_rows));
}

}  // namespace forestflight::render
