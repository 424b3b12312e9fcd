// Command-line front end: forest, shadow, oracle, lattice, continuum, bounds
// and phase subcommands.

#include <cstdio>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"

#include "forestflight/bounds.hpp"
#include "forestflight/continuum.hpp"
#include "forestflight/error.hpp"
#include "forestflight/experiment.hpp"
#include "forestflight/forest.hpp"
#include "forestflight/lattice.hpp"
#include "forestflight/render.hpp"
#include "forestflight/rng.hpp"
#include "forestflight/shadow.hpp"
#include "forestflight/sweep_oracle.hpp"
#include "forestflight/validation.hpp"

namespace ff = forestflight;
using nlohmann::json;

namespace {

struct Globals {
  std::uint64_t seed = 1;
  std::string config;
  std::string out;
  unsigned threads = 0;
};

void emit(const Globals& g, const std::string& text) {
  if (g.out.empty()) {
    std::cout << text;
    if (!text.empty() && text.back() != '\n') std::cout << '\n';
  } else {
    ff::experiment::write_text(g.out, text);
  }
}

std::string require_out(const Globals& g, const char* what) {
  if (g.out.empty()) throw ff::ValidationError(std::string(what) + " needs --out <path>");
  return g.out;
}

ff::forest::Forest forest_input(const std::string& in, double rho, double width, double length, double radius,
                                std::uint64_t seed) {
  if (!in.empty()) return ff::forest::load_forest(in);
  return ff::forest::sample_poisson_forest(rho, {width, length}, radius, seed);
}

const char* kind_name(ff::shadow::ShadowKind k) {
  switch (k) {
    case ff::shadow::ShadowKind::left_primary:
      return "left_primary";
    case ff::shadow::ShadowKind::right_primary:
      return "right_primary";
    case ff::shadow::ShadowKind::induced:
      return "induced";
  }
  return "?";
}

json shadow_dump(const ff::shadow::ShadowSet& s, double width) {
  json j;
  j["speed"] = s.cone().speed;
  j["clip_x"] = s.clip_x();
  j["shadows"] = json::array();
  for (std::size_t i = 0; i < s.shadows().size(); ++i) {
    const auto& sh = s.shadows()[i];
    json r;
    r["kind"] = kind_name(sh.kind);
    r["apex"] = {sh.apex.x, sh.apex.y};
    r["top_end"] = {sh.top.end.x, sh.top.end.y};
    r["bottom_end"] = {sh.bottom.end.x, sh.bottom.end.y};
    r["parents"] = sh.parents ? json{sh.parents->first, sh.parents->second} : json(nullptr);
    if (sh.tree) r["tree"] = *sh.tree;
    r["component_id"] = s.component_of(i);
    j["shadows"].push_back(r);
  }
  j["components"] = json::array();
  for (const auto& c : s.components()) {
    j["components"].push_back({{"members", c.members},
                               {"y_min", c.y_min},
                               {"y_max", c.y_max},
                               {"x_min", c.x_min},
                               {"x_max", c.x_max},
                               {"lateral_extent", c.lateral_extent()}});
  }
  j["max_normalized_width"] = ff::shadow::max_normalized_width(s, width);
  const auto& st = s.stats();
  j["stats"] = {{"primaries", st.primaries},
                {"induced", st.induced},
                {"duplicate_keys", st.duplicate_keys},
                {"pair_tests", st.pair_tests},
                {"extent_escapes", st.extent_escapes}};
  return j;
}

ff::lattice::LatticeSpec lattice_spec(const std::string& graph, bool directed, const std::string& mode, int depth,
                                      int width, double p, const std::string& source) {
  ff::lattice::LatticeSpec spec;
  if (source == "boundary") {
    spec.source = ff::lattice::Source::boundary;
  } else if (source == "single") {
    spec.source = ff::lattice::Source::single;
  } else {
    throw ff::ValidationError("unknown source '" + source + "' (expected boundary or single)");
  }
  if (graph == "square") {
    spec.graph = ff::lattice::Graph::square;
  } else if (graph == "hexagonal") {
    spec.graph = ff::lattice::Graph::hexagonal;
  } else {
    throw ff::ValidationError("unknown graph '" + graph + "' (expected square or hexagonal)");
  }
  if (mode == "site") {
    spec.mode = ff::lattice::Mode::site;
  } else if (mode == "bond") {
    spec.mode = ff::lattice::Mode::bond;
  } else {
    throw ff::ValidationError("unknown mode '" + mode + "' (expected site or bond)");
  }
  spec.directed = directed;
  spec.depth = depth;
  spec.width = width;
  spec.p = p;
  ff::lattice::validate(spec);
  return spec;
}

ff::experiment::ExperimentConfig experiment_config(const Globals& g, const std::string& preset) {
  ff::experiment::ExperimentConfig cfg;
  if (!g.config.empty()) {
    cfg = ff::experiment::load_config(g.config);
  } else if (preset == "paper") {
    cfg = ff::experiment::paper_preset();
  } else if (preset == "desk") {
    cfg = ff::experiment::desk_preset();
    cfg.seed = g.seed;
  } else {
    throw ff::ValidationError("unknown preset '" + preset + "' (expected desk or paper)");
  }
  if (g.config.empty() && preset == "paper") cfg.seed = g.seed;
  return cfg;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Collision-free flight through random forests: shadows, percolation and phase diagrams"};
  app.require_subcommand(1);
  // Global flags may follow the subcommand.
  app.fallthrough();
  Globals g;
  app.add_option("--seed", g.seed, "master seed")->capture_default_str();
  app.add_option("--config", g.config, "JSON experiment config");
  app.add_option("--out", g.out, "output path (stdout when omitted)");
  app.add_option("--threads", g.threads, "worker threads (0: all cores)")->capture_default_str();

  // forest
  auto* forest_cmd = app.add_subcommand("forest", "generate or inspect forests")->require_subcommand(1);
  double rho = 0.01;
  double width = 200.0;
  double length = 400.0;
  double radius = 1.0;
  std::optional<double> rho2;
  double q = 0.5;
  auto* gen = forest_cmd->add_subcommand("gen", "sample a Poisson forest");
  gen->add_option("--rho", rho, "tree density")->capture_default_str();
  gen->add_option("--width", width, "lateral window size w")->capture_default_str();
  gen->add_option("--length", length, "longitudinal window size l")->capture_default_str();
  gen->add_option("--r", radius, "tree radius")->capture_default_str();
  gen->add_option("--mix-rho", rho2, "second density: sample the two-density mixture");
  gen->add_option("--q", q, "probability of the first density in a mixture")->capture_default_str();
  std::string in;
  auto* show = forest_cmd->add_subcommand("show", "summarize a forest file");
  show->add_option("--in", in, "forest CSV")->required();

  // shadow
  auto* shadow_cmd = app.add_subcommand("shadow", "shadow-region construction")->require_subcommand(1);
  double nu = 30.0;
  double qx = 0.0;
  double qy = 0.0;
  auto add_forest_opts = [&](CLI::App* c) {
    c->add_option("--in", in, "forest CSV (otherwise sampled)");
    c->add_option("--rho", rho, "tree density when sampling")->capture_default_str();
    c->add_option("--width", width, "window width when sampling")->capture_default_str();
    c->add_option("--length", length, "window length when sampling")->capture_default_str();
    c->add_option("--r", radius, "tree radius when sampling")->capture_default_str();
    c->add_option("--nu", nu, "speed")->capture_default_str();
  };
  auto* sbuild = shadow_cmd->add_subcommand("build", "build the shadow set and dump it as JSON");
  add_forest_opts(sbuild);
  auto* srender = shadow_cmd->add_subcommand("render", "render shadows as SVG");
  add_forest_opts(srender);
  auto* squery = shadow_cmd->add_subcommand("query", "is a point doomed?");
  add_forest_opts(squery);
  squery->add_option("--x", qx, "longitudinal coordinate")->required();
  squery->add_option("--y", qy, "lateral coordinate")->required();

  // oracle
  auto* oracle_cmd = app.add_subcommand("oracle", "brute-force sweep checks")->require_subcommand(1);
  std::size_t trees = 20;
  std::size_t trials = 100;
  std::size_t points = 1000;
  std::optional<double> dx;
  auto* ocompare = oracle_cmd->add_subcommand("compare", "shadow vs oracle agreement on random forests");
  ocompare->add_option("--trees", trees, "trees per forest")->capture_default_str();
  ocompare->add_option("--nu", nu, "speed")->capture_default_str();
  ocompare->add_option("--trials", trials, "forests")->capture_default_str();
  ocompare->add_option("--points", points, "query points per forest")->capture_default_str();
  ocompare->add_option("--dx", dx, "sweep step (default 1e-3)");
  double window_side = 40.0;
  ocompare->add_option("--window", window_side, "square window side")->capture_default_str();
  std::size_t starts = 1000;
  auto* osurv = oracle_cmd->add_subcommand("survival", "forward survival depths from the left edge");
  osurv->add_option("--rho", rho, "tree density")->capture_default_str();
  osurv->add_option("--nu", nu, "speed")->capture_default_str();
  osurv->add_option("--starts", starts, "starting points")->capture_default_str();
  osurv->add_option("--width", width, "window width")->capture_default_str();
  osurv->add_option("--length", length, "window length")->capture_default_str();
  osurv->add_option("--dx", dx, "sweep step (default 0.01)");

  // lattice
  auto* lattice_cmd = app.add_subcommand("lattice", "discrete percolation")->require_subcommand(1);
  std::string graph = "square";
  std::string mode = "site";
  bool directed = false;
  int depth = 256;
  int lwidth = 0;
  std::string lsource = "boundary";
  double p = 0.5;
  auto add_lattice_opts = [&](CLI::App* c) {
    c->add_option("--graph", graph, "square or hexagonal")->capture_default_str();
    c->add_option("--mode", mode, "site or bond")->capture_default_str();
    c->add_flag("--directed", directed, "directed lattice");
    c->add_option("--depth", depth, "depth n")->capture_default_str();
    c->add_option("--lattice-width", lwidth, "sites per layer for directed lattices (0: default)");
    c->add_option("--source", lsource, "boundary (all of layer 0) or single (middle site)")
        ->capture_default_str();
  };
  auto* lest = lattice_cmd->add_subcommand("estimate", "estimate the critical probability");
  add_lattice_opts(lest);
  std::size_t ltrials = 2000;
  bool no_extrapolate = false;
  lest->add_option("--trials", ltrials, "trials")->capture_default_str();
  lest->add_flag("--no-extrapolate", no_extrapolate, "directed: report the depth-n value only");
  auto* ltrial = lattice_cmd->add_subcommand("trial", "one percolation trial");
  add_lattice_opts(ltrial);
  ltrial->add_option("--p", p, "open probability")->capture_default_str();

  // continuum
  auto* cont_cmd = app.add_subcommand("continuum", "Gilbert continuum percolation")->require_subcommand(1);
  std::string shape = "disk";
  double multiple = 64.0;
  std::size_t ctrials = 1000;
  double degree = 4.5;
  auto* cest = cont_cmd->add_subcommand("estimate", "estimate the critical degree");
  cest->add_option("--shape", shape, "disk or square")->capture_default_str();
  cest->add_option("--window", multiple, "window side in connection lengths")->capture_default_str();
  cest->add_option("--trials", ctrials, "trials")->capture_default_str();
  auto* ctrial = cont_cmd->add_subcommand("trial", "one realization at a given degree");
  ctrial->add_option("--shape", shape, "disk or square")->capture_default_str();
  ctrial->add_option("--window", multiple, "window side in connection lengths")->capture_default_str();
  ctrial->add_option("--degree", degree, "expected neighbour count")->capture_default_str();

  // bounds
  auto* bounds_cmd = app.add_subcommand("bounds", "closed-form speed bounds")->require_subcommand(1);
  double rho_min = 1e-3;
  double rho_max = 0.1;
  int samples = 50;
  ff::bounds::BoundConfig bcfg;
  auto add_bound_opts = [&](CLI::App* c) {
    c->add_option("--p-hex", bcfg.p_hex_site, "directed hexagonal site threshold")->capture_default_str();
    c->add_option("--d-crit", bcfg.d_crit_square, "unit-square critical degree")->capture_default_str();
    c->add_option("--r", radius, "tree radius")->capture_default_str();
  };
  auto* btable = bounds_cmd->add_subcommand("table", "bound curves over a density range (CSV)");
  add_bound_opts(btable);
  btable->add_option("--rho-min", rho_min, "smallest density")->capture_default_str();
  btable->add_option("--rho-max", rho_max, "largest density")->capture_default_str();
  btable->add_option("--samples", samples, "log-spaced samples")->capture_default_str();
  auto* beval = bounds_cmd->add_subcommand("eval", "which condition holds at (rho, r, nu)");
  add_bound_opts(beval);
  beval->add_option("--rho", rho, "tree density")->required();
  beval->add_option("--nu", nu, "speed")->required();

  // phase
  auto* phase_cmd = app.add_subcommand("phase", "Monte-Carlo phase diagram")->require_subcommand(1);
  std::string preset = "desk";
  std::string checkpoint;
  std::string samples_dir;
  auto* prun = phase_cmd->add_subcommand("run", "run the grid and write the CSV table");
  prun->add_option("--preset", preset, "desk or paper (ignored with --config)")->capture_default_str();
  prun->add_option("--checkpoint", checkpoint, "directory for per-point checkpoints");
  prun->add_option("--full", samples_dir, "also write per-point sample files into this directory");
  std::string table_path;
  auto* pplot = phase_cmd->add_subcommand("plot", "render a phase table as SVG");
  pplot->add_option("--table", table_path, "phase CSV")->required();
  pplot->add_option("--samples", samples, "bound-curve samples")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    std::cerr << app.help();
    return 1;
  }

  try {
    if (gen->parsed()) {
      const ff::forest::Window w{width, length};
      const auto f = rho2 ? ff::forest::sample_mixed_forest(rho, *rho2, q, w, radius, g.seed)
                          : ff::forest::sample_poisson_forest(rho, w, radius, g.seed);
      emit(g, ff::forest::to_csv(f));
    } else if (show->parsed()) {
      const auto f = ff::forest::load_forest(in);
      json j{{"trees", f.size()},
             {"width", f.window.width},
             {"length", f.window.length},
             {"radius", f.tree_radius},
             {"density", f.density},
             {"empirical_density", static_cast<double>(f.size()) / (f.window.width * f.window.length)},
             {"seed", f.seed}};
      emit(g, j.dump(2));
    } else if (sbuild->parsed() || srender->parsed() || squery->parsed()) {
      const auto f = forest_input(in, rho, width, length, radius, g.seed);
      const auto cone = ff::geometry::cone_params(nu);
      const auto set = ff::shadow::build_shadow_set(f, nu, -f.tree_radius / cone.sin_half);
      if (sbuild->parsed()) {
        emit(g, shadow_dump(set, f.window.width).dump(2));
      } else if (srender->parsed()) {
        ff::experiment::write_text(require_out(g, "shadow render"), ff::render::shadow_svg(f, set));
      } else {
        const bool doomed = set.is_doomed({qx, qy});
        emit(g, json{{"x", qx}, {"y", qy}, {"doomed", doomed}}.dump());
      }
    } else if (ocompare->parsed()) {
      const double step = dx.value_or(1e-3);
      std::size_t agree = 0;
      std::size_t total = 0;
      std::size_t far = 0;
      std::size_t verdict_match = 0;
      for (std::size_t t = 0; t < trials; ++t) {
        ff::rng::Stream s(g.seed, "cli.oracle", t);
        const auto f = ff::validation::fixed_count_forest(trees, {window_side, window_side}, 1.0, s.next_u64());
        const auto c = ff::validation::compare_instance(f, nu, points, step, 10.0 * step, s.next_u64());
        agree += c.agree;
        total += c.points;
        far += c.disagree_far;
        verdict_match += c.shadow_crossing == c.oracle_crossing;
      }
      json j{{"trials", trials},
             {"points", total},
             {"agreement", total ? static_cast<double>(agree) / static_cast<double>(total) : 1.0},
             {"disagreements_off_boundary", far},
             {"crossing_verdict_agreement", trials ? static_cast<double>(verdict_match) / static_cast<double>(trials) : 1.0}};
      emit(g, j.dump(2));
    } else if (osurv->parsed()) {
      const auto f = ff::forest::sample_poisson_forest(rho, {width, length}, 1.0, g.seed);
      const auto depth_of = ff::oracle::survival_depth(f, nu, 0.0, dx.value_or(0.01));
      ff::rng::Stream s(g.seed, "cli.survival", 0);
      std::string out = "y0,depth\n";
      for (std::size_t i = 0; i < starts; ++i) {
        const double y0 = width * (0.25 + 0.5 * s.uniform());
        out += ff::experiment::format_number(y0) + "," + ff::experiment::format_number(depth_of(y0)) + "\n";
      }
      emit(g, out);
    } else if (lest->parsed()) {
      ff::lattice::EstimateOptions opt;
      opt.trials = ltrials;
      opt.seed = g.seed;
      opt.threads = g.threads;
      opt.extrapolate = !no_extrapolate;
      const auto e = ff::lattice::estimate_threshold(lattice_spec(graph, directed, mode, depth, lwidth, 0.5, lsource), opt);
      emit(g, ff::lattice::to_json(e));
    } else if (ltrial->parsed()) {
      const auto spec = lattice_spec(graph, directed, mode, depth, lwidth, p, lsource);
      const auto r = ff::lattice::percolate_trial(spec, g.seed);
      json j{{"crossed", r.crossed}, {"cluster_size", r.cluster_size}};
      j["path_length"] = r.path ? r.path->size() : 0;
      emit(g, j.dump(2));
    } else if (cest->parsed()) {
      ff::continuum::DegreeOptions opt;
      opt.trials = ctrials;
      opt.seed = g.seed;
      opt.threads = g.threads;
      const auto e = ff::continuum::estimate_critical_degree(ff::continuum::parse_shape(shape), multiple, opt);
      emit(g, ff::continuum::to_json(e));
    } else if (ctrial->parsed()) {
      ff::continuum::GilbertSpec spec;
      spec.shape = ff::continuum::parse_shape(shape);
      if (spec.shape == ff::continuum::Shape::rectangle) throw ff::ValidationError("use disk or square");
      spec.a = spec.shape == ff::continuum::Shape::disk ? 0.5 : 1.0;
      spec.window = {multiple, multiple};
      spec.intensity = ff::continuum::intensity_for_degree(spec, degree);
      const auto occ = ff::continuum::occupied_components(spec, g.seed);
      emit(g, json{{"points", occ.centers.size()},
                   {"components", occ.components.size()},
                   {"vacant_crossing", ff::continuum::vacant_crossing(spec, occ)}}
                  .dump(2));
    } else if (btable->parsed()) {
      emit(g, ff::bounds::to_csv(ff::bounds::phase_boundary_table(rho_min, rho_max, radius, bcfg, samples)));
    } else if (beval->parsed()) {
      const auto regime = ff::bounds::classify(rho, radius, nu, bcfg);
      const auto b = ff::bounds::speed_bounds(rho, radius, bcfg);
      json j{{"rho", rho}, {"r", radius}, {"nu", nu}, {"regime", ff::bounds::regime_name(regime)}};
      j["nu_lower"] = b.nu_lower ? json(*b.nu_lower) : json(nullptr);
      j["nu_upper"] = b.nu_upper;
      emit(g, j.dump(2));
    } else if (prun->parsed()) {
      const auto cfg = experiment_config(g, preset);
      ff::experiment::RunOptions opt;
      opt.threads = g.threads;
      opt.checkpoint_dir = checkpoint;
      const auto table = ff::experiment::run_phase_diagram(cfg, opt);
      if (!samples_dir.empty()) ff::experiment::write_samples(table, samples_dir);
      emit(g, ff::experiment::to_csv(table));
    } else if (pplot->parsed()) {
      const auto table = ff::experiment::table_from_csv(ff::experiment::read_text(table_path));
      ff::bounds::BoundConfig b;
      if (!g.config.empty()) b = ff::experiment::load_config(g.config).bounds;
      double lo = table.densities.front();
      double hi = lo;
      for (double d : table.densities) {
        lo = std::min(lo, d);
        hi = std::max(hi, d);
      }
      const auto rows = ff::bounds::phase_boundary_table(lo, hi, 1.0, b, samples);
      ff::experiment::write_text(require_out(g, "phase plot"), ff::render::phase_svg(table, rows));
    }
  } catch (const ff::ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const ff::IoError& e) {
    std::cerr << "I/O error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
