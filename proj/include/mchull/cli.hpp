#pragma once

// Command-line front end: flag parsing over an optional JSON config file and
// dispatch of the five subcommands.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "mchull/config.hpp"
#include "mchull/flow.hpp"
#include "mchull/grid.hpp"
#include "mchull/hull.hpp"
#include "mchull/mesh.hpp"
#include "mchull/report.hpp"
#include "mchull/scenes.hpp"
#include "mchull/verify.hpp"

namespace mchull {

enum ExitCode { kExitOk = 0, kExitCheckFailed = 1, kExitUsage = 2, kExitRuntime = 3 };

// Thrown by parse_config when --help was requested; carries the help text.
struct HelpRequested {
  std::string text;
};

inline RunConfig parse_config(const std::vector<std::string>& args) {
  CLI::App app{"Mean-convex hulls of voxel obstacles by minimizing movements"};
  app.fallthrough();
  app.set_help_flag("--help", "Print this help message and exit");
  app.require_subcommand(0, 1);

  int grid = 0, stencil = 0, jobs = 0;
  std::uint64_t seed = 0;
  std::string out, config;
  auto* o_grid = app.add_option("--grid", grid, "Cells per axis")->check(CLI::Range(8, 1024));
  auto* o_stencil = app.add_option("--stencil", stencil, "Stencil order (4,8,16,32 in 2D; 6,18,26,98 in 3D)");
  auto* o_seed = app.add_option("--seed", seed, "Root random seed");
  auto* o_out = app.add_option("--out", out, "Output directory");
  app.add_option("--config", config, "JSON config file; flags override its values");
  auto* o_jobs = app.add_option("--jobs", jobs, "Worker threads (0 = all cores)");

  struct SceneFlags {
    std::string scene, input;
    std::vector<std::string> params;
    int dim = 0;
    double half_width = 0.0;
    CLI::Option *o_scene = nullptr, *o_input = nullptr, *o_params = nullptr, *o_dim = nullptr, *o_hw = nullptr;
  };
  auto add_scene = [](CLI::App* sub, SceneFlags& f) {
    f.o_scene = sub->add_option("--scene", f.scene, "Scene kind");
    f.o_params = sub->add_option("--param", f.params, "Scene parameter key=value (repeatable)");
    f.o_input = sub->add_option("--in", f.input, "MCHV volume used instead of a scene");
    f.o_dim = sub->add_option("--dim", f.dim, "Dimension (2 or 3)");
    f.o_hw = sub->add_option("--half-width", f.half_width, "Grid covers [-w, w]^dim");
  };

  SceneFlags sf_shape, sf_flow, sf_hull, sf_verify;
  auto* shape = app.add_subcommand("shape", "Rasterize a scene");
  add_scene(shape, sf_shape);

  auto* flow = app.add_subcommand("flow", "Run one flow from the full interior");
  add_scene(flow, sf_flow);
  double f_h = 0.0, f_gamma = 0.0;
  int f_steps = 0, f_snap = 0;
  auto* o_fh = flow->add_option("--h", f_h, "Time step in cells squared");
  auto* o_fsteps = flow->add_option("--max-steps", f_steps, "Step cap");
  auto* o_fgamma = flow->add_option("--gamma-ref", f_gamma, "Displacement constant for the resolution guard");
  auto* o_fsnap = flow->add_option("--snapshot-every", f_snap, "Write a volume every k steps");

  auto* hull = app.add_subcommand("hull", "Mean-convex hull over eps and h schedules");
  add_scene(hull, sf_hull);
  std::vector<double> h_eps, h_hs;
  bool h_no_limit = false, h_obj = false;
  auto* o_heps = hull->add_option("--eps", h_eps, "Dilation radii in cells, decreasing")->delimiter(',');
  auto* o_hhs = hull->add_option("--hs", h_hs, "Time steps in cells squared, decreasing")->delimiter(',');
  auto* o_hlimit = hull->add_flag("--no-grid-limit", h_no_limit, "Skip the final undilated run");
  auto* o_hobj = hull->add_flag("--obj", h_obj, "Also write an OBJ mesh of a 3D hull");

  auto* verify = app.add_subcommand("verify", "Run check suites");
  add_scene(verify, sf_verify);
  std::string v_suite;
  int v_trials = 0, v_size = 0;
  double v_h = 0.0;
  std::vector<double> v_hs;
  auto* o_vsuite = verify->add_option("--suite", v_suite, "Suite name or 'all'");
  auto* o_vtrials = verify->add_option("--trials", v_trials, "Trials or samples per suite");
  auto* o_vsize = verify->add_option("--size", v_size, "Grid size for random-instance suites");
  auto* o_vh = verify->add_option("--h", v_h, "Time step in cells squared for flow-based suites");
  auto* o_vhs = verify->add_option("--hs", v_hs, "Time steps in cells squared for sweeps")->delimiter(',');

  auto* exp = app.add_subcommand("export", "Convert a volume to PGM or OBJ");
  std::string e_in;
  bool e_obj = false, e_pgm = false;
  int e_slice = -1;
  auto* o_ein = exp->add_option("--in", e_in, "MCHV volume");
  auto* o_eobj = exp->add_flag("--obj", e_obj, "Write an OBJ surface mesh (3D)");
  auto* o_epgm = exp->add_flag("--pgm", e_pgm, "Write a PGM image (z-slice in 3D)");
  auto* o_eslice = exp->add_option("--slice", e_slice, "z-slice for PGM export of a 3D volume");

  std::vector<std::string> argv_store{"mchull"};
  argv_store.insert(argv_store.end(), args.begin(), args.end());
  std::vector<const char*> argv;
  for (const auto& a : argv_store) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp&) {
    throw HelpRequested{app.help()};
  } catch (const CLI::CallForAllHelp&) {
    throw HelpRequested{app.help("", CLI::AppFormatMode::All)};
  } catch (const CLI::ParseError& e) {
    throw PreconditionError(e.what());
  }

  RunConfig cfg;
  std::set<std::string> from_file;
  if (!config.empty()) from_file = load_config_file(cfg, config);
  auto apply = [&](CLI::Option* o, const std::string& key, const std::function<void()>& set) {
    if (o == nullptr || o->count() == 0) return;
    set();
    if (from_file.count(key)) cfg.overrides.push_back(key);
  };

  CLI::App* chosen = nullptr;
  for (auto* s : {shape, flow, hull, verify, exp}) {
    if (s->parsed()) chosen = s;
  }
  if (chosen != nullptr) {
    if (from_file.count("command") && cfg.command != chosen->get_name()) cfg.overrides.push_back("command");
    cfg.command = chosen->get_name();
  }
  if (cfg.command.empty()) throw PreconditionError("a subcommand is required: " + detail::join(command_names()));

  apply(o_grid, "grid.n", [&] { cfg.grid = grid; });
  apply(o_stencil, "stencil", [&] { cfg.stencil = stencil; });
  apply(o_seed, "seed", [&] { cfg.seed = seed; });
  apply(o_out, "out", [&] { cfg.out = out; });
  apply(o_jobs, "jobs", [&] { cfg.jobs = jobs; });

  SceneFlags* sf = chosen == shape ? &sf_shape
                   : chosen == flow ? &sf_flow
                   : chosen == hull ? &sf_hull
                   : chosen == verify ? &sf_verify
                                      : nullptr;
  if (sf != nullptr) {
    apply(sf->o_scene, "scene.kind", [&] { cfg.scene = canonical_scene(sf->scene); });
    apply(sf->o_input, "input", [&] { cfg.input = sf->input; });
    apply(sf->o_dim, "grid.dim", [&] { cfg.dim = sf->dim; });
    apply(sf->o_hw, "grid.half_width", [&] { cfg.half_width = sf->half_width; });
    for (const auto& kv : sf->params) {
      const auto eq = kv.find('=');
      if (eq == std::string::npos || eq == 0) throw PreconditionError("--param expects key=value, got '" + kv + "'");
      const std::string key = kv.substr(0, eq);
      double v = 0.0;
      try {
        v = detail::parse_double(kv.substr(eq + 1));
      } catch (const std::exception&) {
        throw PreconditionError("--param " + key + ": expected a number");
      }
      if (from_file.count("scene.params." + key)) cfg.overrides.push_back("scene.params." + key);
      cfg.scene_params[key] = v;
    }
  }
  apply(o_fh, "flow.h", [&] { cfg.h = f_h; });
  apply(o_fsteps, "flow.max_steps", [&] { cfg.max_steps = f_steps; });
  apply(o_fgamma, "flow.gamma_ref", [&] { cfg.gamma_ref = f_gamma; });
  apply(o_fsnap, "flow.snapshot_every", [&] { cfg.snapshot_every = f_snap; });
  apply(o_heps, "hull.eps", [&] { cfg.eps = h_eps; });
  apply(o_hhs, "hull.hs", [&] { cfg.hs = h_hs; });
  apply(o_hlimit, "hull.grid_limit", [&] { cfg.grid_limit = !h_no_limit; });
  apply(o_hobj, "export.obj", [&] { cfg.obj = h_obj; });
  apply(o_vsuite, "verify.suite", [&] { cfg.suite = v_suite; });
  apply(o_vtrials, "verify.trials", [&] { cfg.trials = v_trials; });
  apply(o_vsize, "verify.size", [&] { cfg.size = v_size; });
  apply(o_vh, "flow.h", [&] { cfg.h = v_h; });
  apply(o_vhs, "hull.hs", [&] { cfg.hs = v_hs; });
  apply(o_ein, "input", [&] { cfg.input = e_in; });
  apply(o_eobj, "export.obj", [&] { cfg.obj = e_obj; });
  apply(o_epgm, "export.pgm", [&] { cfg.pgm = e_pgm; });
  apply(o_eslice, "export.slice", [&] { cfg.slice = e_slice; });

  validate_config(cfg);
  return cfg;
}

namespace detail {

inline void write_file(const std::filesystem::path& p, const std::function<void(std::ostream&)>& body) {
  std::ofstream os(p, std::ios::binary);
  if (!os) throw std::runtime_error("cannot write '" + p.string() + "'");
  body(os);
  if (!os) throw std::runtime_error("failed writing '" + p.string() + "'");
}

inline void write_json(const std::filesystem::path& p, const Json& j) {
  write_file(p, [&](std::ostream& os) { os << j.dump(2) << '\n'; });
}

inline VoxelSet load_volume(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw PreconditionError("cannot open input volume '" + path + "'");
  return read_mchv(is);
}

}  // namespace detail

// Resolves dim and stencil, writes every artifact under cfg.out and returns
// the process exit code. Errors propagate as exceptions.
inline int execute(RunConfig cfg, std::ostream& log = std::cerr) {
  namespace fs = std::filesystem;
  validate_config(cfg);

  VoxelSet base;
  if (!cfg.input.empty()) {
    base = detail::load_volume(cfg.input);
    if (cfg.dim != 0 && cfg.dim != base.spec().dim) throw PreconditionError("grid.dim does not match the input volume");
    cfg.dim = base.spec().dim;
  } else {
    cfg.dim = resolved_dim(cfg);
    SceneSpec s;
    s.kind = cfg.scene;
    s.params = cfg.scene_params;
    s.spec = centered_grid(cfg.dim, cfg.grid, cfg.half_width);
    base = generate(s);
  }
  cfg.stencil = resolved_stencil(cfg, cfg.dim);
  if (!valid_stencil_order(cfg.dim, cfg.stencil)) {
    throw PreconditionError("stencil: invalid order " + std::to_string(cfg.stencil) + " for dim " +
                            std::to_string(cfg.dim) + " (valid: 4, 8, 16, 32 in 2D; 6, 18, 26, 98 in 3D)");
  }
  const GridSpec& g = base.spec();
  const double dx = g.spacing;
  const Stencil st = build_stencil(cfg.dim, cfg.stencil);

  const fs::path out(cfg.out);
  std::error_code ec;
  fs::create_directories(out, ec);
  if (ec) throw std::runtime_error("cannot create output directory '" + cfg.out + "': " + ec.message());
  Json echo = config_json(cfg);
  echo["overrides"] = cfg.overrides;
  detail::write_json(out / "config.json", echo);

  auto write_volume = [&](const std::string& stem, const VoxelSet& e) {
    detail::write_file(out / (stem + ".mchv"), [&](std::ostream& os) { write_mchv(os, e); });
    detail::write_file(out / (stem + ".pgm"), [&](std::ostream& os) { write_pgm(os, e, cfg.slice); });
  };
  auto flow_params = [&](double h_cells, bool keep) {
    FlowParams p;
    p.h = h_cells * dx * dx;
    p.max_steps = cfg.max_steps;
    p.obstacle = base;
    p.initial = VoxelSet::interior(g);
    p.stencil = st;
    p.gamma_ref = cfg.gamma_ref;
    p.keep_sets = keep;
    return p;
  };

  if (cfg.command == "shape") {
    write_volume("obstacle", base);
    Json j;
    j["grid"] = grid_json(g);
    j["measure"] = measure(base);
    j["perimeter"] = perimeter(base, st);
    j["boundary_cells"] = boundary_cells(base).size();
    j["convex_hull_measure"] = measure(convex_hull(base));
    detail::write_json(out / "shape.json", j);
    return kExitOk;
  }

  if (cfg.command == "flow") {
    const Trajectory t = run(flow_params(cfg.h, cfg.snapshot_every > 0));
    detail::write_json(out / "flow.json", trajectory_json(t));
    write_volume("final", t.final_set);
    if (cfg.snapshot_every > 0) {
      for (const auto& s : t.steps) {
        if (s.index % cfg.snapshot_every != 0) continue;
        char name[32];
        std::snprintf(name, sizeof name, "step_%05d.mchv", s.index);
        detail::write_file(out / name, [&](std::ostream& os) { write_mchv(os, s.set); });
      }
    }
    if (!t.stationary) log << "warning: flow stopped at max_steps before becoming stationary\n";
    return kExitOk;
  }

  if (cfg.command == "hull") {
    HullParams p;
    p.obstacle = base;
    for (double e : cfg.eps) p.epsilons.push_back(e * dx);
    for (double h : cfg.hs) p.hs.push_back(h * dx * dx);
    p.grid_limit = cfg.grid_limit;
    p.stencil = st;
    p.max_steps = cfg.max_steps;
    p.gamma_ref = cfg.gamma_ref;
    p.jobs = cfg.jobs;
    const HullReport rep = mean_convex_hull(p);
    detail::write_json(out / "hull.json", hull_json(rep, st));
    write_volume("hull", rep.hull);
    if (cfg.obj && cfg.dim == 3) {
      detail::write_file(out / "hull.obj", [&](std::ostream& os) { write_obj(os, extract_surface(rep.hull)); });
    }
    if (rep.degraded) log << "warning: some runs did not become stationary (report marked degraded)\n";
    return kExitOk;
  }

  if (cfg.command == "export") {
    const std::string stem = fs::path(cfg.input).stem().string();
    const bool obj = cfg.obj || (!cfg.pgm && cfg.dim == 3);
    const bool pgm = cfg.pgm || (!cfg.obj && cfg.dim == 2);
    if (obj) {
      if (cfg.dim != 3) throw PreconditionError("OBJ export needs a 3D volume");
      detail::write_file(out / (stem + ".obj"), [&](std::ostream& os) { write_obj(os, extract_surface(base)); });
    }
    if (pgm) detail::write_file(out / (stem + ".pgm"), [&](std::ostream& os) { write_pgm(os, base, cfg.slice); });
    return kExitOk;
  }

  // verify
  // 'all' covers the exact suites plus the density diagnostic; sweeps and
  // probes run only when named.
  static const std::set<std::string> in_all{"submodularity", "lattice", "comparison", "trajectory", "density"};
  const auto want = [&](const char* s) { return cfg.suite == s || (cfg.suite == "all" && in_all.count(s)); };
  auto trials_or = [&](int d) { return cfg.trials > 0 ? cfg.trials : d; };
  std::vector<CheckReport> reports;
  if (want("submodularity")) {
    if (cfg.suite == "all" || cfg.dim == 2) {
      reports.push_back(check_submodularity(trials_or(1000), cfg.size > 0 ? cfg.size : 32, cfg.seed, 2, 0, cfg.jobs));
    }
    if (cfg.suite == "all" || cfg.dim == 3) {
      reports.push_back(check_submodularity(trials_or(1000) / 2, cfg.size > 0 ? std::min(cfg.size, 16) : 16,
                                            cfg.seed + 1, 3, 0, cfg.jobs));
    }
  }
  if (want("lattice")) reports.push_back(check_lattice(trials_or(2000), cfg.seed, cfg.jobs));
  if (want("comparison")) {
    reports.push_back(check_comparison(trials_or(500), cfg.seed, cfg.size > 0 ? cfg.size : 24, cfg.jobs));
  }
  std::optional<Trajectory> traj;
  auto flow_once = [&]() -> const Trajectory& {
    if (!traj) traj = run(flow_params(cfg.h, true));
    return *traj;
  };
  if (want("trajectory")) reports.push_back(check_trajectory(flow_once()));
  if (want("density")) {
    const Trajectory& t = flow_once();
    reports.push_back(check_density(t.final_set, st, t.params.h, trials_or(200), cfg.seed));
  }
  if (want("holder")) reports.push_back(check_holder(flow_once()));
  if (want("minimizing_hull")) {
    reports.push_back(check_minimizing_hull(base, st, trials_or(200), {2 * dx, 4 * dx, 8 * dx}, cfg.seed));
  }
  if (want("displacement")) {
    std::vector<double> hs;
    for (double h : cfg.hs) hs.push_back(h * dx * dx);
    reports.push_back(check_displacement(base, VoxelSet::interior(g), hs, st, cfg.jobs).report);
  }
  if (want("h_monotone")) {
    std::vector<double> hs;
    for (double h : cfg.hs) hs.push_back(h * dx * dx);
    reports.push_back(check_h_monotone(base, 0.0, hs, st, cfg.jobs));
  }
  Json arr = Json::array();
  bool exact_failed = false;
  for (const auto& r : reports) {
    arr.push_back(check_json(r));
    exact_failed = exact_failed || (r.mode == "exact" && !r.pass);
    log << r.name << ": " << (r.pass ? "pass" : (r.inconclusive ? "inconclusive" : "FAIL")) << " (" << r.trials
        << " trials, " << r.violations << " violations)\n";
  }
  detail::write_json(out / "verify.json", arr);
  return exact_failed ? kExitCheckFailed : kExitOk;
}

inline int run_cli(const std::vector<std::string>& args, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
  RunConfig cfg;
  try {
    cfg = parse_config(args);
  } catch (const HelpRequested& h) {
    out << h.text;
    return kExitOk;
  } catch (const PreconditionError& e) {
    err << "mchull: " << e.what() << '\n';
    return kExitUsage;
  }
  try {
    return execute(cfg, err);
  } catch (const PreconditionError& e) {
    err << "mchull: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "mchull: " << e.what() << '\n';
    return kExitRuntime;
  }
}

}  // namespace mchull
