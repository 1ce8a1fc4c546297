#pragma once

// Run configuration: defaults, JSON file layer and validation. Lengths in
// the config are in grid units: eps in cells, h in cells squared.

#include <cstdint>
#include <fstream>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "json.hpp"
#include "mchull/error.hpp"
#include "mchull/scenes.hpp"
#include "mchull/stencil.hpp"

namespace mchull {

struct RunConfig {
  std::string command;
  std::string scene = "ball";
  std::map<std::string, double> scene_params;
  std::string input;  // MCHV volume used instead of a scene
  int dim = 0;        // 0: 2 when the scene has a planar form, else 3
  int grid = 128;
  double half_width = 1.0;
  int stencil = 0;  // 0: 16 in 2D, 26 in 3D

  double h = 128.0;
  int max_steps = 10000;
  double gamma_ref = 4.0;
  int snapshot_every = 0;

  std::vector<double> eps{3.0, 2.0, 1.0};
  std::vector<double> hs{256.0, 128.0};
  bool grid_limit = true;

  std::string suite = "all";
  int trials = 0;  // 0: per-suite default
  int size = 0;    // 0: per-suite default

  bool obj = false;
  bool pgm = false;
  int slice = -1;

  std::uint64_t seed = 0;
  std::string out = "mchull-out";
  int jobs = 1;

  // Keys given in the config file and replaced by a command-line flag.
  std::vector<std::string> overrides;
};

inline const std::vector<std::string>& command_names() {
  static const std::vector<std::string> names{"shape", "flow", "hull", "verify", "export"};
  return names;
}

inline const std::vector<std::string>& suite_names() {
  static const std::vector<std::string> names{"all",          "submodularity", "lattice",  "comparison",
                                              "trajectory",   "minimizing_hull", "density", "displacement",
                                              "holder",       "h_monotone"};
  return names;
}

inline std::string canonical_scene(const std::string& s) { return s == "catenoid" ? "catenoid_region" : s; }

namespace detail {

inline std::string join(const std::vector<std::string>& v) {
  std::string out;
  for (const auto& s : v) out += (out.empty() ? "" : ", ") + s;
  return out;
}

using Json = nlohmann::ordered_json;

inline const Json& typed(const Json& j, const std::string& key, bool (Json::*is)() const noexcept, const char* what) {
  if (!(j.*is)()) throw PreconditionError("config key '" + key + "': expected " + what);
  return j;
}

inline double get_number(const Json& j, const std::string& key) {
  return typed(j, key, &Json::is_number, "a number").get<double>();
}

inline int get_int(const Json& j, const std::string& key) {
  typed(j, key, &Json::is_number_integer, "an integer");
  return j.get<int>();
}

inline bool get_bool(const Json& j, const std::string& key) {
  return typed(j, key, &Json::is_boolean, "a boolean").get<bool>();
}

inline std::string get_string(const Json& j, const std::string& key) {
  return typed(j, key, &Json::is_string, "a string").get<std::string>();
}

inline std::vector<double> get_numbers(const Json& j, const std::string& key) {
  typed(j, key, &Json::is_array, "an array of numbers");
  std::vector<double> out;
  for (const auto& x : j) out.push_back(get_number(x, key));
  return out;
}

inline void reject_unknown(const Json& obj, const std::string& prefix, const std::set<std::string>& known) {
  typed(obj, prefix.empty() ? "<root>" : prefix, &Json::is_object, "an object");
  for (const auto& [k, v] : obj.items()) {
    if (!known.count(k)) throw PreconditionError("unknown config key '" + (prefix.empty() ? k : prefix + "." + k) + "'");
  }
}

}  // namespace detail

// Applies a config document on top of `cfg`; returns the dotted keys it set.
inline std::set<std::string> apply_config_json(RunConfig& cfg, const nlohmann::ordered_json& j) {
  using detail::Json;
  std::set<std::string> seen;
  detail::reject_unknown(j, "", {"command", "scene", "input", "grid", "stencil", "flow", "hull", "verify", "export",
                                 "seed", "out", "jobs"});
  auto has = [&](const Json& o, const char* k) { return o.contains(k); };
  if (has(j, "command")) {
    cfg.command = detail::get_string(j["command"], "command");
    seen.insert("command");
  }
  if (has(j, "scene")) {
    const Json& s = j["scene"];
    detail::reject_unknown(s, "scene", {"kind", "params"});
    if (has(s, "kind")) {
      cfg.scene = canonical_scene(detail::get_string(s["kind"], "scene.kind"));
      seen.insert("scene.kind");
    }
    if (has(s, "params")) {
      detail::typed(s["params"], "scene.params", &Json::is_object, "an object");
      for (const auto& [k, v] : s["params"].items()) {
        cfg.scene_params[k] = detail::get_number(v, "scene.params." + k);
        seen.insert("scene.params." + k);
      }
    }
  }
  if (has(j, "input")) {
    cfg.input = detail::get_string(j["input"], "input");
    seen.insert("input");
  }
  if (has(j, "grid")) {
    const Json& g = j["grid"];
    detail::reject_unknown(g, "grid", {"n", "dim", "half_width"});
    if (has(g, "n")) cfg.grid = detail::get_int(g["n"], "grid.n"), seen.insert("grid.n");
    if (has(g, "dim")) cfg.dim = detail::get_int(g["dim"], "grid.dim"), seen.insert("grid.dim");
    if (has(g, "half_width")) {
      cfg.half_width = detail::get_number(g["half_width"], "grid.half_width");
      seen.insert("grid.half_width");
    }
  }
  if (has(j, "stencil")) cfg.stencil = detail::get_int(j["stencil"], "stencil"), seen.insert("stencil");
  if (has(j, "flow")) {
    const Json& f = j["flow"];
    detail::reject_unknown(f, "flow", {"h", "max_steps", "gamma_ref", "snapshot_every"});
    if (has(f, "h")) cfg.h = detail::get_number(f["h"], "flow.h"), seen.insert("flow.h");
    if (has(f, "max_steps")) cfg.max_steps = detail::get_int(f["max_steps"], "flow.max_steps"), seen.insert("flow.max_steps");
    if (has(f, "gamma_ref")) {
      cfg.gamma_ref = detail::get_number(f["gamma_ref"], "flow.gamma_ref");
      seen.insert("flow.gamma_ref");
    }
    if (has(f, "snapshot_every")) {
      cfg.snapshot_every = detail::get_int(f["snapshot_every"], "flow.snapshot_every");
      seen.insert("flow.snapshot_every");
    }
  }
  if (has(j, "hull")) {
    const Json& h = j["hull"];
    detail::reject_unknown(h, "hull", {"eps", "hs", "grid_limit"});
    if (has(h, "eps")) cfg.eps = detail::get_numbers(h["eps"], "hull.eps"), seen.insert("hull.eps");
    if (has(h, "hs")) cfg.hs = detail::get_numbers(h["hs"], "hull.hs"), seen.insert("hull.hs");
    if (has(h, "grid_limit")) {
      cfg.grid_limit = detail::get_bool(h["grid_limit"], "hull.grid_limit");
      seen.insert("hull.grid_limit");
    }
  }
  if (has(j, "verify")) {
    const Json& v = j["verify"];
    detail::reject_unknown(v, "verify", {"suite", "trials", "size"});
    if (has(v, "suite")) cfg.suite = detail::get_string(v["suite"], "verify.suite"), seen.insert("verify.suite");
    if (has(v, "trials")) cfg.trials = detail::get_int(v["trials"], "verify.trials"), seen.insert("verify.trials");
    if (has(v, "size")) cfg.size = detail::get_int(v["size"], "verify.size"), seen.insert("verify.size");
  }
  if (has(j, "export")) {
    const Json& e = j["export"];
    detail::reject_unknown(e, "export", {"obj", "pgm", "slice"});
    if (has(e, "obj")) cfg.obj = detail::get_bool(e["obj"], "export.obj"), seen.insert("export.obj");
    if (has(e, "pgm")) cfg.pgm = detail::get_bool(e["pgm"], "export.pgm"), seen.insert("export.pgm");
    if (has(e, "slice")) cfg.slice = detail::get_int(e["slice"], "export.slice"), seen.insert("export.slice");
  }
  if (has(j, "seed")) {
    detail::typed(j["seed"], "seed", &Json::is_number_unsigned, "a non-negative integer");
    cfg.seed = j["seed"].get<std::uint64_t>();
    seen.insert("seed");
  }
  if (has(j, "out")) cfg.out = detail::get_string(j["out"], "out"), seen.insert("out");
  if (has(j, "jobs")) cfg.jobs = detail::get_int(j["jobs"], "jobs"), seen.insert("jobs");
  return seen;
}

inline std::set<std::string> load_config_file(RunConfig& cfg, const std::string& path) {
  std::ifstream in(path);
  if (!in) throw PreconditionError("cannot open config file '" + path + "'");
  nlohmann::ordered_json j;
  try {
    j = nlohmann::ordered_json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw PreconditionError("config file '" + path + "' is not valid JSON: " + e.what());
  }
  return apply_config_json(cfg, j);
}

// Dimension the run will use.
inline int resolved_dim(const RunConfig& c) {
  if (c.dim != 0) return c.dim;
  if (!c.input.empty()) return 0;  // taken from the volume
  for (const auto& k : detail::scene_kinds()) {
    if (k.name == c.scene) return k.allow_2d ? 2 : 3;
  }
  return 2;
}

inline int resolved_stencil(const RunConfig& c, int dim) {
  return c.stencil != 0 ? c.stencil : (dim == 2 ? 16 : 26);
}

inline void validate_config(const RunConfig& c) {
  const auto& cmds = command_names();
  if (std::find(cmds.begin(), cmds.end(), c.command) == cmds.end()) {
    throw PreconditionError("command must be one of: " + detail::join(cmds));
  }
  if (c.dim != 0 && c.dim != 2 && c.dim != 3) throw PreconditionError("grid.dim must be 2 or 3");
  if (c.grid < 8 || c.grid > 1024) throw PreconditionError("grid.n must be in [8, 1024]");
  if (!(c.half_width > 0.0)) throw PreconditionError("grid.half_width must be positive");
  if (c.input.empty()) detail::find_kind(c.scene);
  if (c.command == "export" && c.input.empty()) throw PreconditionError("export needs an input volume (--in)");
  const int dim = resolved_dim(c);
  if (c.stencil != 0) {
    const bool ok = dim == 0 ? valid_stencil_order(2, c.stencil) || valid_stencil_order(3, c.stencil)
                             : valid_stencil_order(dim, c.stencil);
    if (!ok) {
      throw PreconditionError("stencil: invalid order " + std::to_string(c.stencil) +
                              " (valid: 4, 8, 16, 32 in 2D; 6, 18, 26, 98 in 3D)");
    }
  }
  if (!(c.h > 0.0)) throw PreconditionError("flow.h must be positive");
  if (c.max_steps < 1) throw PreconditionError("flow.max_steps must be >= 1");
  if (!(c.gamma_ref > 0.0)) throw PreconditionError("flow.gamma_ref must be positive");
  if (c.snapshot_every < 0) throw PreconditionError("flow.snapshot_every must be >= 0");
  const auto& suites = suite_names();
  if (std::find(suites.begin(), suites.end(), c.suite) == suites.end()) {
    throw PreconditionError("verify.suite must be one of: " + detail::join(suites));
  }
  if (c.trials < 0) throw PreconditionError("verify.trials must be >= 0");
  if (c.size < 0) throw PreconditionError("verify.size must be >= 0");
  if (c.jobs < 0) throw PreconditionError("jobs must be >= 0");
  if (c.out.empty()) throw PreconditionError("out must not be empty");
}

inline nlohmann::ordered_json config_json(const RunConfig& c) {
  nlohmann::ordered_json j;
  j["command"] = c.command;
  if (c.input.empty()) {
    j["scene"]["kind"] = c.scene;
    j["scene"]["params"] = nlohmann::ordered_json::object();
    for (const auto& [k, v] : c.scene_params) j["scene"]["params"][k] = v;
  } else {
    j["input"] = c.input;
  }
  j["grid"]["n"] = c.grid;
  j["grid"]["dim"] = c.dim;
  j["grid"]["half_width"] = c.half_width;
  j["stencil"] = c.stencil;
  j["flow"]["h"] = c.h;
  j["flow"]["max_steps"] = c.max_steps;
  j["flow"]["gamma_ref"] = c.gamma_ref;
  j["flow"]["snapshot_every"] = c.snapshot_every;
  j["hull"]["eps"] = c.eps;
  j["hull"]["hs"] = c.hs;
  j["hull"]["grid_limit"] = c.grid_limit;
  j["verify"]["suite"] = c.suite;
  j["verify"]["trials"] = c.trials;
  j["verify"]["size"] = c.size;
  j["export"]["obj"] = c.obj;
  j["export"]["pgm"] = c.pgm;
  j["export"]["slice"] = c.slice;
  j["seed"] = c.seed;
  j["out"] = c.out;
  j["jobs"] = c.jobs;
  return j;
}

}  // namespace mchull
