#pragma once

// JSON views of run results. Key order is fixed so equal inputs give
// byte-identical documents.

#include "json.hpp"

#include "mchull/flow.hpp"
#include "mchull/grid.hpp"
#include "mchull/hull.hpp"
#include "mchull/stencil.hpp"
#include "mchull/verify.hpp"

namespace mchull {

using Json = nlohmann::ordered_json;

inline Json grid_json(const GridSpec& g) {
  Json j;
  j["dim"] = g.dim;
  j["shape"] = Json::array();
  j["origin"] = Json::array();
  for (int a = 0; a < g.dim; ++a) {
    j["shape"].push_back(g.shape[a]);
    j["origin"].push_back(g.origin[a]);
  }
  j["spacing"] = g.spacing;
  return j;
}

inline Json stencil_json(const Stencil& s) {
  Json j;
  j["dim"] = s.dim;
  j["order"] = s.order;
  j["isotropy_error"] = s.isotropy_error;
  j["offsets"] = Json::array();
  for (const auto& e : s.offsets) {
    Json o = Json::array();
    for (int a = 0; a < s.dim; ++a) o.push_back(e[a]);
    j["offsets"].push_back(o);
  }
  j["weights"] = s.weights;
  return j;
}

inline Json fit_json(const PowerFit& f) {
  Json j;
  j["exponent"] = f.exponent;
  j["constant"] = f.constant;
  j["r_squared"] = f.r_squared;
  return j;
}

inline Json check_json(const CheckReport& r) {
  Json j;
  j["name"] = r.name;
  j["mode"] = r.mode;
  j["trials"] = r.trials;
  j["violations"] = r.violations;
  j["worst_case"] = r.worst_case;
  j["fitted"] = r.fitted ? fit_json(*r.fitted) : Json(nullptr);
  j["metrics"] = Json::object();
  for (const auto& [k, v] : r.metrics) j["metrics"][k] = v;
  j["inconclusive"] = r.inconclusive;
  j["pass"] = r.pass;
  if (!r.note.empty()) j["note"] = r.note;
  return j;
}

inline Json trajectory_json(const Trajectory& t, const std::optional<PowerFit>& fit = std::nullopt) {
  Json j;
  Json p;
  p["h"] = t.params.h;
  p["max_steps"] = t.params.max_steps;
  p["gamma_ref"] = t.params.gamma_ref;
  p["obstacle_measure"] = measure(t.params.obstacle);
  p["initial_measure"] = measure(t.params.initial);
  p["grid"] = grid_json(t.params.initial.spec());
  p["stencil"] = stencil_json(t.params.stencil);
  j["params"] = p;
  j["steps"] = Json::array();
  for (const auto& s : t.steps) {
    Json e;
    e["i"] = s.index;
    e["t"] = s.time;
    e["energy"] = s.energy;
    e["perimeter"] = s.perimeter;
    e["volume"] = s.volume;
    e["max_displacement"] = s.max_displacement;
    e["symdiff_prev"] = s.symdiff_prev;
    e["nodes"] = s.stats.nodes;
    e["edges"] = s.stats.edges;
    e["augmentations"] = s.stats.augmentations;
    j["steps"].push_back(e);
  }
  j["stationary"] = t.stationary;
  j["final_measure"] = measure(t.final_set);
  j["fitted"] = fit ? fit_json(*fit) : Json(nullptr);
  return j;
}

inline Json convergence_json(const std::vector<ConvergenceEntry>& table) {
  Json out = Json::array();
  for (const auto& c : table) {
    Json e;
    e["eps_a"] = c.eps_a;
    e["h_a"] = c.h_a;
    e["eps_b"] = c.eps_b;
    e["h_b"] = c.h_b;
    e["symdiff"] = c.symdiff;
    e["violation"] = c.violation;
    e["boundary_layer"] = c.boundary_layer;
    out.push_back(e);
  }
  return out;
}

inline Json hull_json(const HullReport& r, const Stencil& s) {
  Json j;
  j["grid"] = grid_json(r.hull.spec());
  j["stencil"] = stencil_json(s);
  j["epsilons"] = r.epsilons;
  j["hs"] = r.hs;
  j["runs"] = Json::array();
  for (const auto& run : r.runs) {
    Json e;
    e["eps"] = run.eps;
    e["h"] = run.h;
    e["steps"] = run.steps;
    e["stationary"] = run.stationary;
    e["volume"] = run.volume;
    e["perimeter"] = run.perimeter;
    e["gap_resolved"] = run.gap_resolved;
    j["runs"].push_back(e);
  }
  j["e_eps_measure"] = Json::array();
  for (const auto& e : r.e_eps) j["e_eps_measure"].push_back(measure(e));
  j["hull_measure"] = measure(r.hull);
  j["h_convergence"] = convergence_json(r.h_table);
  j["eps_convergence"] = convergence_json(r.eps_table);
  j["h_saturated"] = r.h_saturated;
  j["eps_saturated"] = r.eps_saturated;
  j["convergence_monotone"] = r.convergence_monotone;
  j["degraded"] = r.degraded;
  Json c;
  c["symdiff_convex"] = r.symdiff_convex;
  c["symdiff_obstacle"] = r.symdiff_obstacle;
  c["hausdorff_convex"] = r.hausdorff_convex ? Json(*r.hausdorff_convex) : Json(nullptr);
  j["comparison"] = c;
  return j;
}

}  // namespace mchull
