#pragma once

// Discrete-in-time flow with an obstacle: each step replaces E_i by the
// maximal minimizer of Per(E) + int u_i chi_E over sets E containing the
// obstacle, where u_i is the signed distance to E_i divided by h.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <vector>

#include "mchull/error.hpp"
#include "mchull/grid.hpp"
#include "mchull/mincut.hpp"
#include "mchull/sdf.hpp"
#include "mchull/stencil.hpp"

namespace mchull {

struct FlowParams {
  double h = 0.0;
  int max_steps = 10000;
  VoxelSet obstacle;
  VoxelSet initial;
  Stencil stencil;
  // Displacement constant for the grid-resolution guard gamma_ref * sqrt(h) >= 3 dx.
  double gamma_ref = 4.0;
  // Keep every step's set in the trajectory (needed for pairwise metrics).
  bool keep_sets = true;
};

struct StepReport {
  int index = 0;
  double time = 0.0;
  VoxelSet set;
  double energy = 0.0;
  double perimeter = 0.0;
  double volume = 0.0;
  double max_displacement = 0.0;
  double symdiff_prev = 0.0;
  SolverStats stats;
};

struct Trajectory {
  FlowParams params;
  std::vector<StepReport> steps;
  VoxelSet final_set;
  bool stationary = false;

  // Steps that changed the set (the last step of a stationary run repeats
  // its predecessor).
  std::size_t transient_steps() const { return steps.size() - (stationary ? 1 : 0); }
};

inline double physical_time(int i, double h) {
  if (i < 0) throw PreconditionError("step index must be >= 0");
  return i * h;
}

// h from gamma_ref * sqrt(h) = 6 dx.
inline double heuristic_time_step(const GridSpec& g, double gamma_ref = 4.0) {
  const double s = 6.0 * g.spacing / gamma_ref;
  return s * s;
}

inline void validate_flow_params(const FlowParams& p) {
  if (!(p.h > 0.0) || !std::isfinite(p.h)) throw PreconditionError("time step h must be positive");
  if (p.max_steps < 1) throw PreconditionError("max_steps must be >= 1");
  const GridSpec& g = p.initial.spec();
  require_same_spec(g, p.obstacle.spec());
  if (p.stencil.dim != g.dim) throw PreconditionError("stencil/grid dimension mismatch");
  if (p.obstacle.empty()) throw PreconditionError("obstacle must be non-empty");
  if (!subset(p.obstacle, p.initial)) throw PreconditionError("obstacle must be contained in the initial set");
  bool near_frame = false;
  p.obstacle.for_each([&](std::size_t i) { near_frame = near_frame || g.frame_distance(g.coords(i)) < 3; });
  if (near_frame) throw PreconditionError("obstacle must stay at least 3 cells from the grid frame");
  if (!(p.gamma_ref > 0.0)) throw PreconditionError("gamma_ref must be positive");
  if (p.gamma_ref * std::sqrt(p.h) < 3.0 * g.spacing * (1.0 - 1e-12)) {
    throw PreconditionError("time step too small for the grid: gamma_ref * sqrt(h) < 3 dx");
  }
}

// Interface displacement seen from the new boundary: for a boundary cell of
// E_next inside E_prev, its depth below the old interface; outside E_prev,
// its distance to E_prev. Both reduce to |sd_prev| -/+ dx/2.
inline double max_displacement(const VoxelSet& e_next, const VoxelSet& e_prev, const ScalarField& sd_prev) {
  const double half = 0.5 * e_next.spec().spacing;
  double worst = 0.0;
  for (auto i : boundary_cells(e_next)) {
    const double d = e_prev.contains(i) ? std::abs(sd_prev[i]) - half : sd_prev[i] + half;
    worst = std::max(worst, d);
  }
  return worst;
}

inline StepReport step(const VoxelSet& e_prev, const FlowParams& p, int index = 1) {
  if (!subset(p.obstacle, e_prev)) throw PreconditionError("previous set must contain the obstacle");
  const GridSpec& g = e_prev.spec();
  StepInstance inst;
  inst.spec = g;
  inst.stencil = p.stencil;
  inst.u = signed_distance(e_prev);
  const ScalarField sd = inst.u;
  for (auto& x : inst.u.values) x /= p.h;
  inst.forced_in = p.obstacle;

  StepSolution sol = solve_extremes(inst);
  StepReport r;
  r.index = index;
  r.time = physical_time(index, p.h);
  r.energy = sol.energy;
  r.perimeter = perimeter(sol.e_max, p.stencil);
  r.volume = measure(sol.e_max);
  r.max_displacement = max_displacement(sol.e_max, e_prev, sd);
  r.symdiff_prev = symdiff_measure(sol.e_max, e_prev);
  r.stats = sol.stats;
  r.set = std::move(sol.e_max);
  return r;
}

inline Trajectory run(const FlowParams& p) {
  validate_flow_params(p);
  Trajectory t;
  t.params = p;
  VoxelSet cur = p.initial;
  for (int i = 1; i <= p.max_steps; ++i) {
    StepReport r = step(cur, p, i);
    const bool same = r.set == cur;
    cur = r.set;
    if (!p.keep_sets) r.set = VoxelSet();
    t.steps.push_back(std::move(r));
    if (same) {
      t.stationary = true;
      break;
    }
  }
  t.final_set = std::move(cur);
  return t;
}

struct PowerFit {
  double exponent = 0.0;
  double constant = 0.0;
  double r_squared = 0.0;
};

// Least squares fit of log y = log C + p log x.
inline PowerFit fit_power_law(const std::vector<double>& xs, const std::vector<double>& ys) {
  if (xs.size() != ys.size() || xs.size() < 2) throw PreconditionError("power-law fit needs >= 2 points");
  const double n = static_cast<double>(xs.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0, syy = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (!(xs[i] > 0.0) || !(ys[i] > 0.0)) throw PreconditionError("power-law fit needs positive data");
    const double lx = std::log(xs[i]), ly = std::log(ys[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
    syy += ly * ly;
  }
  const double vx = sxx - sx * sx / n, vy = syy - sy * sy / n, cxy = sxy - sx * sy / n;
  if (vx <= 0.0) throw PreconditionError("power-law fit needs distinct x values");
  PowerFit f;
  f.exponent = cxy / vx;
  f.constant = std::exp((sy - f.exponent * sx) / n);
  f.r_squared = vy > 0.0 ? cxy * cxy / (vx * vy) : 1.0;
  return f;
}

struct HolderStats {
  double c_star = 0.0;
  double median = 0.0;
  std::size_t pairs = 0;
};

// Ratios symdiff(E_i, E_j) / sqrt(t_j - t_i) over all pairs of the
// transient part of a trajectory, E_0 included.
inline std::vector<double> holder_ratios(const Trajectory& t) {
  std::vector<const VoxelSet*> sets{&t.params.initial};
  for (std::size_t i = 0; i < t.transient_steps(); ++i) {
    if (t.steps[i].set.size() == 0) throw PreconditionError("trajectory was recorded without sets");
    sets.push_back(&t.steps[i].set);
  }
  std::vector<double> out;
  for (std::size_t i = 0; i < sets.size(); ++i) {
    for (std::size_t j = i + 1; j < sets.size(); ++j) {
      const double dt = physical_time(static_cast<int>(j), t.params.h) - physical_time(static_cast<int>(i), t.params.h);
      out.push_back(symdiff_measure(*sets[i], *sets[j]) / std::sqrt(dt));
    }
  }
  return out;
}

inline double median(std::vector<double> v) {
  if (v.empty()) return 0.0;
  const std::size_t m = v.size() / 2;
  std::nth_element(v.begin(), v.begin() + m, v.end());
  const double hi = v[m];
  if (v.size() % 2) return hi;
  return 0.5 * (hi + *std::max_element(v.begin(), v.begin() + m));
}

inline HolderStats holder_stats(const Trajectory& t) {
  const auto r = holder_ratios(t);
  HolderStats s;
  s.pairs = r.size();
  if (r.empty()) return s;
  s.c_star = *std::max_element(r.begin(), r.end());
  s.median = median(r);
  return s;
}

}  // namespace mchull
