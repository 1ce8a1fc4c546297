#pragma once

// Executable checks. Exact checks assert with zero tolerance and any
// violation is an implementation defect; statistical checks publish fitted
// values against declared pass bands.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <numbers>
#include <optional>
#include <random>
#include <string>
#include <unordered_set>
#include <vector>

#include "mchull/error.hpp"
#include "mchull/flow.hpp"
#include "mchull/grid.hpp"
#include "mchull/hull.hpp"
#include "mchull/mincut.hpp"
#include "mchull/pool.hpp"
#include "mchull/stencil.hpp"

namespace mchull {

struct CheckReport {
  std::string name;
  std::string mode = "exact";  // "exact" or "statistical"
  std::int64_t trials = 0;
  std::int64_t violations = 0;
  double worst_case = 0.0;
  std::optional<PowerFit> fitted;
  // Extra named numbers (medians, thresholds, counts).
  std::map<std::string, double> metrics;
  bool inconclusive = false;
  bool pass = false;
  std::string note;
};

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Seed of trial `i` under root seed `root`; independent of scheduling.
inline std::uint64_t trial_seed(std::uint64_t root, std::uint64_t i) {
  return splitmix64(splitmix64(root) ^ splitmix64(i + 0x632be59bd9b4e019ULL));
}

namespace detail {

struct TrialOutcome {
  std::int64_t violations = 0;
  double worst = -std::numeric_limits<double>::infinity();
};

inline void merge(CheckReport& r, const std::vector<TrialOutcome>& out) {
  r.trials = static_cast<std::int64_t>(out.size());
  double worst = -std::numeric_limits<double>::infinity();
  for (const auto& o : out) {
    r.violations += o.violations;
    worst = std::max(worst, o.worst);
  }
  r.worst_case = out.empty() ? 0.0 : worst;
}

// Random interior set: either independent cells or a union of random balls.
inline VoxelSet random_set(const GridSpec& g, std::mt19937_64& rng) {
  VoxelSet e(g);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  if (rng() % 2 == 0) {
    const double p = 0.2 + 0.6 * unit(rng);
    for (std::size_t i = 0; i < g.size(); ++i) {
      if (!g.on_frame(i) && unit(rng) < p) e.insert(i);
    }
    return e;
  }
  const int blobs = 1 + static_cast<int>(rng() % 5);
  const double ext = g.shape[0] * g.spacing;
  for (int b = 0; b < blobs; ++b) {
    const std::array<double, 3> c{g.origin[0] + ext * unit(rng), g.origin[1] + ext * unit(rng),
                                  g.dim == 3 ? g.origin[2] + ext * unit(rng) : 0.0};
    const double r = ext * (0.05 + 0.25 * unit(rng));
    for (std::size_t i = 0; i < g.size(); ++i) {
      if (g.on_frame(i)) continue;
      const auto x = g.center(i);
      double d2 = 0.0;
      for (int a = 0; a < g.dim; ++a) d2 += (x[a] - c[a]) * (x[a] - c[a]);
      if (d2 <= r * r) e.insert(i);
    }
  }
  return e;
}

inline const std::vector<int>& orders_for(int dim) {
  static const std::vector<int> o2{4, 8, 16, 32}, o3{6, 18, 26, 98};
  return dim == 2 ? o2 : o3;
}

// Per(a) - Per(b) summed per offset so that equal counts cancel exactly.
inline double perimeter_difference(const std::vector<std::int64_t>& ca, const std::vector<std::int64_t>& cb,
                                   const Stencil& s, double spacing) {
  double d = 0.0;
  for (std::size_t k = 0; k < s.size(); ++k) d += s.pair_cost(k) * static_cast<double>(ca[k] - cb[k]);
  return d * std::pow(spacing, s.dim - 1);
}

}  // namespace detail

// Per(E u F) + Per(E n F) <= Per(E) + Per(F) on random pairs. The defect is
// a sum of (nonnegative cost) x (integer count change) terms, each of which
// must be <= 0, so the comparison is exact.
inline CheckReport check_submodularity(int trials, int size, std::uint64_t seed, int dim = 2, int order = 0,
                                       int jobs = 1) {
  if (dim == 2 && size > 64) throw PreconditionError("submodularity check needs size <= 64 in 2D");
  if (dim == 3 && size > 16) throw PreconditionError("submodularity check needs size <= 16 in 3D");
  if (size < 4) throw PreconditionError("submodularity check needs size >= 4");
  const GridSpec g = centered_grid(dim, size);
  CheckReport r;
  r.name = "submodularity";
  const auto out = parallel_map<detail::TrialOutcome>(trials, jobs, [&](std::size_t t) {
    std::mt19937_64 rng(trial_seed(seed, t));
    const auto& orders = detail::orders_for(dim);
    const Stencil s = build_stencil(dim, order > 0 ? order : orders[rng() % orders.size()]);
    const VoxelSet a = detail::random_set(g, rng), b = detail::random_set(g, rng);
    const auto ca = cut_counts(a, s), cb = cut_counts(b, s);
    const auto cu = cut_counts(set_union(a, b), s), cn = cut_counts(set_intersection(a, b), s);
    detail::TrialOutcome o;
    double defect = 0.0;
    for (std::size_t k = 0; k < s.size(); ++k) {
      const std::int64_t dk = cu[k] + cn[k] - ca[k] - cb[k];
      if (dk > 0) ++o.violations;
      defect += s.pair_cost(k) * static_cast<double>(dk);
    }
    if (defect > 0.0) ++o.violations;
    o.worst = defect * std::pow(g.spacing, dim - 1);
    return o;
  });
  detail::merge(r, out);
  r.pass = r.violations == 0;
  return r;
}

// One-sided minimizing-hull probe: competitors E u B_r(x) for sampled
// boundary cells x. A violation certifies E is not a discrete minimizing
// hull; zero violations prove nothing.
inline CheckReport check_minimizing_hull(const VoxelSet& e, const Stencil& s, int samples,
                                         const std::vector<double>& radii, std::uint64_t seed) {
  const GridSpec& g = e.spec();
  if (s.dim != g.dim) throw PreconditionError("stencil/grid dimension mismatch");
  if (radii.empty()) throw PreconditionError("minimizing-hull check needs at least one radius");
  CheckReport r;
  r.name = "minimizing_hull";
  const auto bnd = boundary_cells(e);
  if (bnd.empty()) {
    r.pass = true;
    r.note = "empty set";
    return r;
  }
  const auto base = cut_counts(e, s);
  const double base_per = weighted_cut(base, s, g.spacing);
  std::mt19937_64 rng(trial_seed(seed, 0));
  double worst = -std::numeric_limits<double>::infinity();
  for (int t = 0; t < samples; ++t) {
    const std::size_t c = bnd[rng() % bnd.size()];
    const auto cc = g.center(c);
    for (double rad : radii) {
      VoxelSet f = e;
      const int ri = static_cast<int>(std::ceil(rad / g.spacing));
      const Index3 v = g.coords(c);
      const int kz = g.dim == 3 ? ri : 0;
      for (int dz = -kz; dz <= kz; ++dz)
        for (int dy = -ri; dy <= ri; ++dy)
          for (int dx = -ri; dx <= ri; ++dx) {
            const Index3 w{v[0] + dx, v[1] + dy, v[2] + dz};
            if (!g.in_bounds(w) || g.on_frame(w)) continue;
            const auto x = g.center(w);
            double d2 = 0.0;
            for (int a = 0; a < g.dim; ++a) d2 += (x[a] - cc[a]) * (x[a] - cc[a]);
            if (d2 <= rad * rad) f.insert(w);
          }
      // Per(E) - Per(F): positive means the competitor is cheaper.
      const double gain = detail::perimeter_difference(base, cut_counts(f, s), s, g.spacing);
      ++r.trials;
      worst = std::max(worst, gain);
      // Differences below the rounding floor of the per-offset sum are ties.
      if (gain > 1e-12 * std::max(1.0, base_per)) ++r.violations;
    }
  }
  r.worst_case = worst;
  r.pass = r.violations == 0;
  return r;
}

namespace detail {

inline StepInstance random_lattice_instance(std::mt19937_64& rng) {
  StepInstance inst;
  const bool three = rng() % 4 == 0;
  GridSpec g;
  g.dim = three ? 3 : 2;
  g.shape = three ? Index3{4, 4, 4} : Index3{6, 6, 1};
  inst.spec = g;
  const bool ties = rng() % 2 == 0;
  const auto& orders = orders_for(g.dim);
  inst.stencil = build_stencil(g.dim, ties ? orders.front() : orders[rng() % orders.size()]);
  inst.u = ScalarField(g, 0.0);
  inst.forced_in = VoxelSet(g);
  std::uniform_int_distribution<int> small(-3, 3);
  std::uniform_real_distribution<double> real(-4.0, 4.0);
  std::bernoulli_distribution force(0.15);
  for (std::size_t i = 0; i < g.size(); ++i) {
    inst.u[i] = ties ? small(rng) : real(rng);
    if (!g.on_frame(i) && force(rng)) inst.forced_in.insert(i);
  }
  return inst;
}

}  // namespace detail

// Graph-cut minimum vs brute force, closure of the minimizer family under
// union and intersection, and e_max / e_min vs the union / intersection of
// all minimizers.
inline CheckReport check_lattice(int trials, std::uint64_t seed, int jobs = 1) {
  CheckReport r;
  r.name = "lattice";
  const auto out = parallel_map<detail::TrialOutcome>(trials, jobs, [&](std::size_t t) {
    std::mt19937_64 rng(trial_seed(seed, t));
    const StepInstance inst = detail::random_lattice_instance(rng);
    const StepSolution sol = solve_extremes(inst);
    const EnumerationResult all = enumerate_minimizer_masks(inst, 16);
    detail::TrialOutcome o;
    o.worst = static_cast<double>(sol.quantized_energy - all.min_energy);
    if (sol.quantized_energy != all.min_energy) ++o.violations;
    std::unordered_set<std::uint32_t> family(all.masks.begin(), all.masks.end());
    std::uint32_t uni = 0, inter = ~0u;
    for (auto a : all.masks) {
      uni |= a;
      inter &= a;
      for (auto b : all.masks) {
        if (!family.count(a | b) || !family.count(a & b)) ++o.violations;
      }
    }
    if (sol.e_max != all.to_set(inst.forced_in, uni)) ++o.violations;
    if (sol.e_min != all.to_set(inst.forced_in, inter)) ++o.violations;
    return o;
  });
  detail::merge(r, out);
  r.pass = r.violations == 0;
  return r;
}

// Weight comparison: u0 >= u1 with shared forcing must give
// e_max(u0) <= e_max(u1) and e_min(u0) <= e_min(u1).
inline CheckReport check_comparison(int trials, std::uint64_t seed, int size = 24, int jobs = 1) {
  CheckReport r;
  r.name = "comparison";
  const GridSpec g = centered_grid(2, size);
  const auto out = parallel_map<detail::TrialOutcome>(trials, jobs, [&](std::size_t t) {
    std::mt19937_64 rng(trial_seed(seed, t));
    StepInstance a;
    a.spec = g;
    const auto& orders = detail::orders_for(2);
    a.stencil = build_stencil(2, orders[rng() % orders.size()]);
    a.u = ScalarField(g, 0.0);
    a.forced_in = VoxelSet(g);
    std::uniform_real_distribution<double> real(-4.0, 4.0), drop(0.0, 2.0);
    std::bernoulli_distribution force(0.05), shift(0.5);
    const double scale = 1.0 / g.spacing;
    for (std::size_t i = 0; i < g.size(); ++i) {
      a.u[i] = real(rng) * scale;
      if (!g.on_frame(i) && force(rng)) a.forced_in.insert(i);
    }
    StepInstance b = a;
    // Either a constant shift or an independent nonnegative decrease per cell.
    const bool constant = shift(rng);
    const double c = drop(rng) * scale;
    for (std::size_t i = 0; i < g.size(); ++i) b.u[i] = a.u[i] - (constant ? c : drop(rng) * scale);
    const StepSolution sa = solve_extremes(a), sb = solve_extremes(b);
    detail::TrialOutcome o;
    const double miss = measure(set_difference(sa.e_max, sb.e_max)) + measure(set_difference(sa.e_min, sb.e_min));
    o.worst = miss;
    if (miss > 0.0) ++o.violations;
    return o;
  });
  detail::merge(r, out);
  r.pass = r.violations == 0;
  return r;
}

// Exact invariants of one trajectory started from data containing the
// obstacle: nested steps, obstacle containment and non-increasing perimeter.
// The perimeter is compared in the solver's integer pair costs, the
// quantity each step provably does not increase; the largest increase of
// the real-valued perimeter is reported as worst_case.
inline CheckReport check_trajectory(const Trajectory& t) {
  CheckReport r;
  r.name = "trajectory";
  const GridSpec& g = t.params.initial.spec();
  const Quantizer q = make_quantizer(t.params.stencil, g);
  auto qper = [&](const VoxelSet& e) {
    const auto c = cut_counts(e, t.params.stencil);
    std::int64_t s = 0;
    for (std::size_t k = 0; k < c.size(); ++k) s += q.pair[k] * c[k];
    return s;
  };
  const VoxelSet* prev = &t.params.initial;
  std::int64_t prev_q = qper(*prev);
  double prev_p = perimeter(*prev, t.params.stencil);
  double worst = -std::numeric_limits<double>::infinity();
  for (const auto& st : t.steps) {
    if (st.set.size() == 0) throw PreconditionError("trajectory was recorded without sets");
    ++r.trials;
    if (!subset(st.set, *prev)) ++r.violations;
    if (!subset(t.params.obstacle, st.set)) ++r.violations;
    const std::int64_t cur_q = qper(st.set);
    if (cur_q > prev_q) ++r.violations;
    worst = std::max(worst, st.perimeter - prev_p);
    prev = &st.set;
    prev_q = cur_q;
    prev_p = st.perimeter;
  }
  r.worst_case = r.trials ? worst : 0.0;
  r.pass = r.violations == 0;
  return r;
}

// Step-wise inclusion of two trajectories whose data are ordered (smaller
// obstacle and initial set, or larger h for the same data). After a
// trajectory stops its final set stands for all later steps.
inline CheckReport check_ordered_trajectories(const Trajectory& small, const Trajectory& large) {
  CheckReport r;
  r.name = "ordered_trajectories";
  const std::size_t n = std::max(small.steps.size(), large.steps.size());
  auto at = [](const Trajectory& t, std::size_t i) -> const VoxelSet& {
    if (!t.stationary && i >= t.steps.size()) throw PreconditionError("non-stationary trajectory is too short");
    const auto& s = t.steps[std::min(i, t.steps.size() - 1)].set;
    if (s.size() == 0) throw PreconditionError("trajectory was recorded without sets");
    return s;
  };
  double worst = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double miss = measure(set_difference(at(small, i), at(large, i)));
    ++r.trials;
    worst = std::max(worst, miss);
    if (miss > 0.0) ++r.violations;
  }
  r.worst_case = worst;
  r.pass = r.violations == 0;
  return r;
}

struct DisplacementSweep {
  std::vector<Trajectory> runs;
  std::vector<double> max_displacement;
  CheckReport report;
};

// Fits max per-step displacement against h over a sweep of time steps.
// Pass band: exponent in [0.4, 0.6] with r^2 >= 0.9.
inline DisplacementSweep check_displacement(const VoxelSet& obstacle, const VoxelSet& initial,
                                            const std::vector<double>& hs, const Stencil& stencil,
                                            int jobs = 1) {
  if (hs.size() < 4) throw PreconditionError("displacement check needs >= 4 h values");
  const auto [lo, hi] = std::minmax_element(hs.begin(), hs.end());
  if (!(*hi >= 8.0 * *lo * (1.0 - 1e-12))) throw PreconditionError("h values must span at least a factor 8");
  DisplacementSweep sw;
  sw.runs = parallel_map<Trajectory>(hs.size(), jobs, [&](std::size_t k) {
    FlowParams p;
    p.h = hs[k];
    p.obstacle = obstacle;
    p.initial = initial;
    p.stencil = stencil;
    return run(p);
  });
  CheckReport& r = sw.report;
  r.name = "displacement";
  r.mode = "statistical";
  r.trials = static_cast<std::int64_t>(hs.size());
  const double dx = obstacle.spec().spacing;
  for (const auto& t : sw.runs) {
    double m = 0.0;
    for (const auto& st : t.steps) m = std::max(m, st.max_displacement);
    sw.max_displacement.push_back(m);
    if (m < dx) r.inconclusive = true;
  }
  if (r.inconclusive) {
    r.note = "flow frozen: max displacement below one cell";
    return sw;
  }
  const PowerFit f = fit_power_law(hs, sw.max_displacement);
  r.fitted = f;
  r.worst_case = *std::max_element(sw.max_displacement.begin(), sw.max_displacement.end());
  r.metrics["gamma"] = f.constant;
  r.pass = f.exponent >= 0.4 && f.exponent <= 0.6 && f.r_squared >= 0.9;
  if (!r.pass) ++r.violations;
  return sw;
}

// Pair ratios symdiff / sqrt(dt): pass iff the maximum C* is finite and
// within twice the median.
inline CheckReport check_holder(const Trajectory& t) {
  if (t.transient_steps() < 10) throw PreconditionError("Holder check needs >= 10 transient steps");
  const HolderStats s = holder_stats(t);
  CheckReport r;
  r.name = "holder";
  r.mode = "statistical";
  r.trials = static_cast<std::int64_t>(s.pairs);
  r.worst_case = s.c_star;
  r.metrics["c_star"] = s.c_star;
  r.metrics["median"] = s.median;
  r.metrics["transient_steps"] = static_cast<double>(t.transient_steps());
  r.pass = std::isfinite(s.c_star) && s.c_star <= 2.0 * s.median;
  if (!r.pass) ++r.violations;
  return r;
}

namespace detail {

inline double unit_ball_volume(int d) {
  return d == 1 ? 2.0 : (d == 2 ? std::numbers::pi : 4.0 * std::numbers::pi / 3.0);
}

}  // namespace detail

// Volume and perimeter density ratios at sampled boundary cells for radii
// in [3 dx, 10 dx] with r <= sqrt(h) / 4. Flat-interface values are
// w_d / 2 and w_{d-1}; pass iff every ratio stays above half of them.
inline CheckReport check_density(const VoxelSet& e, const Stencil& s, double h, int samples, std::uint64_t seed) {
  const GridSpec& g = e.spec();
  if (s.dim != g.dim) throw PreconditionError("stencil/grid dimension mismatch");
  if (!(h > 0.0)) throw PreconditionError("density check needs h > 0");
  CheckReport r;
  r.name = "density";
  r.mode = "statistical";
  std::vector<double> radii;
  for (int k = 3; k <= 10; ++k) {
    if (k * g.spacing <= std::sqrt(h) / 4.0) radii.push_back(k * g.spacing);
  }
  const auto bnd = boundary_cells(e);
  if (radii.empty() || bnd.empty()) {
    r.inconclusive = true;
    r.note = radii.empty() ? "sqrt(h)/4 below 3 cells" : "empty set";
    return r;
  }
  const int d = g.dim;
  const double vol_flat = detail::unit_ball_volume(d) / 2.0, per_flat = detail::unit_ball_volume(d - 1);
  double min_vol = std::numeric_limits<double>::infinity(), min_per = min_vol;
  std::mt19937_64 rng(trial_seed(seed, 0));
  for (int t = 0; t < samples; ++t) {
    const std::size_t c = bnd[rng() % bnd.size()];
    const Index3 v = g.coords(c);
    for (double rad : radii) {
      const double rc = rad / g.spacing;
      const int ri = static_cast<int>(std::ceil(rc));
      std::int64_t inside = 0;
      const int kz = d == 3 ? ri : 0;
      for (int dz = -kz; dz <= kz; ++dz)
        for (int dy = -ri; dy <= ri; ++dy)
          for (int dx = -ri; dx <= ri; ++dx) {
            if (double(dx) * dx + double(dy) * dy + double(dz) * dz > rc * rc) continue;
            if (e.contains(Index3{v[0] + dx, v[1] + dy, v[2] + dz})) ++inside;
          }
      const double vol = static_cast<double>(inside) * g.cell_volume() / std::pow(rad, d);
      const double per = local_perimeter(e, s, c, rad) / std::pow(rad, d - 1);
      min_vol = std::min(min_vol, vol);
      min_per = std::min(min_per, per);
      ++r.trials;
      if (vol < 0.5 * vol_flat || per < 0.5 * per_flat) ++r.violations;
    }
  }
  r.metrics["min_volume_ratio"] = min_vol;
  r.metrics["min_perimeter_ratio"] = min_per;
  r.metrics["volume_flat"] = vol_flat;
  r.metrics["perimeter_flat"] = per_flat;
  r.worst_case = std::min(min_vol / vol_flat, min_per / per_flat);
  r.pass = r.violations == 0;
  return r;
}

// h-monotonicity of the stationary limits in a hull report: for each eps
// and consecutive h_a > h_b, |final(h_a) \ final(h_b)| must stay within
// one boundary layer perimeter(final(h_a)) * dx.
inline CheckReport check_h_monotone(const HullReport& rep) {
  if (rep.hs.size() < 2) throw PreconditionError("h-monotonicity needs >= 2 h values");
  CheckReport r;
  r.name = "h_monotone";
  r.mode = "statistical";
  double worst = 0.0;
  for (const auto& c : rep.h_table) {
    ++r.trials;
    worst = std::max(worst, c.boundary_layer > 0.0 ? c.violation / c.boundary_layer : 0.0);
    if (c.violation > c.boundary_layer) ++r.violations;
  }
  r.worst_case = worst;
  r.metrics["worst_violation_fraction_of_layer"] = worst;
  r.pass = r.violations == 0 && !rep.degraded;
  if (rep.degraded) r.note = "a run did not reach a stationary set";
  return r;
}

inline CheckReport check_h_monotone(const VoxelSet& obstacle, double eps, const std::vector<double>& hs,
                                    const Stencil& stencil, int jobs = 1) {
  if (hs.size() < 2) throw PreconditionError("h-monotonicity needs >= 2 h values");
  HullParams p;
  p.obstacle = obstacle;
  p.stencil = stencil;
  p.hs = hs;
  p.jobs = jobs;
  if (eps > 0.0) {
    p.epsilons = {eps};
    p.grid_limit = false;
  }
  return check_h_monotone(mean_convex_hull(p));
}

}  // namespace mchull
