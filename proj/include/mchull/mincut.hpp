#pragma once

// Exact minimization of  G(E) = Per(E) + sum_{x in E} u(x) dx^dim  over
// forced_in <= E <= interior, by one max-flow computation on integer-scaled
// capacities. Both extreme minimizers come out of the residual graph.

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "mchull/error.hpp"
#include "mchull/grid.hpp"
#include "mchull/maxflow.hpp"
#include "mchull/sdf.hpp"
#include "mchull/stencil.hpp"

namespace mchull {

struct StepInstance {
  GridSpec spec;
  Stencil stencil;
  ScalarField u;
  VoxelSet forced_in;
};

struct SolverStats {
  std::int64_t nodes = 0;
  std::int64_t edges = 0;
  std::int64_t augmentations = 0;
  // Capacities are llround(value * scale); the cheapest pair costs 1e6.
  double scale = 0.0;
};

struct StepSolution {
  VoxelSet e_min;
  VoxelSet e_max;
  double energy = 0.0;
  double flow_value = 0.0;
  std::int64_t quantized_energy = 0;
  SolverStats stats;
};

// Integer image of the energy. Pair costs and bulk terms are rounded
// independently, so the quantized energy is itself a submodular set function
// and its minimizers form a lattice.
struct Quantizer {
  double scale = 0.0;
  double cell_volume = 0.0;
  std::vector<std::int64_t> pair;

  std::int64_t bulk(double u) const {
    const double q = u * cell_volume * scale;
    if (!(std::abs(q) < 4.0e18)) throw PreconditionError("confinement weight too large to quantize");
    return std::llround(q);
  }
};

inline Quantizer make_quantizer(const Stencil& s, const GridSpec& g) {
  Quantizer q;
  const double unit = std::pow(g.spacing, g.dim - 1);
  double min_cost = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < s.size(); ++k) min_cost = std::min(min_cost, s.pair_cost(k) * unit);
  q.scale = 1.0e6 / min_cost;
  q.cell_volume = g.cell_volume();
  for (std::size_t k = 0; k < s.size(); ++k) q.pair.push_back(std::llround(s.pair_cost(k) * unit * q.scale));
  return q;
}

inline void validate_instance(const StepInstance& inst) {
  inst.spec.validate();
  require_same_spec(inst.spec, inst.u.spec);
  require_same_spec(inst.spec, inst.forced_in.spec());
  if (inst.stencil.dim != inst.spec.dim) throw PreconditionError("stencil/grid dimension mismatch");
  if (inst.u.size() != inst.spec.size()) throw PreconditionError("weight field has the wrong size");
  for (double x : inst.u.values) {
    if (!std::isfinite(x)) throw PreconditionError("confinement weight must be finite");
  }
}

inline double step_energy(const VoxelSet& e, const StepInstance& inst) {
  require_same_spec(e.spec(), inst.spec);
  require_same_spec(inst.spec, inst.u.spec);
  double bulk = 0.0;
  e.for_each([&](std::size_t i) { bulk += inst.u[i]; });
  return perimeter(e, inst.stencil) + bulk * inst.spec.cell_volume();
}

inline std::int64_t quantized_energy(const VoxelSet& e, const StepInstance& inst, const Quantizer& q) {
  require_same_spec(e.spec(), inst.spec);
  const auto counts = cut_counts(e, inst.stencil);
  std::int64_t total = 0;
  for (std::size_t k = 0; k < counts.size(); ++k) total += q.pair[k] * counts[k];
  e.for_each([&](std::size_t i) { total += q.bulk(inst.u[i]); });
  return total;
}

inline std::int64_t quantized_energy(const VoxelSet& e, const StepInstance& inst) {
  return quantized_energy(e, inst, make_quantizer(inst.stencil, inst.spec));
}

namespace detail {

// Grid padded by the stencil reach on every used axis so that offsets from
// any real cell stay inside the padded index space.
struct PaddedGrid {
  GridSpec inner;
  Index3 shape{1, 1, 1};
  int pad = 2;

  PaddedGrid(const GridSpec& g, int reach) : inner(g), pad(std::max(reach, 1)) {
    for (int a = 0; a < g.dim; ++a) shape[a] = g.shape[a] + 2 * pad;
  }
  std::size_t size() const { return static_cast<std::size_t>(shape[0]) * shape[1] * shape[2]; }
  std::size_t map(const Index3& v) const {
    const int z = inner.dim == 3 ? v[2] + pad : 0;
    return static_cast<std::size_t>(v[0] + pad) +
           static_cast<std::size_t>(shape[0]) * (static_cast<std::size_t>(v[1] + pad) +
                                                 static_cast<std::size_t>(shape[1]) * z);
  }
  std::ptrdiff_t delta(const Index3& o) const {
    return o[0] + static_cast<std::ptrdiff_t>(shape[0]) * (o[1] + static_cast<std::ptrdiff_t>(shape[1]) * o[2]);
  }
};

}  // namespace detail

inline StepSolution solve_extremes(const StepInstance& inst) {
  validate_instance(inst);
  const GridSpec& g = inst.spec;
  const Stencil& s = inst.stencil;
  const Quantizer q = make_quantizer(s, g);
  for (auto c : q.pair) {
    if (2 * c > std::numeric_limits<GridMaxflow::ArcCap>::max()) {
      throw PreconditionError("stencil weights too disparate for 32-bit arc capacities");
    }
  }

  const detail::PaddedGrid pg(g, s.reach());
  std::vector<std::ptrdiff_t> delta;
  for (const auto& o : s.offsets) {
    delta.push_back(pg.delta(o));
    delta.push_back(-pg.delta(o));
  }

  // Padded-space cell kind: 0 = outside (frame or beyond), 1 = free, 2 = forced.
  std::vector<std::uint8_t> kind(pg.size(), 0);
  std::vector<std::size_t> pad_of(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) {
    const Index3 v = g.coords(i);
    pad_of[i] = pg.map(v);
    if (g.on_frame(v)) continue;
    kind[pad_of[i]] = inst.forced_in.contains(i) ? 2 : 1;
  }

  GridMaxflow graph(pg.size(), delta);
  std::int64_t offset = 0;
  SolverStats stats;
  stats.scale = q.scale;
  const int dirs = static_cast<int>(delta.size());
  for (std::size_t i = 0; i < g.size(); ++i) {
    const std::size_t p = pad_of[i];
    if (kind[p] == 2) {
      offset += q.bulk(inst.u[i]);
      for (int a = 0; a < dirs; ++a) {
        if (kind[p + delta[a]] == 0) offset += q.pair[a / 2];
      }
      continue;
    }
    if (kind[p] != 1) continue;
    graph.add_node(p);
    ++stats.nodes;
    // Cost when x is in E goes on x->sink; cost when x is out goes on source->x.
    std::int64_t src = 0, snk = 0;
    const std::int64_t b = q.bulk(inst.u[i]);
    if (b >= 0) {
      snk += b;
    } else {
      src += -b;
      offset += b;
    }
    for (int a = 0; a < dirs; ++a) {
      const std::uint8_t nk = kind[p + delta[a]];
      const std::int64_t c = q.pair[a / 2];
      if (nk == 1) {
        if (a % 2 == 0) {
          graph.set_pair(p, a, static_cast<GridMaxflow::ArcCap>(c));
          ++stats.edges;
        }
      } else if (nk == 2) {
        src += c;
      } else {
        snk += c;
      }
    }
    graph.add_terminal(p, src, snk);
  }

  const std::int64_t flow = graph.maxflow();
  stats.augmentations = graph.augmentations();
  const auto from_source = graph.source_reachable();
  const auto to_sink = graph.sink_reaching();

  StepSolution sol;
  sol.e_min = inst.forced_in;
  sol.e_max = inst.forced_in;
  for (std::size_t i = 0; i < g.size(); ++i) {
    const std::size_t p = pad_of[i];
    if (kind[p] != 1) continue;
    if (from_source[p]) sol.e_min.insert(i);
    if (!to_sink[p]) sol.e_max.insert(i);
  }
  sol.quantized_energy = flow + offset;
  sol.flow_value = static_cast<double>(flow) / q.scale;
  sol.energy = step_energy(sol.e_max, inst);
  sol.stats = stats;
  return sol;
}

// Brute-force minimizers over all feasible sets: free cells are enumerated
// in Gray-code order with incremental quantized energies.
struct EnumerationResult {
  std::vector<std::size_t> free_cells;
  std::vector<std::uint32_t> masks;  // bit j set = free_cells[j] is a member
  std::int64_t min_energy = 0;

  VoxelSet to_set(const VoxelSet& forced, std::uint32_t mask) const {
    VoxelSet e = forced;
    for (std::size_t j = 0; j < free_cells.size(); ++j) {
      if (mask >> j & 1u) e.insert(free_cells[j]);
    }
    return e;
  }
};

inline EnumerationResult enumerate_minimizer_masks(const StepInstance& inst, int cap) {
  validate_instance(inst);
  if (cap > 24) throw PreconditionError("enumeration cap must be <= 24");
  const GridSpec& g = inst.spec;
  const Stencil& s = inst.stencil;
  const Quantizer q = make_quantizer(s, g);

  EnumerationResult res;
  for (std::size_t i = 0; i < g.size(); ++i) {
    if (!g.on_frame(i) && !inst.forced_in.contains(i)) res.free_cells.push_back(i);
  }
  const int n = static_cast<int>(res.free_cells.size());
  if (n > cap) {
    throw PreconditionError("too many free cells for enumeration (" + std::to_string(n) + " > " +
                            std::to_string(cap) + ")");
  }

  const detail::PaddedGrid pg(g, s.reach());
  std::vector<std::uint8_t> member(pg.size(), 0);
  inst.forced_in.for_each([&](std::size_t i) { member[pg.map(g.coords(i))] = 1; });
  std::vector<std::ptrdiff_t> delta;
  for (const auto& o : s.offsets) delta.push_back(pg.delta(o));
  std::vector<std::size_t> pad;
  std::vector<std::int64_t> bulk;
  for (auto i : res.free_cells) {
    pad.push_back(pg.map(g.coords(i)));
    bulk.push_back(q.bulk(inst.u[i]));
  }

  std::int64_t energy = quantized_energy(inst.forced_in, inst, q);
  res.min_energy = energy;
  res.masks.push_back(0);
  std::uint32_t mask = 0;
  const std::uint64_t total = std::uint64_t{1} << n;
  for (std::uint64_t step = 1; step < total; ++step) {
    const int j = std::countr_zero(step);
    const std::size_t p = pad[j];
    const std::uint8_t was = member[p];
    std::int64_t d = was ? -bulk[j] : bulk[j];
    for (std::size_t k = 0; k < delta.size(); ++k) {
      d += member[p + delta[k]] == was ? q.pair[k] : -q.pair[k];
      d += member[p - delta[k]] == was ? q.pair[k] : -q.pair[k];
    }
    member[p] = static_cast<std::uint8_t>(!was);
    mask ^= 1u << j;
    energy += d;
    if (energy < res.min_energy) {
      res.min_energy = energy;
      res.masks.clear();
    }
    if (energy == res.min_energy) res.masks.push_back(mask);
  }
  return res;
}

inline std::vector<VoxelSet> enumerate_minimizers(const StepInstance& inst, int cap) {
  const auto res = enumerate_minimizer_masks(inst, cap);
  std::vector<VoxelSet> out;
  out.reserve(res.masks.size());
  for (auto m : res.masks) out.push_back(res.to_set(inst.forced_in, m));
  return out;
}

}  // namespace mchull
