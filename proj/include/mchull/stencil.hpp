#pragma once

// Discrete perimeter from multi-neighborhood cut weights.
//
// For an offset e_k the pair (x, x + e_k) costs w_k / |e_k| when exactly one
// of its cells is a member. A half-space with unit normal n then has
// perimeter per unit area  sum_k (w_k / |e_k|) |<n, e_k>|  (unit spacing), and
// the weights are solved so this equals 1 for the axis and diagonal normals.

#include <algorithm>
#include <array>
#include <numeric>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <string>
#include <vector>

#include "mchull/error.hpp"
#include "mchull/grid.hpp"

namespace mchull {

struct Stencil {
  int dim = 2;
  int order = 16;
  std::vector<Index3> offsets;
  // Dimensionless; multiply by spacing^(dim-1) for physical units.
  std::vector<double> weights;
  // Max relative deviation of the half-space perimeter from 1 over a dense
  // sweep of normals.
  double isotropy_error = 0.0;

  std::size_t size() const { return offsets.size(); }

  // Largest per-axis component over the offsets.
  int reach() const {
    int r = 0;
    for (const auto& e : offsets) r = std::max({r, std::abs(e[0]), std::abs(e[1]), std::abs(e[2])});
    return r;
  }

  double offset_length(std::size_t k) const {
    const auto& e = offsets[k];
    return std::sqrt(static_cast<double>(e[0] * e[0] + e[1] * e[1] + e[2] * e[2]));
  }

  // Cost of one cut pair for offset k on a unit-spacing grid.
  double pair_cost(std::size_t k) const { return weights[k] / offset_length(k); }

  // Half-space perimeter per unit area for unit normal n (unit spacing).
  double halfspace_density(const std::array<double, 3>& n) const {
    double p = 0.0;
    for (std::size_t k = 0; k < size(); ++k) {
      const auto& e = offsets[k];
      p += pair_cost(k) * std::abs(n[0] * e[0] + n[1] * e[1] + n[2] * e[2]);
    }
    return p;
  }
};

namespace detail {

// Unit normals for isotropy sweeps: `n` equally spaced angles in 2D, a
// deterministic Fibonacci sphere in 3D.
inline std::vector<std::array<double, 3>> sample_normals(int dim, int n) {
  std::vector<std::array<double, 3>> out;
  out.reserve(n);
  if (dim == 2) {
    for (int i = 0; i < n; ++i) {
      const double t = 2.0 * std::numbers::pi * i / n;
      out.push_back({std::cos(t), std::sin(t), 0.0});
    }
  } else {
    const double golden = std::numbers::pi * (3.0 - std::sqrt(5.0));
    for (int i = 0; i < n; ++i) {
      const double z = 1.0 - 2.0 * (i + 0.5) / n;
      const double r = std::sqrt(1.0 - z * z);
      out.push_back({r * std::cos(golden * i), r * std::sin(golden * i), z});
    }
  }
  return out;
}

inline double max_isotropy_error(const Stencil& s, const std::vector<std::array<double, 3>>& normals) {
  double worst = 0.0;
  for (const auto& n : normals) worst = std::max(worst, std::abs(s.halfspace_density(n) - 1.0));
  return worst;
}

inline void push_class(Stencil& s, const std::vector<Index3>& offs, double cost) {
  for (const auto& e : offs) {
    s.offsets.push_back(e);
    const double len = std::sqrt(static_cast<double>(e[0] * e[0] + e[1] * e[1] + e[2] * e[2]));
    s.weights.push_back(cost * len);
  }
}

// Order 16 (2D): axis and diagonal normals pin two of the three class costs;
// the knight-move cost is the minimax choice over all normals. The error is
// convex in that cost, so a ternary search finds it.
inline std::array<double, 3> order16_costs() {
  const double r2 = std::numbers::sqrt2;
  auto costs = [r2](double ck) {
    // axis:  ca + 2 cd + 6 ck = 1 ; diagonal: (2 ca + 2 cd + 8 ck) / sqrt2 = 1
    const double cd = (1.0 - 6.0 * ck) - (1.0 / r2 - 4.0 * ck);
    const double ca = 1.0 / r2 - 4.0 * ck - cd;
    return std::array<double, 3>{ca, cd, ck};
  };
  const std::vector<Index3> axis{{1, 0, 0}, {0, 1, 0}}, diag{{1, 1, 0}, {1, -1, 0}},
      knight{{2, 1, 0}, {1, 2, 0}, {-1, 2, 0}, {2, -1, 0}};
  const auto normals = sample_normals(2, 7200);
  auto error_at = [&](double ck) {
    const auto c = costs(ck);
    Stencil s;
    push_class(s, axis, c[0]);
    push_class(s, diag, c[1]);
    push_class(s, knight, c[2]);
    return max_isotropy_error(s, normals);
  };
  // Feasible range keeps ca, cd >= 0.
  double lo = 0.0, hi = (1.0 - 1.0 / r2) / 2.0;
  for (int it = 0; it < 200; ++it) {
    const double m1 = lo + (hi - lo) / 3.0, m2 = hi - (hi - lo) / 3.0;
    if (error_at(m1) <= error_at(m2)) {
      hi = m2;
    } else {
      lo = m1;
    }
  }
  return costs(0.5 * (lo + hi));
}

// All primitive directions with components in [-m, m] (one per antipodal
// pair), split into cost groups by `group_of` on the sorted absolute
// components. The group costs are solved so that each normal in `exact`
// has density 1.
template <class GroupOf>
void push_shared_classes(Stencil& s, int m, int groups, GroupOf group_of,
                         const std::vector<std::array<double, 3>>& exact) {
  std::vector<std::vector<Index3>> members(groups);
  const int zr = s.dim == 3 ? m : 0;
  for (int z = -zr; z <= zr; ++z)
    for (int y = -m; y <= m; ++y)
      for (int x = -m; x <= m; ++x) {
        const Index3 v{x, y, z};
        if (v == Index3{0, 0, 0}) continue;
        if (std::gcd(std::gcd(std::abs(x), std::abs(y)), std::abs(z)) != 1) continue;
        // Canonical half: last nonzero component positive.
        const int lead = z != 0 ? z : (y != 0 ? y : x);
        if (lead < 0) continue;
        std::array<int, 3> k{std::abs(x), std::abs(y), std::abs(z)};
        std::sort(k.begin(), k.end());
        members[group_of(k)].push_back(v);
      }
  const int n = groups;
  std::vector<std::vector<double>> a(n, std::vector<double>(n + 1, 1.0));
  for (int r = 0; r < n; ++r) {
    for (int g = 0; g < n; ++g) {
      double sum = 0.0;
      for (const auto& e : members[g]) sum += std::abs(exact[r][0] * e[0] + exact[r][1] * e[1] + exact[r][2] * e[2]);
      a[r][g] = sum;
    }
  }
  // Gaussian elimination with partial pivoting on the n x n system.
  for (int c = 0; c < n; ++c) {
    int piv = c;
    for (int r = c + 1; r < n; ++r) {
      if (std::abs(a[r][c]) > std::abs(a[piv][c])) piv = r;
    }
    std::swap(a[c], a[piv]);
    for (int r = 0; r < n; ++r) {
      if (r == c) continue;
      const double f = a[r][c] / a[c][c];
      for (int j = c; j <= n; ++j) a[r][j] -= f * a[c][j];
    }
  }
  for (int g = 0; g < n; ++g) push_class(s, members[g], a[g][n] / a[g][g]);
}

}  // namespace detail

// Valid orders: 4, 8, 16 in 2D; 6, 18, 26 in 3D. The extended orders 32 (2D,
// offsets up to 3 cells) and 98 (3D, all primitive offsets within 2 cells)
// trade speed for more facet directions.
inline Stencil build_stencil(int dim, int order) {
  Stencil s;
  s.dim = dim;
  s.order = order;
  const double r2 = std::numbers::sqrt2, r3 = std::numbers::sqrt3;
  const std::vector<Index3> axis2{{1, 0, 0}, {0, 1, 0}};
  const std::vector<Index3> diag2{{1, 1, 0}, {1, -1, 0}};
  const std::vector<Index3> knight2{{2, 1, 0}, {1, 2, 0}, {-1, 2, 0}, {2, -1, 0}};
  const std::vector<Index3> axis3{{1, 0, 0}, {0, 1, 0}, {0, 0, 1}};
  const std::vector<Index3> face3{{1, 1, 0}, {1, -1, 0}, {1, 0, 1}, {1, 0, -1}, {0, 1, 1}, {0, 1, -1}};
  const std::vector<Index3> body3{{1, 1, 1}, {1, 1, -1}, {1, -1, 1}, {-1, 1, 1}};

  if (dim == 2 && order == 4) {
    detail::push_class(s, axis2, 1.0);
  } else if (dim == 2 && order == 8) {
    detail::push_class(s, axis2, r2 - 1.0);
    detail::push_class(s, diag2, 1.0 - 1.0 / r2);
  } else if (dim == 2 && order == 16) {
    static const std::array<double, 3> c = detail::order16_costs();
    detail::push_class(s, axis2, c[0]);
    detail::push_class(s, diag2, c[1]);
    detail::push_class(s, knight2, c[2]);
  } else if (dim == 3 && order == 6) {
    detail::push_class(s, axis3, 1.0);
  } else if (dim == 3 && order == 18) {
    // Axis and body-diagonal normals exact (the face-diagonal equation
    // would force a negative axis cost).
    detail::push_class(s, axis3, (2.0 * r3 - 3.0) / 3.0);
    detail::push_class(s, face3, (3.0 - r3) / 6.0);
  } else if (dim == 3 && order == 26) {
    // Exact for axis, face-diagonal and body-diagonal normals:
    //   ca + 4 cf + 4 cb = 1
    //   (2 ca + 6 cf + 4 cb) / sqrt2 = 1
    //   (3 ca + 6 cf + 6 cb) / sqrt3 = 1
    const double a[3][3] = {{1, 4, 4}, {2 / r2, 6 / r2, 4 / r2}, {3 / r3, 6 / r3, 6 / r3}};
    const double det = a[0][0] * (a[1][1] * a[2][2] - a[1][2] * a[2][1]) -
                       a[0][1] * (a[1][0] * a[2][2] - a[1][2] * a[2][0]) +
                       a[0][2] * (a[1][0] * a[2][1] - a[1][1] * a[2][0]);
    auto cramer = [&](int col) {
      double m[3][3];
      for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) m[i][j] = (j == col) ? 1.0 : a[i][j];
      return (m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) -
              m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0]) +
              m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])) /
             det;
    };
    detail::push_class(s, axis3, cramer(0));
    detail::push_class(s, face3, cramer(1));
    detail::push_class(s, body3, cramer(2));
  } else if (dim == 2 && order == 32) {
    // Axis class plus one shared cost for every other direction; exact for
    // axis and diagonal normals.
    const double h = 1.0 / r2;
    detail::push_shared_classes(
        s, 3, 2, [](const std::array<int, 3>& k) { return k[2] == 1 && k[1] == 0 ? 0 : 1; },
        {{1.0, 0.0, 0.0}, {h, h, 0.0}});
  } else if (dim == 3 && order == 98) {
    // Axis, (0,1,2)-type and one shared cost for the rest; exact for axis,
    // face-diagonal and body-diagonal normals.
    const double h = 1.0 / r2, t = 1.0 / r3;
    detail::push_shared_classes(
        s, 2, 3,
        [](const std::array<int, 3>& k) {
          if (k == std::array<int, 3>{0, 0, 1}) return 0;
          if (k == std::array<int, 3>{0, 1, 2}) return 1;
          return 2;
        },
        {{1.0, 0.0, 0.0}, {h, h, 0.0}, {t, t, t}});
  } else {
    throw PreconditionError("invalid stencil order " + std::to_string(order) + " for dim " +
                            std::to_string(dim) + " (valid: 4, 8, 16, 32 in 2D; 6, 18, 26, 98 in 3D)");
  }
  s.isotropy_error = detail::max_isotropy_error(s, detail::sample_normals(dim, dim == 2 ? 3600 : 20000));
  return s;
}

inline Stencil default_stencil(int dim) { return build_stencil(dim, dim == 2 ? 16 : 26); }

inline bool valid_stencil_order(int dim, int order) {
  return dim == 2 ? (order == 4 || order == 8 || order == 16 || order == 32)
                  : (order == 6 || order == 18 || order == 26 || order == 98);
}

// Linear index deltas of the stencil offsets on a given grid.
inline std::vector<std::ptrdiff_t> linear_offsets(const Stencil& s, const GridSpec& g) {
  const auto st = g.strides();
  std::vector<std::ptrdiff_t> out;
  for (const auto& e : s.offsets) out.push_back(e[0] * st[0] + e[1] * st[1] + e[2] * st[2]);
  return out;
}

// Number of cut pairs per offset. Cells outside the grid count as
// non-members.
inline std::vector<std::int64_t> cut_counts(const VoxelSet& e, const Stencil& s) {
  const GridSpec& g = e.spec();
  if (s.dim != g.dim) throw PreconditionError("stencil/grid dimension mismatch");
  const auto delta = linear_offsets(s, g);
  const int reach = s.reach();
  std::vector<std::int64_t> counts(s.size(), 0);
  e.for_each([&](std::size_t i) {
    const Index3 v = g.coords(i);
    if (g.frame_distance(v) >= reach) {
      for (std::size_t k = 0; k < s.size(); ++k) {
        counts[k] += !e.contains(i + delta[k]);
        counts[k] += !e.contains(i - delta[k]);
      }
    } else {
      for (std::size_t k = 0; k < s.size(); ++k) {
        const auto& o = s.offsets[k];
        counts[k] += !e.contains(Index3{v[0] + o[0], v[1] + o[1], v[2] + o[2]});
        counts[k] += !e.contains(Index3{v[0] - o[0], v[1] - o[1], v[2] - o[2]});
      }
    }
  });
  return counts;
}

// Weighted sum of per-offset counts in physical units.
inline double weighted_cut(const std::vector<std::int64_t>& counts, const Stencil& s, double spacing) {
  double p = 0.0;
  for (std::size_t k = 0; k < s.size(); ++k) p += s.pair_cost(k) * static_cast<double>(counts[k]);
  return p * std::pow(spacing, s.dim - 1);
}

inline double perimeter(const VoxelSet& e, const Stencil& s) {
  return weighted_cut(cut_counts(e, s), s, e.spec().spacing);
}

// Perimeter restricted to pairs whose two cell centers both lie within r of
// the center of cell `center`.
inline double local_perimeter(const VoxelSet& e, const Stencil& s, std::size_t center, double r) {
  const GridSpec& g = e.spec();
  if (s.dim != g.dim) throw PreconditionError("stencil/grid dimension mismatch");
  if (!(r > 0.0)) throw PreconditionError("local_perimeter radius must be positive");
  const Index3 c = g.coords(center);
  const double rc = r / g.spacing;
  const double r2 = rc * rc;
  const int ri = static_cast<int>(std::ceil(rc));
  auto in_ball = [&](const Index3& v) {
    double d2 = 0.0;
    for (int a = 0; a < g.dim; ++a) d2 += double(v[a] - c[a]) * (v[a] - c[a]);
    return d2 <= r2;
  };
  std::vector<std::int64_t> counts(s.size(), 0);
  const int kz = g.dim == 3 ? ri : 0;
  for (int dz = -kz; dz <= kz; ++dz)
    for (int dy = -ri; dy <= ri; ++dy)
      for (int dx = -ri; dx <= ri; ++dx) {
        const Index3 x{c[0] + dx, c[1] + dy, c[2] + dz};
        if (!in_ball(x)) continue;
        const bool mx = e.contains(x);
        for (std::size_t k = 0; k < s.size(); ++k) {
          const auto& o = s.offsets[k];
          const Index3 y{x[0] + o[0], x[1] + o[1], x[2] + o[2]};
          if (in_ball(y) && e.contains(y) != mx) ++counts[k];
        }
      }
  return weighted_cut(counts, s, g.spacing);
}

}  // namespace mchull
