#pragma once

// Exact Euclidean distance transforms and the signed distance / confinement
// weight used by each flow step.

#include <cmath>
#include <algorithm>
#include <cstdint>
#include <limits>
#include <ostream>
#include <vector>

#include "mchull/error.hpp"
#include "mchull/grid.hpp"

namespace mchull {

struct ScalarField {
  GridSpec spec;
  std::vector<double> values;

  ScalarField() = default;
  explicit ScalarField(const GridSpec& g, double fill = 0.0) : spec(g), values(g.size(), fill) {}

  double operator[](std::size_t i) const { return values[i]; }
  double& operator[](std::size_t i) { return values[i]; }
  std::size_t size() const { return values.size(); }
};

namespace detail {

constexpr std::int64_t kNoSite = std::numeric_limits<std::int64_t>::max();

// 1D lower envelope of parabolas (q - v)^2 + f[v] over sites with finite f.
// All arithmetic is integral; breakpoints are compared as exact fractions.
inline void lower_envelope_1d(const std::vector<std::int64_t>& f, std::vector<std::int64_t>& out,
                              std::vector<int>& v, std::vector<std::int64_t>& zn,
                              std::vector<std::int64_t>& zd) {
  const int n = static_cast<int>(f.size());
  v.resize(n);
  zn.resize(n + 1);
  zd.resize(n + 1);
  int k = -1;
  for (int q = 0; q < n; ++q) {
    if (f[q] == kNoSite) continue;
    while (k >= 0) {
      const int p = v[k];
      const std::int64_t num = (f[q] + std::int64_t(q) * q) - (f[p] + std::int64_t(p) * p);
      const std::int64_t den = 2 * std::int64_t(q - p);
      // Pop while the new breakpoint is at or left of the previous one.
      if (k > 0 && num * zd[k] <= zn[k] * den) {
        --k;
        continue;
      }
      if (k == 0 || num * zd[k] > zn[k] * den) {
        ++k;
        v[k] = q;
        zn[k] = num;
        zd[k] = den;
      }
      break;
    }
    if (k < 0) {
      k = 0;
      v[0] = q;
    }
  }
  if (k < 0) {
    std::fill(out.begin(), out.end(), kNoSite);
    return;
  }
  int j = 0;
  for (int q = 0; q < n; ++q) {
    // Advance while breakpoint j+1 lies strictly left of q.
    while (j < k && zn[j + 1] < std::int64_t(q) * zd[j + 1]) ++j;
    const std::int64_t dq = q - v[j];
    out[q] = dq * dq + f[v[j]];
  }
}

// Squared distance (in cells) from every cell to the nearest cell with
// site[i] != 0; kNoSite where there are no sites at all.
inline std::vector<std::int64_t> squared_edt(const GridSpec& g, const std::vector<std::uint8_t>& site) {
  std::vector<std::int64_t> d(g.size());
  for (std::size_t i = 0; i < d.size(); ++i) d[i] = site[i] ? 0 : kNoSite;
  const auto st = g.strides();
  std::vector<std::int64_t> line, res;
  std::vector<int> v;
  std::vector<std::int64_t> zn, zd;
  for (int axis = 0; axis < g.dim; ++axis) {
    const int n = g.shape[axis];
    line.assign(n, 0);
    res.assign(n, 0);
    // Iterate over all lines parallel to `axis`.
    Index3 lo{0, 0, 0};
    Index3 hi = g.shape;
    hi[axis] = 1;
    for (int z = lo[2]; z < hi[2]; ++z)
      for (int y = lo[1]; y < hi[1]; ++y)
        for (int x = lo[0]; x < hi[0]; ++x) {
          const std::size_t base = g.index(Index3{x, y, z});
          for (int q = 0; q < n; ++q) line[q] = d[base + q * st[axis]];
          lower_envelope_1d(line, res, v, zn, zd);
          for (int q = 0; q < n; ++q) d[base + q * st[axis]] = res[q];
        }
  }
  return d;
}

}  // namespace detail

// Distance from each cell center to the nearest member cell center.
inline ScalarField distance_transform(const VoxelSet& mask) {
  if (mask.empty()) throw PreconditionError("distance_transform: empty mask");
  const GridSpec& g = mask.spec();
  const auto d2 = detail::squared_edt(g, mask.data());
  ScalarField out(g);
  for (std::size_t i = 0; i < d2.size(); ++i) out[i] = std::sqrt(static_cast<double>(d2[i])) * g.spacing;
  return out;
}

// Signed distance with a half-cell interface offset: for members,
// -(dist to nearest non-member - dx/2); for non-members, dist to nearest
// member - dx/2. Frame cells are non-members, so the full interior is valid
// and its interface is the grid frame.
inline ScalarField signed_distance(const VoxelSet& e) {
  if (e.empty()) throw PreconditionError("signed_distance: boundary undefined for an empty set");
  const GridSpec& g = e.spec();
  std::vector<std::uint8_t> outside(e.size());
  for (std::size_t i = 0; i < e.size(); ++i) outside[i] = e.contains(i) ? 0 : 1;
  const auto to_member = detail::squared_edt(g, e.data());
  const auto to_outside = detail::squared_edt(g, outside);
  const double half = 0.5 * g.spacing;
  ScalarField out(g);
  for (std::size_t i = 0; i < e.size(); ++i) {
    if (e.contains(i)) {
      out[i] = -(std::sqrt(static_cast<double>(to_outside[i])) * g.spacing - half);
    } else {
      out[i] = std::sqrt(static_cast<double>(to_member[i])) * g.spacing - half;
    }
  }
  return out;
}

// u = signed_distance(E_prev) / h.
inline ScalarField confinement_weight(const VoxelSet& e_prev, double h) {
  if (!(h > 0.0) || !std::isfinite(h)) throw PreconditionError("time step h must be positive");
  ScalarField u = signed_distance(e_prev);
  for (auto& x : u.values) x /= h;
  return u;
}

// Cells whose center lies within eps of some member center.
inline VoxelSet dilate(const VoxelSet& e, double eps) {
  if (!(eps >= 0.0) || !std::isfinite(eps)) throw PreconditionError("dilate: eps must be >= 0");
  if (eps == 0.0 || e.empty()) return e;
  const GridSpec& g = e.spec();
  const auto d2 = detail::squared_edt(g, e.data());
  const double r = eps / g.spacing;
  // Slack absorbs rounding when eps is an exact multiple of the spacing.
  const auto limit = static_cast<std::int64_t>(std::floor(r * r * (1.0 + 1e-12)));
  VoxelSet out(g);
  for (std::size_t i = 0; i < d2.size(); ++i) {
    if (d2[i] <= limit) {
      if (g.on_frame(i)) throw PreconditionError("obstacle too large for domain");
      out.insert(i);
    }
  }
  return out;
}

// Whitespace-separated dump, one row of the first axis per line.
inline void write_ascii(std::ostream& os, const ScalarField& f) {
  const GridSpec& g = f.spec;
  for (std::size_t i = 0; i < f.size(); ++i) {
    os << detail::format_double(f[i]);
    os << (((i + 1) % g.shape[0]) == 0 ? '\n' : ' ');
  }
}

}  // namespace mchull
