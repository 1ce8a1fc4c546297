#pragma once

// Mean-convex hull pipeline (flows against dilated obstacles over schedules
// of eps and h) and an exact convex hull comparator.

#include <algorithm>
#include <array>
#include <cstdint>
#include <optional>
#include <random>
#include <unordered_map>
#include <vector>

#include "mchull/error.hpp"
#include "mchull/flow.hpp"
#include "mchull/grid.hpp"
#include "mchull/pool.hpp"
#include "mchull/sdf.hpp"
#include "mchull/stencil.hpp"

namespace mchull {

namespace detail {

using P2 = std::array<std::int64_t, 2>;
using P3 = std::array<std::int64_t, 3>;

inline std::int64_t cross2(const P2& o, const P2& a, const P2& b) {
  return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0]);
}

inline P3 sub3(const P3& a, const P3& b) { return {a[0] - b[0], a[1] - b[1], a[2] - b[2]}; }

inline P3 cross3(const P3& a, const P3& b) {
  return {a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]};
}

inline std::int64_t dot3(const P3& a, const P3& b) { return a[0] * b[0] + a[1] * b[1] + a[2] * b[2]; }

// Positive when d lies on the side of plane (a, b, c) that its normal
// (b - a) x (c - a) points to.
inline std::int64_t orient3(const P3& a, const P3& b, const P3& c, const P3& d) {
  return dot3(cross3(sub3(b, a), sub3(c, a)), sub3(d, a));
}

inline std::int64_t floor_div(std::int64_t a, std::int64_t b) {
  std::int64_t q = a / b;
  if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
  return q;
}
inline std::int64_t ceil_div(std::int64_t a, std::int64_t b) { return -floor_div(-a, b); }

// Andrew's monotone chain; counter-clockwise, collinear points dropped.
inline std::vector<P2> hull_2d(std::vector<P2> pts) {
  std::sort(pts.begin(), pts.end());
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  if (pts.size() < 3) return pts;
  std::vector<P2> h(2 * pts.size());
  std::size_t k = 0;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    while (k >= 2 && cross2(h[k - 2], h[k - 1], pts[i]) <= 0) --k;
    h[k++] = pts[i];
  }
  for (std::size_t i = pts.size() - 1, t = k + 1; i-- > 0;) {
    while (k >= t && cross2(h[k - 2], h[k - 1], pts[i]) <= 0) --k;
    h[k++] = pts[i];
  }
  h.resize(k - 1);
  return h;
}

// Closed convex polygon membership (any hull size, including degenerate).
inline bool in_hull_2d(const std::vector<P2>& h, const P2& p) {
  if (h.size() == 1) return h[0] == p;
  if (h.size() == 2) {
    if (cross2(h[0], h[1], p) != 0) return false;
    return std::min(h[0][0], h[1][0]) <= p[0] && p[0] <= std::max(h[0][0], h[1][0]) &&
           std::min(h[0][1], h[1][1]) <= p[1] && p[1] <= std::max(h[0][1], h[1][1]);
  }
  for (std::size_t i = 0; i < h.size(); ++i) {
    if (cross2(h[i], h[(i + 1) % h.size()], p) < 0) return false;
  }
  return true;
}

struct Plane {
  P3 n;
  std::int64_t d;  // inside: n . p <= d
};

// Incremental 3D hull with exact integer predicates. A point is added only
// when it is strictly outside some face, so coplanar configurations produce
// a valid (possibly over-triangulated) boundary. Requires four affinely
// independent points at indices i0..i3.
inline std::vector<Plane> hull_3d_planes(const std::vector<P3>& pts, const std::array<std::size_t, 4>& init) {
  struct Face {
    std::array<int, 3> v;
    bool alive;
  };
  std::vector<Face> faces;
  std::unordered_map<std::uint64_t, int> edge_face;
  const std::uint64_t n = pts.size();
  auto key = [n](int u, int v) { return static_cast<std::uint64_t>(u) * n + static_cast<std::uint64_t>(v); };
  auto add_face = [&](int a, int b, int c) {
    faces.push_back({{a, b, c}, true});
    const int id = static_cast<int>(faces.size()) - 1;
    edge_face[key(a, b)] = id;
    edge_face[key(b, c)] = id;
    edge_face[key(c, a)] = id;
  };

  int a = static_cast<int>(init[0]), b = static_cast<int>(init[1]), c = static_cast<int>(init[2]),
      d = static_cast<int>(init[3]);
  if (orient3(pts[a], pts[b], pts[c], pts[d]) > 0) std::swap(b, c);
  // Now d is below face (a, b, c); every face is oriented outward.
  add_face(a, b, c);
  add_face(a, d, b);
  add_face(b, d, c);
  add_face(c, d, a);

  std::vector<std::size_t> order(pts.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::mt19937_64 rng(0x5eed);
  std::shuffle(order.begin(), order.end(), rng);

  std::vector<int> alive;
  std::vector<char> visible;
  std::vector<std::pair<int, int>> horizon;
  for (std::size_t oi : order) {
    const int p = static_cast<int>(oi);
    if (p == a || p == b || p == c || p == d) continue;
    alive.clear();
    visible.assign(faces.size(), 0);
    bool any = false;
    for (std::size_t f = 0; f < faces.size(); ++f) {
      if (!faces[f].alive) continue;
      const auto& v = faces[f].v;
      if (orient3(pts[v[0]], pts[v[1]], pts[v[2]], pts[p]) > 0) {
        visible[f] = 1;
        any = true;
      }
    }
    if (!any) continue;
    horizon.clear();
    for (std::size_t f = 0; f < faces.size(); ++f) {
      if (!visible[f]) continue;
      const auto& v = faces[f].v;
      for (int e = 0; e < 3; ++e) {
        const int u = v[e], w = v[(e + 1) % 3];
        const int twin = edge_face.at(key(w, u));
        if (!visible[twin]) horizon.emplace_back(u, w);
      }
    }
    for (std::size_t f = 0; f < faces.size(); ++f) {
      if (!visible[f]) continue;
      faces[f].alive = false;
      const auto& v = faces[f].v;
      for (int e = 0; e < 3; ++e) {
        auto it = edge_face.find(key(v[e], v[(e + 1) % 3]));
        if (it != edge_face.end() && it->second == static_cast<int>(f)) edge_face.erase(it);
      }
    }
    for (const auto& [u, w] : horizon) add_face(u, w, p);

    // Compact once dead faces dominate.
    std::size_t live = 0;
    for (const auto& f : faces) live += f.alive;
    if (faces.size() > 64 && live * 2 < faces.size()) {
      std::vector<Face> kept;
      for (const auto& f : faces) {
        if (f.alive) kept.push_back(f);
      }
      faces.clear();
      edge_face.clear();
      for (const auto& f : kept) add_face(f.v[0], f.v[1], f.v[2]);
    }
  }

  std::vector<Plane> planes;
  for (const auto& f : faces) {
    if (!f.alive) continue;
    const P3 nrm = cross3(sub3(pts[f.v[1]], pts[f.v[0]]), sub3(pts[f.v[2]], pts[f.v[0]]));
    planes.push_back({nrm, dot3(nrm, pts[f.v[0]])});
  }
  return planes;
}

}  // namespace detail

// Cells whose centers lie in the convex hull of E's member centers. Cell
// centers are an affine image of the integer cell indices, so all tests run
// on integers.
inline VoxelSet convex_hull(const VoxelSet& e) {
  if (e.empty()) throw PreconditionError("convex_hull: empty set");
  const GridSpec& g = e.spec();
  VoxelSet out(g);
  Index3 lo = g.shape, hi{0, 0, 0};
  e.for_each([&](std::size_t i) {
    const Index3 v = g.coords(i);
    for (int a = 0; a < 3; ++a) {
      lo[a] = std::min(lo[a], v[a]);
      hi[a] = std::max(hi[a], v[a]);
    }
  });

  if (g.dim == 2) {
    // Row extremes carry the whole hull.
    std::vector<detail::P2> pts;
    for (int y = lo[1]; y <= hi[1]; ++y) {
      int xmin = -1, xmax = -1;
      for (int x = lo[0]; x <= hi[0]; ++x) {
        if (!e.contains(Index3{x, y, 0})) continue;
        if (xmin < 0) xmin = x;
        xmax = x;
      }
      if (xmin >= 0) {
        pts.push_back({xmin, y});
        pts.push_back({xmax, y});
      }
    }
    const auto h = detail::hull_2d(pts);
    for (int y = lo[1]; y <= hi[1]; ++y)
      for (int x = lo[0]; x <= hi[0]; ++x) {
        if (detail::in_hull_2d(h, {x, y})) out.insert(Index3{x, y, 0});
      }
    return out;
  }

  // Column extremes along z carry the whole hull.
  std::vector<detail::P3> pts;
  for (int y = lo[1]; y <= hi[1]; ++y)
    for (int x = lo[0]; x <= hi[0]; ++x) {
      int zmin = -1, zmax = -1;
      for (int z = lo[2]; z <= hi[2]; ++z) {
        if (!e.contains(Index3{x, y, z})) continue;
        if (zmin < 0) zmin = z;
        zmax = z;
      }
      if (zmin >= 0) {
        pts.push_back({x, y, zmin});
        if (zmax != zmin) pts.push_back({x, y, zmax});
      }
    }

  // Affine dimension of the point set.
  std::size_t i1 = pts.size(), i2 = pts.size(), i3 = pts.size();
  for (std::size_t i = 1; i < pts.size() && i1 == pts.size(); ++i) {
    if (pts[i] != pts[0]) i1 = i;
  }
  detail::P3 nrm{0, 0, 0};
  if (i1 < pts.size()) {
    for (std::size_t i = 1; i < pts.size() && i2 == pts.size(); ++i) {
      const auto c = detail::cross3(detail::sub3(pts[i1], pts[0]), detail::sub3(pts[i], pts[0]));
      if (c != detail::P3{0, 0, 0}) {
        i2 = i;
        nrm = c;
      }
    }
  }
  if (i2 < pts.size()) {
    for (std::size_t i = 1; i < pts.size() && i3 == pts.size(); ++i) {
      if (detail::orient3(pts[0], pts[i1], pts[i2], pts[i]) != 0) i3 = i;
    }
  }

  if (i3 < pts.size()) {
    const auto planes = detail::hull_3d_planes(pts, {0, i1, i2, i3});
    for (int y = lo[1]; y <= hi[1]; ++y)
      for (int x = lo[0]; x <= hi[0]; ++x) {
        std::int64_t zlo = lo[2], zhi = hi[2];
        for (const auto& pl : planes) {
          const std::int64_t r = pl.d - pl.n[0] * x - pl.n[1] * y;
          if (pl.n[2] > 0) {
            zhi = std::min(zhi, detail::floor_div(r, pl.n[2]));
          } else if (pl.n[2] < 0) {
            zlo = std::max(zlo, detail::ceil_div(r, pl.n[2]));
          } else if (r < 0) {
            zhi = zlo - 1;
          }
          if (zhi < zlo) break;
        }
        for (std::int64_t z = zlo; z <= zhi; ++z) out.insert(Index3{x, y, static_cast<int>(z)});
      }
    return out;
  }

  // Degenerate input: a point, a segment, or a planar polygon. Project onto
  // the coordinate plane where the normal has its largest component.
  int drop = 2;
  if (i2 < pts.size()) {
    for (int a = 0; a < 3; ++a) {
      if (std::abs(nrm[a]) > std::abs(nrm[drop])) drop = a;
    }
  } else {
    nrm = {0, 0, 0};
  }
  const int ax = drop == 0 ? 1 : 0, ay = drop == 2 ? 1 : 2;
  std::vector<detail::P2> proj;
  for (const auto& p : pts) proj.push_back({p[ax], p[ay]});
  const auto h = detail::hull_2d(proj);
  for (int z = lo[2]; z <= hi[2]; ++z)
    for (int y = lo[1]; y <= hi[1]; ++y)
      for (int x = lo[0]; x <= hi[0]; ++x) {
        const detail::P3 p{x, y, z};
        const auto rel = detail::sub3(p, pts[0]);
        if (i2 < pts.size()) {
          if (detail::dot3(nrm, rel) != 0) continue;
        } else if (i1 < pts.size()) {
          if (detail::cross3(detail::sub3(pts[i1], pts[0]), rel) != detail::P3{0, 0, 0}) continue;
        }
        if (detail::in_hull_2d(h, {p[ax], p[ay]})) out.insert(Index3{x, y, z});
      }
  return out;
}

struct SetComparison {
  double symdiff = 0.0;
  // Two-sided max distance between boundary cells; absent if either set is empty.
  std::optional<double> hausdorff_boundary;
};

inline SetComparison compare_sets(const VoxelSet& a, const VoxelSet& b) {
  require_same_spec(a.spec(), b.spec());
  SetComparison c;
  c.symdiff = symdiff_measure(a, b);
  if (a.empty() || b.empty()) return c;
  const auto ba = boundary_cells(a), bb = boundary_cells(b);
  VoxelSet ma(a.spec()), mb(b.spec());
  for (auto i : ba) ma.insert(i);
  for (auto i : bb) mb.insert(i);
  const ScalarField da = distance_transform(ma), db = distance_transform(mb);
  double h = 0.0;
  for (auto i : ba) h = std::max(h, db[i]);
  for (auto i : bb) h = std::max(h, da[i]);
  c.hausdorff_boundary = h;
  return c;
}

struct HullParams {
  VoxelSet obstacle;
  // Dilation radii, strictly decreasing, each >= dx.
  std::vector<double> epsilons;
  // Time steps, strictly decreasing.
  std::vector<double> hs;
  // Append a final eps -> 0 entry: below one cell the dilation is the
  // obstacle itself, so this is the grid limit of the eps schedule.
  bool grid_limit = true;
  Stencil stencil;
  int max_steps = 10000;
  double gamma_ref = 4.0;
  int jobs = 1;
};

struct HullRun {
  double eps = 0.0;
  double h = 0.0;
  int steps = 0;
  bool stationary = false;
  double volume = 0.0;
  double perimeter = 0.0;
  // Whether 2 gamma_ref sqrt(h) < eps, i.e. one step cannot jump the eps gap.
  bool gap_resolved = false;
  VoxelSet final_set;
};

struct ConvergenceEntry {
  double eps_a = 0.0, h_a = 0.0, eps_b = 0.0, h_b = 0.0;
  double symdiff = 0.0;
  // Volume where the expected inclusion fails; the direction differs per
  // table (see HullReport).
  double violation = 0.0;
  // Bound used by the h-monotonicity check: perimeter(a) * dx.
  double boundary_layer = 0.0;
};

struct HullReport {
  std::vector<double> epsilons;  // including the grid-limit 0 entry when enabled
  std::vector<double> hs;
  std::vector<HullRun> runs;  // runs[e * hs.size() + k]
  std::vector<VoxelSet> e_eps;
  VoxelSet hull;
  // For fixed eps, consecutive h (h_a > h_b): violation = |final(h_a) \ final(h_b)|.
  std::vector<ConvergenceEntry> h_table;
  // Consecutive eps (eps_a > eps_b): violation = |e_eps(eps_b) \ e_eps(eps_a)|.
  std::vector<ConvergenceEntry> eps_table;
  bool h_saturated = false;
  bool eps_saturated = false;
  bool convergence_monotone = true;
  bool degraded = false;
  double symdiff_convex = 0.0;
  double symdiff_obstacle = 0.0;
  std::optional<double> hausdorff_convex;

  const HullRun& run_at(std::size_t e, std::size_t k) const { return runs[e * hs.size() + k]; }
};

inline void validate_hull_params(const HullParams& p) {
  const GridSpec& g = p.obstacle.spec();
  if (p.obstacle.empty()) throw PreconditionError("hull obstacle must be non-empty");
  if (p.epsilons.empty() && !p.grid_limit) throw PreconditionError("hull needs at least one eps value");
  for (std::size_t i = 0; i < p.epsilons.size(); ++i) {
    if (!(p.epsilons[i] >= g.spacing * (1.0 - 1e-12))) throw PreconditionError("every eps must be >= dx");
    if (i > 0 && !(p.epsilons[i] < p.epsilons[i - 1])) throw PreconditionError("eps values must be strictly decreasing");
  }
  if (p.hs.empty()) throw PreconditionError("hull needs at least one h value");
  for (std::size_t i = 0; i < p.hs.size(); ++i) {
    if (!(p.hs[i] > 0.0)) throw PreconditionError("h values must be positive");
    if (i > 0 && !(p.hs[i] < p.hs[i - 1])) throw PreconditionError("h values must be strictly decreasing");
  }
  if (!p.epsilons.empty()) {
    const VoxelSet big = dilate(p.obstacle, p.epsilons.front());
    bool near = false;
    big.for_each([&](std::size_t i) { near = near || g.frame_distance(g.coords(i)) < 3; });
    if (near) throw PreconditionError("dilated obstacle reaches within 3 cells of the grid frame");
  }
}

inline HullReport mean_convex_hull(const HullParams& p) {
  validate_hull_params(p);
  const GridSpec& g = p.obstacle.spec();
  HullReport rep;
  rep.epsilons = p.epsilons;
  if (p.grid_limit) rep.epsilons.push_back(0.0);
  rep.hs = p.hs;
  const std::size_t ne = rep.epsilons.size(), nh = rep.hs.size();

  std::vector<VoxelSet> obstacles;
  for (double eps : rep.epsilons) obstacles.push_back(dilate(p.obstacle, eps));

  rep.runs = parallel_map<HullRun>(ne * nh, p.jobs, [&](std::size_t idx) {
    const std::size_t e = idx / nh, k = idx % nh;
    FlowParams fp;
    fp.h = rep.hs[k];
    fp.max_steps = p.max_steps;
    fp.obstacle = obstacles[e];
    fp.initial = VoxelSet::interior(g);
    fp.stencil = p.stencil;
    fp.gamma_ref = p.gamma_ref;
    fp.keep_sets = false;
    const Trajectory t = run(fp);
    HullRun r;
    r.eps = rep.epsilons[e];
    r.h = rep.hs[k];
    r.steps = static_cast<int>(t.steps.size());
    r.stationary = t.stationary;
    r.volume = measure(t.final_set);
    r.perimeter = perimeter(t.final_set, p.stencil);
    r.gap_resolved = 2.0 * p.gamma_ref * std::sqrt(r.h) < r.eps;
    r.final_set = t.final_set;
    return r;
  });

  for (const auto& r : rep.runs) rep.degraded = rep.degraded || !r.stationary;
  for (std::size_t e = 0; e < ne; ++e) rep.e_eps.push_back(rep.run_at(e, nh - 1).final_set);
  rep.hull = rep.e_eps.back();

  for (std::size_t e = 0; e < ne; ++e) {
    double prev = -1.0;
    for (std::size_t k = 0; k + 1 < nh; ++k) {
      const auto& a = rep.run_at(e, k);
      const auto& b = rep.run_at(e, k + 1);
      ConvergenceEntry c{a.eps, a.h, b.eps, b.h, symdiff_measure(a.final_set, b.final_set),
                         measure(set_difference(a.final_set, b.final_set)), a.perimeter * g.spacing};
      if (prev >= 0.0 && c.symdiff > prev) rep.convergence_monotone = false;
      prev = c.symdiff;
      rep.h_table.push_back(c);
    }
  }
  double prev = -1.0;
  for (std::size_t e = 0; e + 1 < ne; ++e) {
    const auto& a = rep.run_at(e, nh - 1);
    const auto& b = rep.run_at(e + 1, nh - 1);
    ConvergenceEntry c{a.eps, a.h, b.eps, b.h, symdiff_measure(a.final_set, b.final_set),
                       measure(set_difference(b.final_set, a.final_set)), a.perimeter * g.spacing};
    if (prev >= 0.0 && c.symdiff > prev) rep.convergence_monotone = false;
    prev = c.symdiff;
    rep.eps_table.push_back(c);
  }
  rep.h_saturated = nh >= 2 && rep.h_table.back().symdiff == 0.0;
  rep.eps_saturated = ne >= 2 && rep.eps_table.back().symdiff == 0.0;

  const VoxelSet co = convex_hull(p.obstacle);
  const SetComparison cc = compare_sets(rep.hull, co);
  rep.symdiff_convex = cc.symdiff;
  rep.hausdorff_convex = cc.hausdorff_boundary;
  rep.symdiff_obstacle = symdiff_measure(rep.hull, p.obstacle);
  return rep;
}

}  // namespace mchull
