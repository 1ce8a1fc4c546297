#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "mchull/hull.hpp"
#include "mchull/scenes.hpp"

using namespace mchull;

namespace {

using V = std::array<std::int64_t, 3>;

V sub(const V& a, const V& b) { return {a[0] - b[0], a[1] - b[1], a[2] - b[2]}; }
V cross(const V& a, const V& b) {
  return {a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]};
}
std::int64_t dot(const V& a, const V& b) { return a[0] * b[0] + a[1] * b[1] + a[2] * b[2]; }
bool zero(const V& a) { return a[0] == 0 && a[1] == 0 && a[2] == 0; }

bool on_segment(const V& a, const V& b, const V& p) {
  const V ab = sub(b, a), ap = sub(p, a);
  if (!zero(cross(ab, ap))) return false;
  const std::int64_t t = dot(ab, ap);
  return t >= 0 && t <= dot(ab, ab);
}

bool in_triangle(const V& a, const V& b, const V& c, const V& p) {
  const V n = cross(sub(b, a), sub(c, a));
  if (zero(n) || dot(n, sub(p, a)) != 0) return false;
  return dot(cross(sub(b, a), sub(p, a)), n) >= 0 && dot(cross(sub(c, b), sub(p, b)), n) >= 0 &&
         dot(cross(sub(a, c), sub(p, c)), n) >= 0;
}

bool in_tetra(const V& a, const V& b, const V& c, const V& d, const V& p) {
  const auto o = [](const V& q, const V& r, const V& s, const V& t) { return dot(cross(sub(r, q), sub(s, q)), sub(t, q)); };
  const std::int64_t full = o(a, b, c, d);
  if (full == 0) return false;
  const auto same = [&](std::int64_t x) { return x == 0 || (x > 0) == (full > 0); };
  return same(o(p, b, c, d)) && same(o(a, p, c, d)) && same(o(a, b, p, d)) && same(o(a, b, c, p));
}

// Caratheodory: p is in the hull iff it lies in a simplex spanned by at most
// four of the points (lower-dimensional simplices cover degenerate sets).
bool in_hull_brute(const std::vector<V>& pts, const V& p) {
  const std::size_t n = pts.size();
  for (std::size_t i = 0; i < n; ++i) {
    if (pts[i] == p) return true;
    for (std::size_t j = i + 1; j < n; ++j) {
      if (on_segment(pts[i], pts[j], p)) return true;
      for (std::size_t k = j + 1; k < n; ++k) {
        if (in_triangle(pts[i], pts[j], pts[k], p)) return true;
        for (std::size_t l = k + 1; l < n; ++l) {
          if (in_tetra(pts[i], pts[j], pts[k], pts[l], p)) return true;
        }
      }
    }
  }
  return false;
}

VoxelSet brute_convex_hull(const VoxelSet& e) {
  const GridSpec& g = e.spec();
  std::vector<V> pts;
  e.for_each([&](std::size_t i) {
    const Index3 c = g.coords(i);
    pts.push_back({c[0], c[1], c[2]});
  });
  VoxelSet out(g);
  for (std::size_t i = 0; i < g.size(); ++i) {
    const Index3 c = g.coords(i);
    if (in_hull_brute(pts, {c[0], c[1], c[2]})) out.insert(i);
  }
  return out;
}

VoxelSet random_points(const GridSpec& g, std::mt19937_64& rng, int count, bool planar) {
  VoxelSet e(g);
  std::uniform_int_distribution<int> x(1, g.shape[0] - 2), y(1, g.shape[1] - 2), z(1, std::max(1, g.shape[2] - 2));
  for (int k = 0; k < count; ++k) {
    const int zz = g.dim == 2 ? 0 : (planar ? 3 : z(rng));
    e.insert(Index3{x(rng), y(rng), zz});
  }
  return e;
}

}  // namespace

TEST(ConvexHull, MatchesBruteForce2D) {
  const GridSpec g = centered_grid(2, 16);
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 40; ++trial) {
    const VoxelSet e = random_points(g, rng, 1 + trial % 9, false);
    EXPECT_EQ(convex_hull(e), brute_convex_hull(e)) << "trial " << trial;
  }
}

TEST(ConvexHull, MatchesBruteForce3D) {
  const GridSpec g = centered_grid(3, 9);
  std::mt19937_64 rng(12);
  for (int trial = 0; trial < 30; ++trial) {
    const bool planar = trial % 5 == 0;
    const VoxelSet e = random_points(g, rng, 1 + trial % 8, planar);
    EXPECT_EQ(convex_hull(e), brute_convex_hull(e)) << "trial " << trial;
  }
}

TEST(ConvexHull, CollinearAndSinglePoint3D) {
  const GridSpec g = centered_grid(3, 10);
  VoxelSet e(g);
  e.insert(Index3{2, 2, 2});
  EXPECT_EQ(convex_hull(e), e);
  e.insert(Index3{6, 4, 8});
  const VoxelSet h = convex_hull(e);
  EXPECT_EQ(h, brute_convex_hull(e));
  EXPECT_EQ(h.count(), 3u);  // endpoints and the lattice midpoint
}

TEST(ConvexHull, Idempotent) {
  const GridSpec g = centered_grid(2, 64);
  SceneSpec s;
  s.kind = "star";
  s.spec = g;
  const VoxelSet h = convex_hull(generate(s));
  EXPECT_EQ(convex_hull(h), h);
}

TEST(CompareSets, ShiftedSetHasOneCellHausdorff) {
  const GridSpec g = centered_grid(2, 32);
  const VoxelSet a = VoxelSet::rasterize(g, [](const auto& c) { return std::abs(c[0]) < 0.3 && std::abs(c[1]) < 0.3; });
  const SetComparison same = compare_sets(a, a);
  EXPECT_EQ(same.symdiff, 0.0);
  ASSERT_TRUE(same.hausdorff_boundary);
  EXPECT_EQ(*same.hausdorff_boundary, 0.0);
  const SetComparison c = compare_sets(a, translate(a, {1, 0, 0}));
  EXPECT_NEAR(*c.hausdorff_boundary, g.spacing, 1e-12);
  const double side = std::sqrt(static_cast<double>(a.count()));
  EXPECT_NEAR(c.symdiff, 2.0 * side * g.spacing * g.spacing, 1e-12);
}

TEST(MeanConvexHull, RejectsBadParams) {
  const GridSpec g = centered_grid(2, 32);
  HullParams p;
  p.obstacle = VoxelSet::rasterize(g, [](const auto& c) { return c[0] * c[0] + c[1] * c[1] < 0.09; });
  p.stencil = default_stencil(2);
  p.hs = {16 * g.spacing * g.spacing};
  p.epsilons = {2 * g.spacing, g.spacing};
  EXPECT_NO_THROW(validate_hull_params(p));
  HullParams bad = p;
  bad.epsilons = {g.spacing, 2 * g.spacing};
  EXPECT_THROW(validate_hull_params(bad), PreconditionError);
  bad = p;
  bad.epsilons = {0.5 * g.spacing};
  EXPECT_THROW(validate_hull_params(bad), PreconditionError);
  bad = p;
  bad.hs = {};
  EXPECT_THROW(validate_hull_params(bad), PreconditionError);
  bad = p;
  bad.hs = {1.0, 2.0};
  EXPECT_THROW(validate_hull_params(bad), PreconditionError);
  bad = p;
  bad.epsilons = {0.7};
  EXPECT_THROW(validate_hull_params(bad), PreconditionError);
  bad = p;
  bad.obstacle = VoxelSet(g);
  EXPECT_THROW(validate_hull_params(bad), PreconditionError);
}

TEST(MeanConvexHull, DumbbellIn2DFillsToConvexHull) {
  const GridSpec g = centered_grid(2, 64);
  SceneSpec s;
  s.kind = "dumbbell";
  s.params = {{"radius", 0.25}, {"separation", 0.8}};
  s.spec = g;
  const VoxelSet om = generate(s);
  const double dx = g.spacing;
  HullParams p;
  p.obstacle = om;
  p.epsilons = {2 * dx, dx};
  p.hs = {512 * dx * dx, 256 * dx * dx};
  p.stencil = build_stencil(2, 32);
  const HullReport r = mean_convex_hull(p);

  ASSERT_EQ(r.epsilons.size(), 3u);
  EXPECT_EQ(r.epsilons.back(), 0.0);
  ASSERT_EQ(r.runs.size(), 6u);
  ASSERT_EQ(r.e_eps.size(), 3u);
  EXPECT_EQ(r.hull, r.e_eps.back());
  for (const auto& run : r.runs) EXPECT_TRUE(run.stationary);
  for (const auto& e : r.e_eps) EXPECT_TRUE(subset(om, e));
  EXPECT_FALSE(r.degraded);
  EXPECT_EQ(r.h_table.size(), 3u);
  EXPECT_EQ(r.eps_table.size(), 2u);

  const VoxelSet ch = convex_hull(om);
  EXPECT_NEAR(r.symdiff_convex, symdiff_measure(r.hull, ch), 1e-12);
  EXPECT_NEAR(r.symdiff_obstacle, symdiff_measure(r.hull, om), 1e-12);
  EXPECT_LT(r.symdiff_convex, 0.05 * measure(ch));
  EXPECT_GT(r.symdiff_obstacle, 0.05 * measure(om));
}

TEST(MeanConvexHull, Deterministic) {
  const GridSpec g = centered_grid(2, 40);
  SceneSpec s;
  s.kind = "l_shape";
  s.spec = g;
  HullParams p;
  p.obstacle = generate(s);
  p.epsilons = {g.spacing};
  p.hs = {128 * g.spacing * g.spacing, 64 * g.spacing * g.spacing};
  p.stencil = default_stencil(2);
  const HullReport a = mean_convex_hull(p);
  p.jobs = 2;
  const HullReport b = mean_convex_hull(p);
  EXPECT_EQ(a.hull, b.hull);
  ASSERT_EQ(a.runs.size(), b.runs.size());
  for (std::size_t i = 0; i < a.runs.size(); ++i) EXPECT_EQ(a.runs[i].final_set, b.runs[i].final_set);
}
