#include <gtest/gtest.h>

#include <set>

#include "mchull/scenes.hpp"
#include "mchull/verify.hpp"

using namespace mchull;

namespace {

VoxelSet disk(const GridSpec& g, double r) {
  return VoxelSet::rasterize(g, [&](const auto& c) { return c[0] * c[0] + c[1] * c[1] <= r * r; });
}

Trajectory disk_flow(int n, double r, double h_cells) {
  const GridSpec g = centered_grid(2, n);
  FlowParams p;
  p.h = h_cells * g.spacing * g.spacing;
  p.obstacle = disk(g, r);
  p.initial = VoxelSet::interior(g);
  p.stencil = default_stencil(2);
  return run(p);
}

}  // namespace

TEST(Seeds, SplitMixReferenceValue) {
  EXPECT_EQ(splitmix64(0), 0xe220a8397b1dcdafULL);
}

TEST(Seeds, TrialSeedsAreDistinctAndStable) {
  std::set<std::uint64_t> seen;
  for (std::uint64_t i = 0; i < 1000; ++i) seen.insert(trial_seed(7, i));
  EXPECT_EQ(seen.size(), 1000u);
  EXPECT_EQ(trial_seed(7, 3), trial_seed(7, 3));
  EXPECT_NE(trial_seed(7, 3), trial_seed(8, 3));
}

TEST(Verify, SubmodularityPasses) {
  const CheckReport a = check_submodularity(60, 16, 1, 2);
  EXPECT_TRUE(a.pass);
  EXPECT_EQ(a.trials, 60);
  EXPECT_EQ(a.mode, "exact");
  EXPECT_LE(a.worst_case, 0.0);
  EXPECT_TRUE(check_submodularity(20, 8, 2, 3).pass);
  EXPECT_TRUE(check_submodularity(20, 12, 3, 2, 32).pass);
  EXPECT_THROW(check_submodularity(1, 65, 1, 2), PreconditionError);
  EXPECT_THROW(check_submodularity(1, 17, 1, 3), PreconditionError);
}

TEST(Verify, SubmodularityJobsIndependent) {
  const CheckReport a = check_submodularity(40, 16, 5, 2, 0, 1), b = check_submodularity(40, 16, 5, 2, 0, 3);
  EXPECT_EQ(a.worst_case, b.worst_case);
  EXPECT_EQ(a.violations, b.violations);
}

TEST(Verify, LatticeAndComparisonPass) {
  const CheckReport l = check_lattice(80, 3);
  EXPECT_TRUE(l.pass);
  EXPECT_EQ(l.worst_case, 0.0);
  EXPECT_TRUE(check_comparison(30, 4, 16).pass);
}

TEST(Verify, TrajectoryPassesAndDetectsTampering) {
  const Trajectory t = disk_flow(40, 0.3, 16.0);
  ASSERT_GE(t.steps.size(), 2u);
  EXPECT_TRUE(check_trajectory(t).pass);

  Trajectory grown = t;
  const auto extra = set_difference(t.params.initial, t.steps[0].set).members();
  ASSERT_FALSE(extra.empty());
  grown.steps[1].set.insert(extra.front());
  EXPECT_FALSE(check_trajectory(grown).pass);

  Trajectory hollow = t;
  hollow.steps.back().set.erase(t.params.obstacle.members().front());
  EXPECT_FALSE(check_trajectory(hollow).pass);

  Trajectory bare = t;
  bare.steps[0].set = VoxelSet();
  EXPECT_THROW(check_trajectory(bare), PreconditionError);
}

TEST(Verify, OrderedTrajectories) {
  const GridSpec g = centered_grid(2, 40);
  FlowParams p;
  p.h = 16 * g.spacing * g.spacing;
  p.obstacle = disk(g, 0.2);
  p.initial = VoxelSet::interior(g);
  p.stencil = default_stencil(2);
  FlowParams q = p;
  q.obstacle = disk(g, 0.35);
  const Trajectory small = run(p), large = run(q);
  EXPECT_TRUE(check_ordered_trajectories(small, large).pass);
  const CheckReport swapped = check_ordered_trajectories(large, small);
  EXPECT_FALSE(swapped.pass);
  EXPECT_GT(swapped.worst_case, 0.0);
}

TEST(Verify, DisplacementPreconditions) {
  const GridSpec g = centered_grid(2, 32);
  const VoxelSet om = disk(g, 0.3), all = VoxelSet::interior(g);
  const double c = g.spacing * g.spacing;
  EXPECT_THROW(check_displacement(om, all, {64 * c, 32 * c, 16 * c}, default_stencil(2)), PreconditionError);
  EXPECT_THROW(check_displacement(om, all, {64 * c, 48 * c, 32 * c, 16 * c}, default_stencil(2)), PreconditionError);
}

TEST(Verify, DisplacementFrozenFlowIsInconclusive) {
  // Starting on the obstacle itself nothing moves.
  const GridSpec g = centered_grid(2, 32);
  const VoxelSet om = VoxelSet::rasterize(g, [](const auto& c) { return std::abs(c[0]) < 0.5 && std::abs(c[1]) < 0.5; });
  const double c = g.spacing * g.spacing;
  const DisplacementSweep sw = check_displacement(om, om, {128 * c, 64 * c, 32 * c, 16 * c}, default_stencil(2));
  EXPECT_TRUE(sw.report.inconclusive);
  EXPECT_FALSE(sw.report.pass);
  EXPECT_FALSE(sw.report.fitted.has_value());
}

TEST(Verify, HolderNeedsTenTransientSteps) {
  const Trajectory t = disk_flow(32, 0.3, 64.0);
  ASSERT_LT(t.transient_steps(), 10u);
  EXPECT_THROW(check_holder(t), PreconditionError);
}

TEST(Verify, DensityOnDiskAndDust) {
  const GridSpec g = centered_grid(2, 96);
  const double h = 1600 * g.spacing * g.spacing;
  const CheckReport ok = check_density(disk(g, 0.5), default_stencil(2), h, 40, 1);
  EXPECT_TRUE(ok.pass);
  EXPECT_GT(ok.trials, 0);
  VoxelSet dust(g);
  for (int y = 4; y < 92; y += 4)
    for (int x = 4; x < 92; x += 4) dust.insert(Index3{x, y, 0});
  EXPECT_FALSE(check_density(dust, default_stencil(2), h, 40, 1).pass);
  EXPECT_TRUE(check_density(disk(g, 0.5), default_stencil(2), 4 * g.spacing * g.spacing, 10, 1).inconclusive);
}

TEST(Verify, MinimizingHullFlagsNotch) {
  const GridSpec g = centered_grid(2, 64);
  const Stencil s = default_stencil(2);
  const VoxelSet round = disk(g, 0.5);
  const std::vector<double> radii{2 * g.spacing, 3 * g.spacing};
  EXPECT_TRUE(check_minimizing_hull(round, s, 200, radii, 1).pass);
  const VoxelSet notched = set_difference(
      round, VoxelSet::rasterize(g, [&](const auto& c) { return std::abs(c[1]) < g.spacing && c[0] > 0.2; }));
  const CheckReport r = check_minimizing_hull(notched, s, 400, radii, 1);
  EXPECT_FALSE(r.pass);
  EXPECT_GT(r.worst_case, 0.0);
}

TEST(Verify, HMonotoneOnSmallHull) {
  const GridSpec g = centered_grid(2, 40);
  SceneSpec sc;
  sc.kind = "l_shape";
  sc.spec = g;
  const double c = g.spacing * g.spacing;
  const CheckReport r = check_h_monotone(generate(sc), g.spacing, {128 * c, 64 * c}, default_stencil(2));
  EXPECT_TRUE(r.pass);
  EXPECT_EQ(r.trials, 1);
  EXPECT_THROW(check_h_monotone(generate(sc), g.spacing, {64 * c}, default_stencil(2)), PreconditionError);
}
