#include <gtest/gtest.h>

#include <cmath>

#include "mchull/flow.hpp"
#include "mchull/scenes.hpp"

using namespace mchull;

namespace {

VoxelSet disk(const GridSpec& g, double r) {
  return VoxelSet::rasterize(g, [&](const auto& c) { return c[0] * c[0] + c[1] * c[1] <= r * r; });
}

FlowParams params(const VoxelSet& obstacle, double h_cells) {
  const GridSpec& g = obstacle.spec();
  FlowParams p;
  p.h = h_cells * g.spacing * g.spacing;
  p.obstacle = obstacle;
  p.initial = VoxelSet::interior(g);
  p.stencil = default_stencil(g.dim);
  return p;
}

}  // namespace

TEST(Flow, HeuristicTimeStep) {
  const GridSpec g = centered_grid(2, 64);
  const double dx = g.spacing;
  EXPECT_NEAR(heuristic_time_step(g, 4.0), 2.25 * dx * dx, 1e-15);
  EXPECT_NEAR(4.0 * std::sqrt(heuristic_time_step(g, 4.0)), 6.0 * dx, 1e-12);
}

TEST(Flow, PhysicalTime) {
  EXPECT_DOUBLE_EQ(physical_time(0, 0.5), 0.0);
  EXPECT_DOUBLE_EQ(physical_time(7, 0.5), 3.5);
  EXPECT_THROW(physical_time(-1, 0.5), PreconditionError);
}

TEST(Flow, RejectsBadParams) {
  const GridSpec g = centered_grid(2, 32);
  const VoxelSet om = disk(g, 0.3);
  FlowParams p = params(om, 16.0);
  EXPECT_NO_THROW(validate_flow_params(p));

  FlowParams bad = p;
  bad.h = 0.0;
  EXPECT_THROW(validate_flow_params(bad), PreconditionError);
  bad = p;
  bad.obstacle = VoxelSet(g);
  EXPECT_THROW(validate_flow_params(bad), PreconditionError);
  bad = p;
  bad.initial = disk(g, 0.2);
  EXPECT_THROW(validate_flow_params(bad), PreconditionError);
  bad = p;
  bad.stencil = default_stencil(3);
  EXPECT_THROW(validate_flow_params(bad), PreconditionError);
  bad = p;
  bad.h = 0.25 * g.spacing * g.spacing;
  EXPECT_THROW(validate_flow_params(bad), PreconditionError);
  bad = p;
  bad.obstacle = VoxelSet::interior(g);
  EXPECT_THROW(validate_flow_params(bad), PreconditionError);
}

TEST(Flow, MaxDisplacementOfConcentricDisks) {
  const GridSpec g = centered_grid(2, 128);
  const VoxelSet outer = disk(g, 0.6), inner = disk(g, 0.4);
  const double d = max_displacement(inner, outer, signed_distance(outer));
  EXPECT_NEAR(d, 0.2, 1.5 * g.spacing);
}

TEST(Flow, TrajectoryIsNestedAndStopsOnObstacleHull) {
  const GridSpec g = centered_grid(2, 48);
  const VoxelSet om = disk(g, 0.35);
  const Trajectory t = run(params(om, 32.0));
  ASSERT_TRUE(t.stationary);
  ASSERT_FALSE(t.steps.empty());
  const VoxelSet* prev = &t.params.initial;
  for (const auto& s : t.steps) {
    EXPECT_TRUE(subset(s.set, *prev));
    EXPECT_TRUE(subset(om, s.set));
    EXPECT_LE(s.perimeter, perimeter(*prev, t.params.stencil) + 1e-9);
    prev = &s.set;
  }
  EXPECT_EQ(t.steps.back().set, t.final_set);
  EXPECT_EQ(t.steps.back().symdiff_prev, 0.0);
  // A disk is its own hull up to a couple of boundary layers.
  EXPECT_LT(symdiff_measure(t.final_set, om), 3.0 * perimeter(om, t.params.stencil) * g.spacing);
}

TEST(Flow, StepTimesAndIndices) {
  const GridSpec g = centered_grid(2, 32);
  const Trajectory t = run(params(disk(g, 0.3), 16.0));
  for (std::size_t i = 0; i < t.steps.size(); ++i) {
    EXPECT_EQ(t.steps[i].index, static_cast<int>(i) + 1);
    EXPECT_DOUBLE_EQ(t.steps[i].time, physical_time(static_cast<int>(i) + 1, t.params.h));
  }
}

TEST(Flow, MaxStepsTruncates) {
  const GridSpec g = centered_grid(2, 48);
  FlowParams p = params(disk(g, 0.2), 9.0);
  p.max_steps = 2;
  const Trajectory t = run(p);
  EXPECT_EQ(t.steps.size(), 2u);
  EXPECT_FALSE(t.stationary);
}

TEST(Flow, KeepSetsOffDropsSnapshots) {
  const GridSpec g = centered_grid(2, 32);
  FlowParams p = params(disk(g, 0.3), 16.0);
  p.keep_sets = false;
  const Trajectory t = run(p);
  ASSERT_FALSE(t.steps.empty());
  for (const auto& s : t.steps) EXPECT_EQ(s.set.size(), 0u);
  FlowParams q = p;
  q.keep_sets = true;
  EXPECT_EQ(run(q).final_set, t.final_set);
}

TEST(Flow, Deterministic) {
  const GridSpec g = centered_grid(3, 24);
  SceneSpec s;
  s.kind = "dumbbell";
  s.spec = g;
  const FlowParams p = params(generate(s), 16.0);
  const Trajectory a = run(p), b = run(p);
  ASSERT_EQ(a.steps.size(), b.steps.size());
  for (std::size_t i = 0; i < a.steps.size(); ++i) {
    EXPECT_EQ(a.steps[i].set, b.steps[i].set);
    EXPECT_EQ(a.steps[i].energy, b.steps[i].energy);
  }
}

// Ordered obstacles give step-wise ordered trajectories.
TEST(Flow, ComparisonInObstacle) {
  const GridSpec g = centered_grid(2, 48);
  for (double r : {0.15, 0.25}) {
    const VoxelSet small = disk(g, r);
    const VoxelSet large = set_union(small, translate(small, {6, 2, 0}));
    const Trajectory a = run(params(small, 16.0)), b = run(params(large, 16.0));
    const std::size_t n = std::max(a.steps.size(), b.steps.size());
    for (std::size_t i = 0; i < n; ++i) {
      const auto& sa = a.steps[std::min(i, a.steps.size() - 1)].set;
      const auto& sb = b.steps[std::min(i, b.steps.size() - 1)].set;
      EXPECT_TRUE(subset(sa, sb)) << "r=" << r << " step " << i;
    }
  }
}

TEST(Flow, PowerFitRecoversExactLaw) {
  const std::vector<double> xs{1, 2, 4, 8, 16};
  std::vector<double> ys;
  for (double x : xs) ys.push_back(3.0 * std::pow(x, 0.5));
  const PowerFit f = fit_power_law(xs, ys);
  EXPECT_NEAR(f.exponent, 0.5, 1e-12);
  EXPECT_NEAR(f.constant, 3.0, 1e-12);
  EXPECT_NEAR(f.r_squared, 1.0, 1e-12);
}

TEST(Flow, Median) {
  EXPECT_DOUBLE_EQ(median({3, 1, 2}), 2.0);
  EXPECT_DOUBLE_EQ(median({4, 1, 3, 2}), 2.5);
}

TEST(Flow, HolderStatsOnRealTrajectory) {
  const GridSpec g = centered_grid(2, 64);
  const Trajectory t = run(params(disk(g, 0.2), 9.0));
  ASSERT_GE(t.transient_steps(), 3u);
  const HolderStats s = holder_stats(t);
  EXPECT_GT(s.pairs, 0u);
  EXPECT_GE(s.c_star, s.median);
  EXPECT_GT(s.median, 0.0);
}
