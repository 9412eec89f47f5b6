#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "lorentz_ot/dynamics.hpp"
#include "lorentz_ot/errors.hpp"
#include "support.hpp"

namespace lorentz_ot {
namespace {

using testing::ev;
using testing::uniform;

struct Segments {
  std::shared_ptr<const SpacetimeModel> model = make_minkowski(1);
  DiscreteMeasure mu = uniform({ev(0, {0}), ev(0, {1}), ev(0, {2})});
  DiscreteMeasure nu = uniform({ev(2, {0}), ev(2, {1}), ev(2, {2})});
  CostMatrix cost = cost_matrix(*model, mu, nu);
  TransportPlan plan = solve(mu, nu, cost);
  DynamicalCoupling dc = lift(plan, *model, mu, nu);
};

TEST(Lift, OnePathPerSupportPair) {
  const Segments s;
  ASSERT_EQ(s.dc.paths.size(), 3u);
  for (const auto& p : s.dc.paths) {
    EXPECT_EQ(p.source, p.target);
    EXPECT_EQ(p.path.start.x, p.path.end.x);
    EXPECT_DOUBLE_EQ(p.mass, 1.0 / 3.0);
  }
  EXPECT_NEAR(s.dc.total_mass(), 1.0, 1e-15);

  const auto m = make_minkowski(1);
  const DiscreteMeasure x = uniform({ev(0, {0})}), y = uniform({ev(1, {0.2})});
  const DynamicalCoupling dirac = lift(solve(x, y, cost_matrix(*m, x, y)), *m, x, y);
  ASSERT_EQ(dirac.paths.size(), 1u);
  EXPECT_EQ(dirac.paths[0].mass, 1.0);
}

TEST(Interpolate, EndpointsAndMidpoint) {
  const Segments s;
  EXPECT_EQ(interpolate(s.dc, 0.0), s.mu);
  EXPECT_EQ(interpolate(s.dc, 1.0), s.nu);
  const DiscreteMeasure mid = interpolate(s.dc, 0.5);
  ASSERT_EQ(mid.size(), 3);
  for (Index k = 0; k < 3; ++k) {
    EXPECT_EQ(mid.points()[static_cast<std::size_t>(k)], ev(1, {static_cast<double>(k)}));
    EXPECT_DOUBLE_EQ(mid.weights()(k), 1.0 / 3.0);
  }
}

TEST(Interpolate, MergesCoincidentAtoms) {
  const auto m = make_minkowski(1);
  const DiscreteMeasure mu = uniform({ev(0, {0}), ev(0, {2})});
  const DiscreteMeasure nu = uniform({ev(2, {2}), ev(2, {0})});
  TransportPlan crossed;
  crossed.coupling = Eigen::Matrix2d::Identity() / 2.0;
  crossed.counts = CountMatrix::Identity(2, 2);
  crossed.denominator = 2;
  const DynamicalCoupling dc = lift(crossed, *m, mu, nu);
  const DiscreteMeasure mid = interpolate(dc, 0.5);
  ASSERT_EQ(mid.size(), 1);
  EXPECT_EQ(mid.weights()(0), 1.0);
  const double times[] = {0.5};
  EXPECT_EQ(regularity_at(dc, times).crossings, 1);
}

TEST(Restrict, HalfProperTime) {
  const Segments s;
  const RestrictedPlan full = restrict_to(s.dc, 0.0, 1.0);
  EXPECT_EQ(full.plan.coupling, s.plan.coupling);
  EXPECT_NEAR(full.plan.primal_cost, s.plan.primal_cost, 1e-15);
  const RestrictedPlan half = restrict_to(s.dc, 0.0, 0.5);
  EXPECT_NEAR(half.plan.primal_cost, -1.0, 1e-12);
  EXPECT_THROW(restrict_to(s.dc, 0.5, 0.5), InvalidInput);
}

TEST(Restrict, MatchesIndependentSolve) {
  const auto m = make_minkowski(2);
  std::mt19937_64 rng(23);
  std::uniform_real_distribution<double> u(0, 1);
  for (int instance = 0; instance < 5; ++instance) {
    const DiscreteMeasure mu = make_measure(testing::random_events(rng, 5, 0, 0, 2, 0.5), testing::random_counts(rng, 5, 12));
    const DiscreteMeasure nu = make_measure(testing::random_events(rng, 6, 2, 2, 2, 0.5), testing::random_counts(rng, 6, 12));
    const TransportPlan plan = solve(mu, nu, cost_matrix(*m, mu, nu));
    const DynamicalCoupling dc = lift(plan, *m, mu, nu);
    for (int k = 0; k < 20; ++k) {
      double s = u(rng), t = u(rng);
      if (s > t) std::swap(s, t);
      if (t - s < 1e-3) continue;
      const RestrictedPlan r = restrict_to(dc, s, t);
      const TransportPlan again = solve(r.from, r.to, r.cost);
      EXPECT_NEAR(r.plan.primal_cost, again.primal_cost, 1e-8);
      EXPECT_TRUE(((r.plan.coupling.array() > 0) == (again.coupling.array() > 0)).all());
    }
  }
}

TEST(SubCoupling, RenormalizesAndStaysOptimal) {
  const Segments s;
  const std::vector<std::size_t> all{0, 1, 2};
  const DynamicalCoupling same = sub_coupling(s.dc, all);
  EXPECT_EQ(same.mu, s.mu);
  EXPECT_EQ(same.nu, s.nu);
  const std::vector<std::size_t> one{1};
  const DynamicalCoupling single = sub_coupling(s.dc, one);
  ASSERT_EQ(single.paths.size(), 1u);
  EXPECT_EQ(single.paths[0].mass, 1.0);
  const std::vector<std::size_t> two{0, 2};
  const DynamicalCoupling half = sub_coupling(s.dc, two);
  const CostMatrix c = cost_matrix(*s.model, half.mu, half.nu);
  const TransportPlan re = solve(half.mu, half.nu, c);
  const RestrictedPlan own = restrict_to(half, 0.0, 1.0);
  EXPECT_NEAR(own.plan.primal_cost, re.primal_cost, 1e-8);
  EXPECT_THROW(sub_coupling(s.dc, std::span<const std::size_t>{}), InvalidInput);
}

TEST(Regularity, ParallelSegmentsDegenerate) {
  const Segments s;
  const RegularityReport r = regularity_report(s.dc, 0.1);
  EXPECT_TRUE(r.degenerate);
  EXPECT_EQ(r.max_ratio, 0.0);
  EXPECT_EQ(r.crossings, 0);
  EXPECT_EQ(r.fitted_exponent, 0.0);
  EXPECT_THROW(regularity_report(s.dc, 0.6), InvalidInput);
}

TEST(Regularity, HolderConstruction) {
  const HolderExperiment e = holder_sharpness_experiment(64, 0);
  EXPECT_TRUE(e.unique_matching);
  EXPECT_GE(e.report.fitted_exponent, 0.4);
  EXPECT_LE(e.report.fitted_exponent, 0.65);
  EXPECT_EQ(e.report.crossings, 0);
  for (const auto& p : e.coupling.paths) {
    EXPECT_EQ(p.source, p.target);
    EXPECT_NEAR(p.path.end.t - p.path.start.t, 1.0, 0.0);
    EXPECT_NEAR((p.path.end.x - p.path.start.x).norm(), 1.0, 1e-15);
  }
  EXPECT_THROW(holder_sharpness_experiment(8, 0), InvalidInput);
}

TEST(Regularity, HolderRatioStableUnderRefinement) {
  const HolderExperiment coarse = holder_sharpness_experiment(64, 1);
  const HolderExperiment fine = holder_sharpness_experiment(128, 1);
  EXPECT_LE(fine.report.max_ratio, 10.0 * coarse.report.fitted_constant * coarse.report.fitted_constant);
}

TEST(Regularity, InteriorLipschitz) {
  const HolderExperiment e = lipschitz_interior_experiment(64, 0);
  EXPECT_LE(e.report.max_speed_ratio, 0.5);
  EXPECT_GE(e.report.fitted_exponent, 0.9);
  EXPECT_EQ(e.report.crossings, 0);
}

TEST(Shortening, CrossedNullsAndIdentity) {
  const auto m = make_minkowski(1);
  const Geodesic a = m->geodesic(ev(0, {-1}), ev(2, {1}));
  const Geodesic b = m->geodesic(ev(0, {1}), ev(2, {-1}));
  const ShorteningGain g = shortening_gain(*m, a, b, 0.5);
  EXPECT_TRUE(g.applicable);
  EXPECT_EQ(g.gain, -4.0);
  EXPECT_EQ(shortening_gain(*m, a, a, 0.5).gain, 0.0);

  const Geodesic far = m->geodesic(ev(0, {10}), ev(1, {10}));
  EXPECT_FALSE(shortening_gain(*m, a, far, 0.5).applicable);
  const Geodesic p1 = m->geodesic(ev(0, {0}), ev(1, {0}));
  const Geodesic p2 = m->geodesic(ev(0, {0.5}), ev(1, {0.5}));
  // Parallel segments never cross, so swapping endpoints costs extra.
  EXPECT_NEAR(shortening_gain(*m, p1, p2, 0.5).gain, 2.0 - std::sqrt(3.0), 1e-15);
}

TEST(Shortening, RandomCrossingsGainNegatively) {
  const CrossingExperiment e = crossing_experiment(100, 3);
  EXPECT_EQ(e.samples.size(), 100u);
  EXPECT_EQ(e.negative, 100);
  EXPECT_GT(e.kappa, 0.0);
  EXPECT_EQ(e.crossed_nulls_gain, -4.0);
}

}  // namespace
}  // namespace lorentz_ot
