#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "hardy/capacity.hpp"
#include "hardy/errors.hpp"
#include "hardy/solver.hpp"

using namespace hardy;

namespace {

// Singleton parameters (2 alpha_-, p', p+1, -alpha_-(p+1)) at N = 4,
// mu = 0.75, p = 1.5.
CapacityParams singleton_params() { return CapacityParams{1.0, 3.0, 2.5, -1.25}; }

CapacityOptions fast_options() {
  CapacityOptions o;
  o.h = 1.0 / 10;
  o.refine_check = false;
  return o;
}

}  // namespace

TEST(NAlphaPotential, ZeroSingleAndLinear) {
  const Grid g = build_grid(DomainSpec::point(3), 1.0 / 12);
  const PotentialField none = n_alpha_potential(g, {}, 1.0);
  for (double v : none.values.values) EXPECT_EQ(v, 0.0);

  const Point y{0.31, -0.2, 0.1};
  const PotentialField one = n_alpha_potential(g, {{y, 1.0}}, 1.0);
  EXPECT_TRUE(one.excluded.empty());
  for (std::size_t i = 0; i < g.size(); i += 37)
    EXPECT_DOUBLE_EQ(one.values[i], n_alpha(g.node(i), y, 1.0, g.domain()).value);

  const Point z{-0.4, 0.25, 0.05};
  const PotentialField a = n_alpha_potential(g, {{z, 1.0}}, 1.0);
  const PotentialField mix = n_alpha_potential(g, {{y, 2.0}, {z, -0.5}}, 1.0);
  for (std::size_t i = 0; i < g.size(); ++i) {
    const double expect = 2.0 * one.values[i] - 0.5 * a.values[i];
    EXPECT_NEAR(mix.values[i], expect, 1e-12 * (std::abs(expect) + 1.0));
  }
}

TEST(NAlphaPotential, AtomOnNodeIsExcluded) {
  const Grid g = build_grid(DomainSpec::point(3), 1.0 / 12);
  const std::size_t i = g.nearest_node(Point{0.3, 0.2, 0.1});
  const PotentialField f = n_alpha_potential(g, {{g.node(i), 1.0}}, 1.0);
  ASSERT_EQ(f.excluded.size(), 1u);
  EXPECT_EQ(f.excluded[0], i);
  EXPECT_EQ(f.values[i], 0.0);
}

TEST(DualNorm, HomogeneousAndDivergence) {
  const Grid g = build_grid(DomainSpec::point(4), 1.0 / 10);
  const Point z{0.3, 0.2, -0.1, 0.05};
  const CapacityParams cp = singleton_params();
  const DualNorm one = dual_norm(g, {{z, 1.0}}, cp);
  const DualNorm two = dual_norm(g, {{z, 2.0}}, cp);
  ASSERT_FALSE(one.divergent);
  EXPECT_GT(one.value, 0.0);
  EXPECT_NEAR(two.value, 2.0 * one.value, 1e-12 * one.value);
  // s = 2 gives (N - 2) s' = N: the singular cell is not integrable.
  const DualNorm crit = dual_norm(g, {{z, 1.0}}, CapacityParams{1.0, 2.0, 2.5, -1.25});
  EXPECT_TRUE(crit.divergent);
  EXPECT_THROW(dual_norm(build_grid(DomainSpec::point(4), 0.1, SymmetrySpec::mirrors(1, 4)), {{z, 1.0}}, cp),
               PreconditionError);
}

TEST(CapLowerBound, EmptyTargetIsZero) {
  const CapacityEstimate e = cap_lower_bound(DomainSpec::point(4), {}, singleton_params(), fast_options());
  EXPECT_EQ(e.bound, 0.0);
  EXPECT_TRUE(e.certificate.empty());
}

TEST(CapLowerBound, CertificateAndMonotonicity) {
  const DomainSpec dom = DomainSpec::point(4);
  const Point z1{0.3, 0.2, -0.1, 0.05};
  const Point z2{-0.25, 0.1, 0.3, -0.2};
  CapacityOptions o = fast_options();
  o.refine_check = true;
  const CapacityEstimate one = cap_lower_bound(dom, {z1}, singleton_params(), o);
  const CapacityEstimate two = cap_lower_bound(dom, {z1, z2}, singleton_params(), o);
  ASSERT_FALSE(one.divergent);
  EXPECT_GT(one.bound, 0.0);
  EXPECT_LE(one.dual_norm, 1.0 + 1e-9);
  EXPECT_LE(two.dual_norm, 1.0 + 1e-9);
  EXPECT_LE(one.bound, two.bound);
  double mass = 0.0;
  for (const Atom& a : two.certificate) mass += a.weight;
  EXPECT_NEAR(two.bound, std::pow(mass, two.params.s), 1e-12 * two.bound);
  EXPECT_NEAR(one.refined_dual_norm, one.dual_norm, 0.1 * one.dual_norm);
  EXPECT_NEAR(two.refined_dual_norm, two.dual_norm, 0.1 * two.dual_norm);
}

TEST(CapLowerBound, DivergentSingletonReportsZero) {
  const CapacityEstimate e = cap_lower_bound(DomainSpec::point(4), {Point{0.3, 0.2, -0.1, 0.05}},
                                             CapacityParams{1.0, 2.0, 2.5, -1.25}, fast_options());
  EXPECT_TRUE(e.divergent);
  EXPECT_EQ(e.bound, 0.0);
}

TEST(CapLowerBound, Preconditions) {
  const DomainSpec dom = DomainSpec::point(4);
  const std::vector<Point> e = {Point{0.3, 0.2, -0.1, 0.05}};
  EXPECT_THROW(cap_lower_bound(dom, e, CapacityParams{1.0, 1.0, 2.5, -1.25}), PreconditionError);
  EXPECT_THROW(cap_lower_bound(dom, e, CapacityParams{1.0, 3.0, 0.0, -1.25}), PreconditionError);
  EXPECT_THROW(cap_lower_bound(dom, e, CapacityParams{1.0, 3.0, 2.5, -4.0}), PreconditionError);
}

TEST(CapLowerBound, PositiveCapacityMeansFiniteDomination) {
  const DomainSpec dom = DomainSpec::point(4);
  const Point z{0.3, 0.2, -0.1, 0.05};
  const CapacityEstimate e = cap_lower_bound(dom, {z}, singleton_params(), fast_options());
  ASSERT_GT(e.bound, 0.0);
  MeasureData tau;
  tau.interior.push_back({z, 1.0});
  const DiscreteOperator op(build_grid(dom, 1.0 / 10), exponents(0.75, 4, 0));
  const DominationResult d = check_domination(op, tau, 1.5);
  EXPECT_TRUE(std::isfinite(d.max_ratio));
  EXPECT_GT(d.max_ratio, 0.0);
}

TEST(BesselCriterion, Examples) {
  const int N = 4;
  const double p = 1.5;
  EXPECT_TRUE(bessel_singleton_criterion(2.0 / p, p / (p - 1), N - 1));
  EXPECT_FALSE(bessel_singleton_criterion(1.0, 3.0, 3.0));
  ExponentTable t;
  t.params = exponents(0.4375, 5, 1);  // alpha_- = 0.25
  t.p = t.p_sigma_crit();
  EXPECT_FALSE(bessel_singleton_criterion(t.vartheta(), t.p / (t.p - 1), 1.0));
  t.p = t.p_sigma_crit() - 0.1;
  EXPECT_TRUE(bessel_singleton_criterion(t.vartheta(), t.p / (t.p - 1), 1.0));
  EXPECT_THROW(bessel_singleton_criterion(0.0, 2.0, 1.0), PreconditionError);
  EXPECT_THROW(bessel_singleton_criterion(1.0, 1.0, 1.0), PreconditionError);
  EXPECT_THROW(bessel_singleton_criterion(1.0, 2.0, 0.5), PreconditionError);
}

TEST(BallMeasure, UnweightedInteriorBallIsEuclideanVolume) {
  const DomainSpec dom = DomainSpec::point(4);
  const double s = 0.1;
  const BallMeasure m = weighted_ball_measure(dom, Point{0.4, 0.1, 0, 0}, s, 0.0, 0.0, 100000, 3);
  const double volume = std::numbers::pi * std::numbers::pi / 2 * std::pow(s, 4);
  EXPECT_NEAR(m.estimate, volume, 4 * m.std_error + 1e-12 * volume);
  EXPECT_DOUBLE_EQ(m.volume_law, std::pow(s, 4));
}

TEST(BallMeasure, SeedDeterminism) {
  const DomainSpec dom = DomainSpec::point(4);
  const BallMeasure a = weighted_ball_measure(dom, Point{0.5, 0, 0, 0}, 0.25, 2.5, -1.25, 20000, 11);
  const BallMeasure b = weighted_ball_measure(dom, Point{0.5, 0, 0, 0}, 0.25, 2.5, -1.25, 20000, 11);
  EXPECT_EQ(a.estimate, b.estimate);
}
