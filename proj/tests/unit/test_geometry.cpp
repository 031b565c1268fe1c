#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "hardy/errors.hpp"
#include "hardy/geometry.hpp"

using namespace hardy;

TEST(Geometry, DistToBoundary) {
  const DomainSpec dom = DomainSpec::point(3);
  EXPECT_DOUBLE_EQ(dist_to_boundary(Point{0, 0, 0}, dom), 1.0);
  EXPECT_DOUBLE_EQ(dist_to_boundary(Point{1, 0, 0}, dom), 0.0);
  EXPECT_NEAR(dist_to_boundary(Point{0.3, 0.4, 0}, dom), 0.5, 1e-15);
  EXPECT_THROW(dist_to_boundary(Point{1.1, 0, 0}, dom), DomainError);
}

TEST(Geometry, DistToSigma) {
  EXPECT_DOUBLE_EQ(dist_to_sigma(Point{0.2, 0, 0, 0}, DomainSpec::point(4)), 0.2);
  const DomainSpec circle = DomainSpec::sphere(4, 1, 0.5);
  EXPECT_NEAR(dist_to_sigma(Point{0.5, 0, 0, 0.1}, circle), 0.1, 1e-15);
  EXPECT_NEAR(dist_to_sigma(Point{1.0, 0, 0, 0}, circle), 0.5, 1e-15);
  EXPECT_DOUBLE_EQ(dist_to_sigma(Point{0, 0.5, 0, 0}, circle), 0.0);
}

TEST(Geometry, DomainInvariants) {
  EXPECT_THROW(DomainSpec::point(2), PreconditionError);
  EXPECT_THROW(DomainSpec::sphere(3, 1, 0.5), PreconditionError);  // k < N - 2
  EXPECT_THROW(DomainSpec::sphere(5, 1, 1.0), PreconditionError);
  EXPECT_THROW(DomainSpec::sphere(5, 1, 0.0), PreconditionError);
  EXPECT_NO_THROW(DomainSpec::sphere(5, 2, 0.5));
  EXPECT_NEAR(DomainSpec::sphere(5, 1, 0.3).sigma_clearance(), 0.7, 1e-15);
}

TEST(Geometry, ProjectToSigma) {
  const DomainSpec dom = DomainSpec::sphere(5, 1, 0.5);
  const Point x{0.3, 0.4, 0.1, 0, 0.2};
  const Point p = project_to_sigma(x, dom);
  EXPECT_NEAR(dist_to_sigma(p, dom), 0.0, 1e-15);
  EXPECT_NEAR(distance(x, p), dist_to_sigma(x, dom), 1e-14);
}

TEST(Geometry, SampleInteriorDeterministic) {
  const DomainSpec dom = DomainSpec::point(3);
  const auto a = sample_interior(dom, 1, 0.0, 0.0, 7);
  const auto b = sample_interior(dom, 1, 0.0, 0.0, 7);
  ASSERT_EQ(a.size(), 1u);
  for (int i = 0; i < 3; ++i) EXPECT_EQ(a[0][i], b[0][i]);
  const auto c = sample_interior(dom, 1, 0.0, 0.0, 8);
  EXPECT_NE(a[0][0], c[0][0]);
}

TEST(Geometry, SampleInteriorMargins) {
  const DomainSpec dom = DomainSpec::sphere(4, 1, 0.5);
  const auto pts = sample_interior(dom, 10000, 0.01, 0.0, 3);
  ASSERT_EQ(pts.size(), 10000u);
  for (const auto& x : pts) {
    EXPECT_GT(dist_to_sigma(x, dom), 0.01);
    EXPECT_TRUE(inside_open_ball(x, dom));
  }
  EXPECT_THROW(sample_interior(dom, 1, 0.0, 1.5, 3), ConfigurationError);
}

TEST(GeometryProperty, BoundaryDistancePlusRadius) {
  const DomainSpec dom = DomainSpec::point(5, 1.3);
  for (const auto& x : sample_interior(dom, 5000, 0.0, 0.0, 11))
    EXPECT_NEAR(dist_to_boundary(x, dom) + x.norm(), 1.3, 1e-15);
}

TEST(GeometryProperty, SigmaDistanceIsLipschitz) {
  const DomainSpec dom = DomainSpec::sphere(5, 2, 0.6);
  const auto xs = sample_interior(dom, 100000, 0.0, 0.0, 5);
  const auto ys = sample_interior(dom, 100000, 0.0, 0.0, 6);
  std::size_t bad = 0;
  for (std::size_t i = 0; i < xs.size(); ++i)
    if (std::abs(dist_to_sigma(xs[i], dom) - dist_to_sigma(ys[i], dom)) > distance(xs[i], ys[i]) + 1e-14) ++bad;
  EXPECT_EQ(bad, 0u);
}

TEST(Geometry, SphereArea) {
  EXPECT_NEAR(sphere_area(2), 2 * std::numbers::pi, 1e-14);
  EXPECT_NEAR(sphere_area(3), 4 * std::numbers::pi, 1e-14);
  EXPECT_NEAR(sphere_area(4), 2 * std::numbers::pi * std::numbers::pi, 1e-13);
}

TEST(TubeIntegral, RadialClosedForm) {
  // k = 0, a2 = 0, l2 = inf: int_{|x| <= l1} |x|^{-a} dx = |S^{N-1}| l1^{N-a} / (N-a).
  const DomainSpec dom = DomainSpec::point(4);
  const double a = 1.5, l1 = 0.3;
  TubeIntegralOptions o;
  o.n_samples = 200000;
  o.seed = 9;
  const auto t = tube_region_integral(dom, l1, std::numeric_limits<double>::infinity(), -a, 0.0, Point{0, 0, 0, 0}, o);
  const double exact = sphere_area(4) * std::pow(l1, 4 - a) / (4 - a);
  EXPECT_NEAR(t.estimate / exact, 1.0, 5 * t.std_error / exact + 1e-12);
}

TEST(TubeIntegral, VanishesAndRejects) {
  const DomainSpec dom = DomainSpec::sphere(4, 1, 0.5);
  TubeIntegralOptions o;
  o.n_samples = 20000;
  const Point y{0.5, 0, 0, 0};
  const auto a = tube_region_integral(dom, 1e-3, 1.0, -1.0, 0.5, y, o);
  const auto b = tube_region_integral(dom, 1e-1, 1.0, -1.0, 0.5, y, o);
  EXPECT_LT(a.estimate, 1e-3 * b.estimate + 1e-12);
  EXPECT_THROW(tube_region_integral(dom, 0.1, 1.0, -4.0, 0.5, y, o), PreconditionError);
  EXPECT_THROW(tube_region_integral(dom, 0.0, 1.0, -1.0, 0.5, y, o), PreconditionError);
}

TEST(TubeIntegral, MonotoneOnGrid) {
  const DomainSpec dom = DomainSpec::sphere(4, 1, 0.5);
  const Point y{0.5, 0, 0, 0};
  TubeIntegralOptions o;
  o.n_samples = 50000;
  o.seed = 4;
  const double l1s[] = {0.05, 0.1, 0.2}, l2s[] = {0.5, 1.0, 2.0};
  double v[3][3];
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) v[i][j] = tube_region_integral(dom, l1s[i], l2s[j], -1.0, 0.5, y, o).estimate;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) {
      if (i > 0) EXPECT_GE(v[i][j], v[i - 1][j]);
      if (j > 0) EXPECT_GE(v[i][j], v[i][j - 1]);
    }
}

TEST(TubeIntegral, CalibratedBoundHolds) {
  const DomainSpec dom = DomainSpec::sphere(4, 1, 0.5);
  const Point y{0.5, 0, 0, 0};
  const double c = calibrate_tube_constant(dom, -1.0, 0.5, y, 200000, 21);
  TubeIntegralOptions o;
  o.n_samples = 1000000;
  o.seed = 22;
  o.constant = c;
  const auto t = tube_region_integral(dom, 0.1, 1.0, -1.0, 0.5, y, o);
  EXPECT_GT(t.estimate, 0.0);
  EXPECT_LE(t.estimate / t.bound, 1.0);
}
