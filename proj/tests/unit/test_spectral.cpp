#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "hardy/errors.hpp"
#include "hardy/spectral.hpp"

using namespace hardy;

TEST(Exponents, Examples) {
  auto a = exponents(1.0, 4, 0);
  EXPECT_DOUBLE_EQ(a.H, 1.0);
  EXPECT_NEAR(a.alpha_minus, 1.0, 1e-12);
  EXPECT_NEAR(a.alpha_plus, 1.0, 1e-12);
  EXPECT_TRUE(a.critical());
  auto b = exponents(0.0, 4, 0);
  EXPECT_EQ(b.alpha_minus, 0.0);
  EXPECT_DOUBLE_EQ(b.alpha_plus, 2.0);
  auto c = exponents(0.75, 4, 0);
  EXPECT_NEAR(c.alpha_minus, 0.5, 1e-15);
  EXPECT_NEAR(c.alpha_plus, 1.5, 1e-15);
  EXPECT_FALSE(c.critical());
}

TEST(Exponents, RejectsLargeMu) {
  try {
    exponents(1.0001, 4, 0);
    FAIL();
  } catch (const PreconditionError& e) {
    EXPECT_NE(std::string(e.what()).find("mu exceeds H^2"), std::string::npos);
  }
  EXPECT_THROW(exponents(0.0, 3, 1), PreconditionError);
}

TEST(ExponentsProperty, RootIdentities) {
  std::mt19937_64 rng(17);
  for (int t = 0; t < 1000; ++t) {
    const int N = 3 + static_cast<int>(rng() % 4);
    const int k = static_cast<int>(rng() % static_cast<unsigned>(N - 2));
    const double H = (N - k - 2) / 2.0;
    const double mu = -2.0 + (H * H + 2.0) * std::uniform_real_distribution<double>(0, 1)(rng);
    const auto s = exponents(mu, N, k);
    EXPECT_NEAR(s.alpha_minus + s.alpha_plus, 2 * H, 1e-12);
    EXPECT_NEAR(s.alpha_minus * s.alpha_plus, mu, 1e-12);
    EXPECT_LE(s.alpha_minus, H + 1e-12);
    EXPECT_GE(s.alpha_plus, H - 1e-12);
    EXPECT_EQ(s.alpha_minus >= 0, mu >= 0);
  }
}

TEST(ExponentsProperty, AlphaMinusIncreasing) {
  double prev = -1e300;
  for (double mu = -3.0; mu < 1.0; mu += 0.01) {
    const double a = exponents(mu, 4, 0).alpha_minus;
    EXPECT_GT(a, prev);
    prev = a;
  }
}

TEST(ExponentTable, Values) {
  ExponentTable t{exponents(0.75, 4, 0), 1.0, 1.5};
  EXPECT_NEAR(t.q_source(1.0), 5.0 / 3.0, 1e-15);
  EXPECT_NEAR(t.q_boundary(), 5.0 / 3.0, 1e-15);
  EXPECT_NEAR(t.q_sigma(), 3.5 / 1.5, 1e-15);
  EXPECT_NEAR(t.p_tau_max(), 5.0, 1e-15);
  EXPECT_NEAR(t.p_nu_max(), 3.5 / 1.5, 1e-15);
  EXPECT_NEAR(t.p_sigma_crit(), 3.5 / 1.5, 1e-15);
  EXPECT_NEAR(t.vartheta(), (2 - 0.5 * 1.5) / 1.5, 1e-15);
  ExponentTable z{exponents(0.0, 4, 0), 1.0, 2.0};
  EXPECT_TRUE(std::isinf(z.p_tau_max()));
  const std::string row = t.csv_row();
  const std::string header = ExponentTable::csv_header();
  EXPECT_EQ(std::count(row.begin(), row.end(), ','), std::count(header.begin(), header.end(), ','));
}

TEST(PhiSurrogate, Examples) {
  const DomainSpec dom = DomainSpec::point(4);
  const Point x{0.25, 0, 0, 0};
  EXPECT_NEAR(phi_surrogate(x, exponents(0.75, 4, 0), dom, 0.0), 2.0, 1e-14);
  EXPECT_NEAR(phi_surrogate(x, exponents(0.0, 4, 0), dom, 2.0), 0.75 * 0.75, 1e-15);
  EXPECT_TRUE(std::isinf(phi_surrogate(Point{0, 0, 0, 0}, exponents(0.75, 4, 0), dom, 1.0)));
}

TEST(GreenEstimate, Examples) {
  const DomainSpec dom = DomainSpec::point(3);
  const auto p0 = exponents(0.0, 3, 0);
  EXPECT_NEAR(green_estimate(Point{0.5, 0, 0}, Point{-0.5, 0, 0}, p0, dom).value, 0.25, 1e-14);
  EXPECT_THROW(green_estimate(Point{0.5, 0, 0}, Point{0.5, 0, 0}, p0, dom), SingularPointError);
  const auto p1 = exponents(0.1, 3, 0);
  std::mt19937_64 rng(3);
  for (const auto& x : sample_interior(dom, 200, 0.0, 0.0, 1)) {
    const Point y = sample_interior(dom, 1, 0.0, 0.0, rng())[0];
    EXPECT_EQ(green_estimate(x, y, p1, dom).value, green_estimate(y, x, p1, dom).value);
    EXPECT_EQ(n_alpha(x, y, 0.5, dom).value, n_alpha(y, x, 0.5, dom).value);
  }
}

TEST(GreenEstimate, ZeroMuFormula) {
  const DomainSpec dom = DomainSpec::point(4);
  const auto p = exponents(0.0, 4, 0);
  const Point x{0.1, 0.2, 0.3, 0.1}, y{-0.4, 0.1, 0.5, -0.2};
  const double r = distance(x, y);
  const double dx = 1 - x.norm(), dy = 1 - y.norm();
  EXPECT_NEAR(green_estimate(x, y, p, dom).value, std::pow(r, -2) * std::min(1.0, dx * dy / (r * r)), 1e-13);
}

TEST(MartinEstimate, Examples) {
  const DomainSpec dom = DomainSpec::point(4);
  const Point x{0.2, 0.1, 0, 0};
  const Point xi{0, 1, 0, 0};
  const double d = 1 - x.norm();
  EXPECT_NEAR(martin_estimate(x, xi, exponents(0.0, 4, 0), dom).value, d / std::pow(distance(x, xi), 4), 1e-13);
  const Point z{0, 0, 0, 0};
  // xi on Sigma, alpha_- = 0.5: exponent N - 2 - 2 alpha_- = 1.
  EXPECT_NEAR(martin_estimate(x, z, exponents(0.75, 4, 0), dom).value,
              d * std::pow(x.norm(), -0.5) / x.norm(), 1e-13);
  const Point xc{0.5, 0, 0, 0};
  EXPECT_NEAR(martin_estimate(xc, z, exponents(1.0, 4, 0), dom).value, std::log(4.0), 1e-13);
  EXPECT_THROW(martin_estimate(x, Point{0.5, 0, 0, 0}, exponents(0.0, 4, 0), dom), DomainError);
}

TEST(NAlpha, ZeroOrderNumerator) {
  const DomainSpec dom = DomainSpec::point(4);
  const Point x{0.1, 0.2, 0, 0}, y{0.3, -0.1, 0.2, 0};
  const double r = distance(x, y);
  const double m = std::max({r, 1 - x.norm(), 1 - y.norm()});
  EXPECT_NEAR(n_alpha(x, y, 0.0, dom).value, 1.0 / (r * r * m * m), 1e-12);
}

TEST(QuasiMetric, DegenerateAndColinear) {
  const DomainSpec dom = DomainSpec::point(4);
  const Point x{0.3, 0.2, 0, 0}, y{0.3, -0.2, 0.1, 0};
  EXPECT_LE(quasi_metric_check(x, y, x, 1.0, dom), 1.0);
  EXPECT_THROW(quasi_metric_check(x, x, y, 1.0, dom), PreconditionError);
  // Equally spaced colinear triple, spacing small against d and d_Sigma.
  const Point a{0.4, -0.01, 0, 0}, z{0.4, 0, 0, 0}, b{0.4, 0.01, 0, 0};
  for (int N : {4}) {
    const double q = quasi_metric_check(a, b, z, 0.0, dom);
    const double expect = std::pow(2.0, N - 2) / 2.0;
    EXPECT_GT(q, expect / 4);
    EXPECT_LT(q, expect * 4);
  }
}

TEST(QuasiMetricProperty, NoViolations) {
  std::size_t bad = 0;
  for (int N : {3, 4})
    for (int k : {0, 1}) {
      if (k >= N - 2) continue;
      const DomainSpec dom = k == 0 ? DomainSpec::point(N) : DomainSpec::sphere(N, k, 0.5);
      const double am = exponents(0.5 * std::pow((N - k - 2) / 2.0, 2), N, k).alpha_minus;
      const auto pts = sample_interior(dom, 30000, 0.0, 0.0, 100 + N + k);
      for (double alpha : {-1.0, 0.0, 2 * am}) {
        const double c = quasi_metric_constant(N, alpha);
        for (std::size_t i = 0; i + 2 < pts.size(); i += 3)
          if (quasi_metric_check(pts[i], pts[i + 1], pts[i + 2], alpha, dom) > c) ++bad;
      }
    }
  EXPECT_EQ(bad, 0u);
}

TEST(GreenEstimateProperty, ProportionalToNAlpha) {
  const DomainSpec dom = DomainSpec::point(4);
  const auto p = exponents(0.75, 4, 0);
  const auto pts = sample_interior(dom, 20000, 1e-3, 1e-3, 8);
  double lo = 1e300, hi = 0;
  for (std::size_t i = 0; i + 1 < pts.size(); i += 2) {
    const Point &x = pts[i], &y = pts[i + 1];
    const double ref = (1 - x.norm()) * (1 - y.norm()) * std::pow(x.norm() * y.norm(), -p.alpha_minus) *
                       n_alpha(x, y, 2 * p.alpha_minus, dom).value;
    const double r = green_estimate(x, y, p, dom).value / ref;
    lo = std::min(lo, r);
    hi = std::max(hi, r);
  }
  EXPECT_GE(lo, 1.0 / 16);
  EXPECT_LE(hi, 16.0);
}

TEST(AuxKernels, Examples) {
  const DomainSpec dom = DomainSpec::point(4);
  const Point x{0.1, 0.2, 0, 0}, y{0.3, -0.1, 0.2, 0};
  const double r = distance(x, y), dx = 1 - x.norm(), dy = 1 - y.norm();
  EXPECT_NEAR(aux_kernel(x, y, AuxKind::kF, {}, dom).value, std::pow(r, -2) * std::min(1.0, dx * dy / (r * r)), 1e-12);
  EXPECT_NEAR(aux_kernel(x, y, AuxKind::kH, {}, dom).value, dx * std::pow(r, -4), 1e-10);
  AuxParams ht;
  ht.alpha = 1.0;
  const Point far{-0.9, 0, 0, 0}, near{0.9, 0, 0, 0};
  // |x - y| = 1.8 < D_Omega = 2: value is positive; the log vanishes at |x-y| = D_Omega.
  EXPECT_GT(aux_kernel(far, near, AuxKind::kHtilde, ht, dom).value, 0.0);
  EXPECT_NEAR(aux_kernel(Point{-1, 0, 0, 0}, Point{1, 0, 0, 0}, AuxKind::kHtilde, ht, dom).value, 0.0, 1e-15);
  AuxParams bad;
  bad.theta = 5.0;
  EXPECT_THROW(aux_kernel(x, y, AuxKind::kH, bad, dom), PreconditionError);
  ht.alpha = 2.5;
  EXPECT_THROW(aux_kernel(x, y, AuxKind::kHtilde, ht, dom), PreconditionError);
}

TEST(GreenEps, DominatesCriticalEstimate) {
  const DomainSpec dom = DomainSpec::point(4);
  const auto p = exponents(1.0, 4, 0);
  const auto pts = sample_interior(dom, 20000, 1e-3, 1e-3, 12);
  double lo = 1e300;
  for (std::size_t i = 0; i + 1 < pts.size(); i += 2) {
    const double ge = green_eps_critical(pts[i], pts[i + 1], 0.5, p, dom).value;
    lo = std::min(lo, ge / green_estimate(pts[i], pts[i + 1], p, dom).value);
  }
  EXPECT_GT(lo, 0.05);
  const Point x{0.3, 0.1, 0, 0}, y{0.3, 0.11, 0, 0};
  // Only the power of max{|x-y|, |x|, |y|} = |y| depends on eps.
  EXPECT_NEAR(green_eps_critical(x, y, 0.5, p, dom).value / green_eps_critical(x, y, 0.25, p, dom).value,
              std::pow(y.norm(), -0.25), 1e-12);
  EXPECT_EQ(green_eps_critical(x, y, 0.5, p, dom).value, green_eps_critical(y, x, 0.5, p, dom).value);
  EXPECT_THROW(green_eps_critical(x, y, 0.5, exponents(0.75, 4, 0), dom), PreconditionError);
  EXPECT_THROW(green_eps_critical(x, y, 2.0, p, dom), PreconditionError);
}
