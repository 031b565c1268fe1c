#pragma once

#include <array>
#include <cstdint>
#include <initializer_list>
#include <vector>

#include "hardy/rng.hpp"

namespace hardy {

inline constexpr int kMaxDim = 8;

struct Point {
  std::array<double, kMaxDim> x{};
  int n = 0;

  Point() = default;
  explicit Point(int dim) : n(dim) {}
  Point(std::initializer_list<double> c);

  double& operator[](int i) { return x[i]; }
  double operator[](int i) const { return x[i]; }
  double norm() const;
  double norm2() const;
};

Point operator-(const Point& a, const Point& b);
Point operator+(const Point& a, const Point& b);
Point operator*(double s, const Point& a);
double distance(const Point& a, const Point& b);

enum class SigmaKind { kPoint, kSphere };

// Unit-type ball of radius ball_radius in R^dim containing Sigma, which is
// either the origin (k = 0) or a round k-sphere of radius r_sigma centered at
// the origin inside span(e_1, ..., e_{k+1}).
struct DomainSpec {
  int dim = 3;
  SigmaKind sigma_kind = SigmaKind::kPoint;
  int k = 0;
  double r_sigma = 0.0;
  double ball_radius = 1.0;

  static DomainSpec point(int dim, double ball_radius = 1.0);
  static DomainSpec sphere(int dim, int k, double r_sigma, double ball_radius = 1.0);

  // Throws PreconditionError when the invariants fail.
  void validate() const;
  // Distance between Sigma and the outer boundary.
  double sigma_clearance() const;
};

double dist_to_boundary(const Point& x, const DomainSpec& dom);
double dist_to_sigma(const Point& x, const DomainSpec& dom);
// Closest point of Sigma to x (for x on the axis of a sphere any point of
// Sigma is returned).
Point project_to_sigma(const Point& x, const DomainSpec& dom);
bool inside_open_ball(const Point& x, const DomainSpec& dom);

std::vector<Point> sample_interior(const DomainSpec& dom, std::size_t n, double min_dsigma,
                                   double min_d, std::uint64_t seed);

// Uniform direction on S^{m-1}.
void random_direction(StreamRng& rng, int m, double* out);
double sphere_area(int m);  // surface measure of S^{m-1} in R^m

struct TubeIntegral {
  double estimate = 0.0;
  double std_error = 0.0;
  double bound = 0.0;  // C * l1^{N-k+a1+k a2} * l2^k
  double constant = 0.0;
};

struct TubeIntegralOptions {
  std::size_t n_samples = 1'000'000;
  std::uint64_t seed = 1;
  // Calibration constant C of the bound; 0 means "no bound requested".
  double constant = 0.0;
  // Tube radius; nonpositive means the default half clearance.
  double tube_radius = 0.0;
};

// Monte-Carlo estimate of the integral of d_Sigma^{a1} over
//   {d_Sigma <= l1, |x - y| <= l2 d_Sigma^{a2}} within the tube of Sigma.
// l2 may be +infinity. The sampling envelope depends only on the tube radius,
// so with the same seed the estimate is monotone in l1 and l2.
TubeIntegral tube_region_integral(const DomainSpec& dom, double l1, double l2, double a1,
                                  double a2, const Point& y, const TubeIntegralOptions& opts);

// Twice the largest ratio estimate / (l1^{N-k+a1+k a2} l2^k) over a 3x3
// (l1, l2) sweep.
double calibrate_tube_constant(const DomainSpec& dom, double a1, double a2, const Point& y,
                               std::size_t n_samples, std::uint64_t seed);

}  // namespace hardy
