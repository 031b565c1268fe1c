#include "hardy/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "hardy/errors.hpp"

namespace hardy {

Point::Point(std::initializer_list<double> c) : n(static_cast<int>(c.size())) {
  if (n > kMaxDim) throw PreconditionError("point dimension exceeds kMaxDim");
  std::copy(c.begin(), c.end(), x.begin());
}

double Point::norm2() const {
  double s = 0.0;
  for (int i = 0; i < n; ++i) s += x[i] * x[i];
  return s;
}

double Point::norm() const { return std::sqrt(norm2()); }

Point operator-(const Point& a, const Point& b) {
  Point r(a.n);
  for (int i = 0; i < a.n; ++i) r[i] = a[i] - b[i];
  return r;
}

Point operator+(const Point& a, const Point& b) {
  Point r(a.n);
  for (int i = 0; i < a.n; ++i) r[i] = a[i] + b[i];
  return r;
}

Point operator*(double s, const Point& a) {
  Point r(a.n);
  for (int i = 0; i < a.n; ++i) r[i] = s * a[i];
  return r;
}

double distance(const Point& a, const Point& b) {
  double s = 0.0;
  for (int i = 0; i < a.n; ++i) {
    const double t = a[i] - b[i];
    s += t * t;
  }
  return std::sqrt(s);
}

DomainSpec DomainSpec::point(int dim, double ball_radius) {
  DomainSpec d;
  d.dim = dim;
  d.sigma_kind = SigmaKind::kPoint;
  d.k = 0;
  d.r_sigma = 0.0;
  d.ball_radius = ball_radius;
  d.validate();
  return d;
}

DomainSpec DomainSpec::sphere(int dim, int k, double r_sigma, double ball_radius) {
  DomainSpec d;
  d.dim = dim;
  d.sigma_kind = SigmaKind::kSphere;
  d.k = k;
  d.r_sigma = r_sigma;
  d.ball_radius = ball_radius;
  d.validate();
  return d;
}

void DomainSpec::validate() const {
  if (dim < 3 || dim > kMaxDim) throw PreconditionError("dimension must lie in [3, 8]");
  if (!(ball_radius > 0.0) || !std::isfinite(ball_radius))
    throw PreconditionError("ball radius must be positive");
  if (sigma_kind == SigmaKind::kPoint) {
    if (k != 0) throw PreconditionError("point Sigma has k = 0");
    return;
  }
  if (k < 1) throw PreconditionError("sphere Sigma needs k >= 1");
  if (!(k < dim - 2)) throw PreconditionError("dimension assumption 0 <= k < N-2 violated");
  if (!(r_sigma > 0.0 && r_sigma < ball_radius))
    throw PreconditionError("r_sigma must satisfy 0 < r_sigma < ball radius");
}

double DomainSpec::sigma_clearance() const {
  return sigma_kind == SigmaKind::kPoint ? ball_radius : ball_radius - r_sigma;
}

double dist_to_boundary(const Point& x, const DomainSpec& dom) {
  const double r = x.norm();
  if (r > dom.ball_radius * (1.0 + 1e-12)) throw DomainError("point outside the closed ball");
  return std::max(0.0, dom.ball_radius - r);
}

double dist_to_sigma(const Point& x, const DomainSpec& dom) {
  if (dom.sigma_kind == SigmaKind::kPoint) return x.norm();
  double in = 0.0;
  for (int i = 0; i <= dom.k; ++i) in += x[i] * x[i];
  double out = 0.0;
  for (int i = dom.k + 1; i < dom.dim; ++i) out += x[i] * x[i];
  const double radial = std::sqrt(in) - dom.r_sigma;
  return std::sqrt(radial * radial + out);
}

Point project_to_sigma(const Point& x, const DomainSpec& dom) {
  Point p(dom.dim);
  if (dom.sigma_kind == SigmaKind::kPoint) return p;
  double in = 0.0;
  for (int i = 0; i <= dom.k; ++i) in += x[i] * x[i];
  in = std::sqrt(in);
  if (in == 0.0) {
    p[0] = dom.r_sigma;
    return p;
  }
  for (int i = 0; i <= dom.k; ++i) p[i] = dom.r_sigma * x[i] / in;
  return p;
}

bool inside_open_ball(const Point& x, const DomainSpec& dom) {
  return x.norm2() < dom.ball_radius * dom.ball_radius;
}

void random_direction(StreamRng& rng, int m, double* out) {
  double s = 0.0;
  do {
    s = 0.0;
    for (int i = 0; i < m; ++i) {
      out[i] = rng.normal();
      s += out[i] * out[i];
    }
  } while (s == 0.0);
  s = 1.0 / std::sqrt(s);
  for (int i = 0; i < m; ++i) out[i] *= s;
}

double sphere_area(int m) {
  return 2.0 * std::pow(std::numbers::pi, 0.5 * m) / std::tgamma(0.5 * m);
}

std::vector<Point> sample_interior(const DomainSpec& dom, std::size_t n, double min_dsigma,
                                   double min_d, std::uint64_t seed) {
  if (n < 1) throw PreconditionError("sample_interior needs n >= 1");
  if (min_dsigma < 0.0 || min_d < 0.0) throw PreconditionError("margins must be nonnegative");
  constexpr std::size_t kMaxRejections = 1'000'000;
  StreamRng rng(seed, 0);
  std::vector<Point> pts;
  pts.reserve(n);
  std::size_t rejected = 0;
  const double r = dom.ball_radius;
  while (pts.size() < n) {
    Point p(dom.dim);
    for (int i = 0; i < dom.dim; ++i) p[i] = r * (2.0 * rng.uniform() - 1.0);
    const double rad = p.norm();
    if (rad < r && r - rad > min_d && dist_to_sigma(p, dom) > min_dsigma) {
      pts.push_back(p);
    } else if (++rejected > kMaxRejections) {
      throw ConfigurationError("sample_interior: acceptance region empty or too small");
    }
  }
  return pts;
}

TubeIntegral tube_region_integral(const DomainSpec& dom, double l1, double l2, double a1,
                                  double a2, const Point& y, const TubeIntegralOptions& opts) {
  const int N = dom.dim;
  const int k = dom.k;
  if (!(N - k + a1 + k * a2 > 0.0))
    throw PreconditionError("tube integral needs N - k + a1 + k a2 > 0");
  if (!(l1 > 0.0) || !(l2 > 0.0)) throw PreconditionError("tube integral needs l1, l2 > 0");
  if (opts.n_samples == 0) throw PreconditionError("tube integral needs samples");

  double envelope = opts.tube_radius;
  if (!(envelope > 0.0)) {
    envelope = dom.sigma_kind == SigmaKind::kPoint
                   ? dom.ball_radius
                   : 0.5 * std::min(dom.r_sigma, dom.ball_radius - dom.r_sigma);
  }
  // Radial density t^{e-1} on (0, envelope]; e absorbs the d_Sigma power and,
  // for a2 > 0, the k-dimensional shrinking of the admissible set.
  const double e = N - k + a1 + k * std::max(a2, 0.0);
  const int normal_dim = (dom.sigma_kind == SigmaKind::kPoint) ? N : N - k;
  const double area = (dom.sigma_kind == SigmaKind::kPoint)
                          ? sphere_area(N)
                          : sphere_area(k + 1) * sphere_area(N - k);

  StreamRng rng(opts.seed, 1);
  double sum = 0.0;
  double sum2 = 0.0;
  std::array<double, kMaxDim> v{};
  std::array<double, kMaxDim> th{};
  for (std::size_t s = 0; s < opts.n_samples; ++s) {
    const double u = rng.uniform_open0();
    const double t = envelope * std::pow(u, 1.0 / e);
    random_direction(rng, normal_dim, v.data());
    Point x(N);
    double jac = 1.0;
    if (dom.sigma_kind == SigmaKind::kPoint) {
      for (int i = 0; i < N; ++i) x[i] = t * v[i];
    } else {
      random_direction(rng, k + 1, th.data());
      const double rho = dom.r_sigma + t * v[0];
      for (int i = 0; i <= k; ++i) x[i] = rho * th[i];
      for (int i = k + 1; i < N; ++i) x[i] = t * v[i - k];
      jac = std::pow(rho, k);
    }
    double w = 0.0;
    if (t <= l1 && inside_open_ball(x, dom)) {
      const bool near = std::isinf(l2) || distance(x, y) <= l2 * std::pow(t, a2);
      if (near) {
        const double pdf = e * std::pow(t, e - 1.0) / std::pow(envelope, e);
        w = std::pow(t, a1 + normal_dim - 1) * jac * area / pdf;
      }
    }
    sum += w;
    sum2 += w * w;
  }
  const double m = static_cast<double>(opts.n_samples);
  TubeIntegral out;
  out.estimate = sum / m;
  out.std_error = std::sqrt(std::max(0.0, sum2 / m - out.estimate * out.estimate) / m);
  out.constant = opts.constant;
  if (opts.constant > 0.0) {
    const double l2k = std::isinf(l2) ? std::numeric_limits<double>::infinity() : std::pow(l2, k);
    out.bound = opts.constant * std::pow(l1, N - k + a1 + k * a2) * (k == 0 ? 1.0 : l2k);
  }
  return out;
}

double calibrate_tube_constant(const DomainSpec& dom, double a1, double a2, const Point& y,
                               std::size_t n_samples, std::uint64_t seed) {
  const int N = dom.dim;
  const int k = dom.k;
  double worst = 0.0;
  for (double l1 : {0.05, 0.1, 0.2}) {
    for (double l2 : {0.5, 1.0, 2.0}) {
      TubeIntegralOptions o;
      o.n_samples = n_samples;
      o.seed = seed;
      const TubeIntegral t = tube_region_integral(dom, l1, l2, a1, a2, y, o);
      const double scale = std::pow(l1, N - k + a1 + k * a2) * std::pow(l2, k);
      worst = std::max(worst, t.estimate / scale);
    }
  }
  return 2.0 * worst;
}

}  // namespace hardy
