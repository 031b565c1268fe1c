#include "hardy/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <fmt/format.h>

#include "hardy/errors.hpp"

namespace hardy {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// log min(1, a/b^2) for a > 0, b > 0.
double log_min1(double log_num, double log_den) { return std::min(0.0, log_num - log_den); }

void require_off_sigma(const Point& x, const DomainSpec& dom, const char* what) {
  if (dist_to_sigma(x, dom) <= 0.0) throw DomainError(std::string(what) + ": point on Sigma");
}

}  // namespace

bool SpectralParams::critical() const {
  const double h0 = 0.5 * (N - 2);
  return k == 0 && std::abs(mu - h0 * h0) <= 1e-12 * std::max(1.0, h0 * h0);
}

SpectralParams exponents(double mu, int N, int k) {
  if (N < 3 || k < 0 || !(k < N - 2)) throw PreconditionError("dimension assumption 0 <= k < N-2 violated");
  if (!std::isfinite(mu)) throw PreconditionError("mu must be finite");
  SpectralParams p;
  p.mu = mu;
  p.N = N;
  p.k = k;
  p.H = 0.5 * (N - k - 2);
  const double disc = p.H * p.H - mu;
  if (disc < -1e-14 * std::max(1.0, p.H * p.H)) throw PreconditionError("mu exceeds H^2");
  const double s = std::sqrt(std::max(0.0, disc));
  p.alpha_plus = p.H + s;
  // Product form avoids cancellation for small |mu|.
  p.alpha_minus = mu / p.alpha_plus;
  return p;
}

double ExponentTable::q_source(double g) const {
  const int N = params.N;
  if (N + g - 2 <= 0.0) return kInf;
  return (N + g) / (N + g - 2);
}

double ExponentTable::q_boundary() const { return (params.N + 1.0) / (params.N - 1.0); }

double ExponentTable::q_sigma() const {
  const double a = params.alpha_minus;
  return (params.N - a) / (params.N - a - 2.0);
}

double ExponentTable::p_tau_max() const {
  const double a = params.alpha_minus;
  return a > 0.0 ? (2.0 + a) / a : kInf;
}

double ExponentTable::p_nu_max() const {
  const double a = params.alpha_plus;
  return a > 0.0 ? (2.0 + a) / a : kInf;
}

double ExponentTable::p_sigma_crit() const {
  const double a = params.alpha_minus;
  return (params.N - a) / (params.N - 2.0 - a);
}

double ExponentTable::vartheta() const { return (2.0 - (p - 1.0) * params.alpha_plus) / p; }

std::string ExponentTable::csv_header() {
  return "N,k,mu,gamma,p,H,alpha_minus,alpha_plus,q_source,q_boundary,q_sigma,p_tau_max,"
         "p_nu_max,p_sigma_crit,vartheta";
}

std::string ExponentTable::csv_row() const {
  return fmt::format("{},{},{:.17g},{:.17g},{:.17g},{:.17g},{:.17g},{:.17g},{:.17g},{:.17g},"
                     "{:.17g},{:.17g},{:.17g},{:.17g},{:.17g}",
                     params.N, params.k, params.mu, gamma, p, params.H, params.alpha_minus,
                     params.alpha_plus, q_source(), q_boundary(), q_sigma(), p_tau_max(),
                     p_nu_max(), p_sigma_crit(), vartheta());
}

const char* kernel_kind_name(KernelKind k) {
  switch (k) {
    case KernelKind::kGreenEst: return "green-est";
    case KernelKind::kMartinEst: return "martin-est";
    case KernelKind::kNAlpha: return "n-alpha";
    case KernelKind::kAuxF: return "aux-F";
    case KernelKind::kAuxH: return "aux-H";
    case KernelKind::kAuxHtilde: return "aux-Htilde";
    case KernelKind::kAuxFtilde: return "aux-Ftilde";
    case KernelKind::kGreenEps: return "green-eps";
  }
  return "unknown";
}

double phi_surrogate(const Point& x, const SpectralParams& params, const DomainSpec& dom,
                     double gamma) {
  const double ds = dist_to_sigma(x, dom);
  const double d = dist_to_boundary(x, dom);
  const double a = params.alpha_minus;
  if (ds == 0.0 && a > 0.0) return kInf;
  return (a == 0.0 ? 1.0 : std::pow(ds, -a)) * (gamma == 0.0 ? 1.0 : std::pow(d, gamma));
}

KernelValue green_estimate(const Point& x, const Point& y, const SpectralParams& params,
                           const DomainSpec& dom) {
  const double r = distance(x, y);
  if (r == 0.0) throw SingularPointError("green_estimate at x = y");
  require_off_sigma(x, dom, "green_estimate");
  require_off_sigma(y, dom, "green_estimate");
  const int N = params.N;
  const double dx = dist_to_boundary(x, dom), dy = dist_to_boundary(y, dom);
  const double sx = dist_to_sigma(x, dom), sy = dist_to_sigma(y, dom);
  const double lr2 = 2.0 * std::log(r);
  double lg = (2.0 - N) * std::log(r) + log_min1(std::log(dx) + std::log(dy), lr2);
  if (params.alpha_minus != 0.0)
    lg -= params.alpha_minus * log_min1(std::log(sx) + std::log(sy), lr2);
  double v = std::exp(lg);
  if (params.critical()) {
    const double l = std::abs(log_min1(lr2, std::log(dx) + std::log(dy)));
    v += std::pow(sx * sy, -0.5 * (N - 2)) * l;
  }
  return {v, KernelKind::kGreenEst};
}

KernelValue martin_estimate(const Point& x, const Point& xi, const SpectralParams& params,
                            const DomainSpec& dom) {
  const double tol = 1e-9 * dom.ball_radius;
  const bool on_boundary = std::abs(xi.norm() - dom.ball_radius) <= tol;
  const bool on_sigma = dist_to_sigma(xi, dom) <= tol;
  if (!on_boundary && !on_sigma) throw DomainError("martin_estimate: xi not on the boundary or Sigma");
  const double r = distance(x, xi);
  if (r == 0.0) throw SingularPointError("martin_estimate at x = xi");
  require_off_sigma(x, dom, "martin_estimate");
  const int N = params.N;
  const double d = dist_to_boundary(x, dom);
  const double s = dist_to_sigma(x, dom);
  const double base = d * (params.alpha_minus == 0.0 ? 1.0 : std::pow(s, -params.alpha_minus));
  if (on_boundary) return {base / std::pow(r, N), KernelKind::kMartinEst};
  if (params.critical()) {
    const double xn = x.norm();
    return {d * std::pow(xn, -0.5 * (N - 2)) * std::abs(std::log(xn / domain_diameter(dom))),
            KernelKind::kMartinEst};
  }
  return {base / std::pow(r, N - 2 - 2 * params.alpha_minus), KernelKind::kMartinEst};
}

double n_alpha_reciprocal(const Point& x, const Point& y, double alpha, const DomainSpec& dom) {
  const int N = dom.dim;
  const double r = distance(x, y);
  if (r == 0.0) return 0.0;
  const double m_d = std::max({r, dist_to_boundary(x, dom), dist_to_boundary(y, dom)});
  const double m_s = std::max({r, dist_to_sigma(x, dom), dist_to_sigma(y, dom)});
  return std::pow(r, N - 2) * m_d * m_d * (alpha == 0.0 ? 1.0 : std::pow(m_s, -alpha));
}

KernelValue n_alpha(const Point& x, const Point& y, double alpha, const DomainSpec& dom) {
  if (alpha > dom.dim - 2) throw PreconditionError("n_alpha needs alpha <= N-2");
  if (distance(x, y) == 0.0) throw SingularPointError("n_alpha at x = y");
  return {1.0 / n_alpha_reciprocal(x, y, alpha, dom), KernelKind::kNAlpha};
}

double quasi_metric_check(const Point& x, const Point& y, const Point& z, double alpha,
                          const DomainSpec& dom) {
  if (distance(x, y) == 0.0) throw PreconditionError("quasi_metric_check: x = y");
  const double lhs = n_alpha_reciprocal(x, y, alpha, dom);
  const double rhs = n_alpha_reciprocal(x, z, alpha, dom) + n_alpha_reciprocal(z, y, alpha, dom);
  return lhs / rhs;
}

double quasi_metric_constant(int N, double alpha) {
  return std::pow(2.0, N + 2) * (1.0 + std::pow(2.0, std::abs(alpha)));
}

KernelValue aux_kernel(const Point& x, const Point& y, AuxKind kind, const AuxParams& a,
                       const DomainSpec& dom) {
  const int N = dom.dim;
  const double r = distance(x, y);
  if (r == 0.0) throw SingularPointError("aux_kernel at x = y");
  const double dx = dist_to_boundary(x, dom);
  switch (kind) {
    case AuxKind::kF: {
      if (!std::isfinite(a.kappa) || !std::isfinite(a.theta) || !std::isfinite(a.gamma))
        throw PreconditionError("aux F: exponents must be finite");
      const double sx = dist_to_sigma(x, dom);
      const double dy = dist_to_boundary(y, dom);
      const double lv = a.kappa * std::log(sx) + (-N + 2 + a.theta) * std::log(r) -
                        a.gamma * std::log(dy) + log_min1(std::log(dx) + std::log(dy), 2 * std::log(r));
      return {std::exp(lv), KernelKind::kAuxF};
    }
    case AuxKind::kH: {
      if (!(a.theta < N)) throw PreconditionError("aux H: theta must be < N");
      const double sx = dist_to_sigma(x, dom);
      const double v = dx * (a.alpha == 0.0 ? 1.0 : std::pow(sx, -a.alpha)) * std::pow(r, -N + a.theta);
      return {v, KernelKind::kAuxH};
    }
    case AuxKind::kHtilde: {
      if (!(a.alpha > 0.0 && a.alpha < 0.5 * N))
        throw PreconditionError("aux Htilde: needs 0 < alpha < N/2");
      const double v = dx * std::pow(r, -a.alpha) * std::abs(std::log(r / domain_diameter(dom)));
      return {v, KernelKind::kAuxHtilde};
    }
    case AuxKind::kFtilde: {
      if (dom.sigma_kind != SigmaKind::kPoint) throw PreconditionError("aux Ftilde: needs Sigma = {0}");
      if (!(a.gamma >= 0.0 && a.gamma <= 1.0)) throw PreconditionError("aux Ftilde: needs 0 <= gamma <= 1");
      const double dy = dist_to_boundary(y, dom);
      const double l = std::abs(log_min1(2 * std::log(r), std::log(dx) + std::log(dy)));
      const double v = std::pow(x.norm(), -0.5 * (N - 2)) * std::pow(dy, -a.gamma) * l;
      return {v, KernelKind::kAuxFtilde};
    }
  }
  throw PreconditionError("aux_kernel: unknown kind");
}

KernelValue green_eps_critical(const Point& x, const Point& y, double eps,
                               const SpectralParams& params, const DomainSpec& dom) {
  const int N = params.N;
  if (!params.critical() || dom.sigma_kind != SigmaKind::kPoint)
    throw PreconditionError("green_eps_critical: needs k = 0 and mu = ((N-2)/2)^2");
  if (!(eps > 0.0 && eps < std::min(N - 2.0, 2.0)))
    throw PreconditionError("green_eps_critical: needs 0 < eps < min(N-2, 2)");
  const double r = distance(x, y);
  if (r == 0.0) throw SingularPointError("green_eps_critical at x = y");
  const double dx = dist_to_boundary(x, dom), dy = dist_to_boundary(y, dom);
  const double nx = x.norm(), ny = y.norm();
  const double m_d = std::max({r, dx, dy});
  const double m_s = std::max({r, nx, ny});
  const double kern = std::pow(m_s, N - 2 - eps) / (std::pow(r, N - 2) * m_d * m_d);
  return {dx * dy * std::pow(nx * ny, -0.5 * (N - 2)) * kern, KernelKind::kGreenEps};
}

}  // namespace hardy
