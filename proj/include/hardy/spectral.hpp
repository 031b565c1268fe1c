#pragma once

#include <string>
#include <vector>

#include "hardy/geometry.hpp"

namespace hardy {

struct SpectralParams {
  double mu = 0.0;
  int N = 3;
  int k = 0;
  double H = 0.5;
  double alpha_minus = 0.0;
  double alpha_plus = 1.0;

  // k = 0 and mu = ((N-2)/2)^2: the Green and Martin estimates carry a log factor.
  bool critical() const;
};

// Roots of a^2 - 2 H a + mu = 0 with H = (N-k-2)/2. Throws PreconditionError
// ("mu exceeds H^2") when mu > H^2.
SpectralParams exponents(double mu, int N, int k);

// Exponents attached to (N, k, mu) and the data parameters (gamma, p).
// Quantities whose denominator vanishes (alpha_- = 0 etc.) are +infinity.
struct ExponentTable {
  SpectralParams params;
  double gamma = 1.0;
  double p = 2.0;

  double q_source(double g) const;
  double q_source() const { return q_source(gamma); }
  double q_boundary() const;
  double q_sigma() const;
  double p_tau_max() const;
  double p_nu_max() const;
  double p_sigma_crit() const;
  double vartheta() const;

  static std::string csv_header();
  std::string csv_row() const;
};

enum class KernelKind { kGreenEst, kMartinEst, kNAlpha, kAuxF, kAuxH, kAuxHtilde, kAuxFtilde, kGreenEps };

const char* kernel_kind_name(KernelKind k);

struct KernelValue {
  double value = 0.0;
  KernelKind kind = KernelKind::kGreenEst;
};

// d_Sigma^{-alpha_-} d^gamma. Returns +infinity on Sigma when alpha_- > 0.
double phi_surrogate(const Point& x, const SpectralParams& params, const DomainSpec& dom,
                     double gamma);

KernelValue green_estimate(const Point& x, const Point& y, const SpectralParams& params,
                           const DomainSpec& dom);

// xi must lie on the outer sphere or on Sigma (tolerance 1e-9 R).
KernelValue martin_estimate(const Point& x, const Point& xi, const SpectralParams& params,
                            const DomainSpec& dom);

KernelValue n_alpha(const Point& x, const Point& y, double alpha, const DomainSpec& dom);
// 1 / n_alpha, finite everywhere (zero at x = y).
double n_alpha_reciprocal(const Point& x, const Point& y, double alpha, const DomainSpec& dom);

// [1/N(x,y)] / [1/N(x,z) + 1/N(z,y)]. A z coinciding with x or y contributes a
// zero reciprocal; x = y is rejected.
double quasi_metric_check(const Point& x, const Point& y, const Point& z, double alpha,
                          const DomainSpec& dom);
// Envelope 2^{N+2} (1 + 2^{|alpha|}) used for the quasi-metric assertion.
double quasi_metric_constant(int N, double alpha);

enum class AuxKind { kF, kH, kHtilde, kFtilde };

struct AuxParams {
  double kappa = 0.0;  // F: power of d_Sigma(x)
  double theta = 0.0;  // F, H: shift of the |x-y| power
  double gamma = 0.0;  // F, Ftilde: power of d(y)
  double alpha = 0.0;  // H: power of d_Sigma(x); Htilde: power of |x-y|
};

KernelValue aux_kernel(const Point& x, const Point& y, AuxKind kind, const AuxParams& a,
                       const DomainSpec& dom);

// Critical point case only: d(x) d(y) (|x||y|)^{-(N-2)/2} times the
// N-kernel of order N-2-eps built with max{|x-y|, |x|, |y|}.
KernelValue green_eps_critical(const Point& x, const Point& y, double eps,
                               const SpectralParams& params, const DomainSpec& dom);

// D_Omega = 2 sup |x|.
inline double domain_diameter(const DomainSpec& dom) { return 2.0 * dom.ball_radius; }

}  // namespace hardy
