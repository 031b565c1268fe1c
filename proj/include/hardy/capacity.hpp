#pragma once

#include <cstdint>
#include <vector>

#include "hardy/discretization.hpp"
#include "hardy/grid.hpp"

namespace hardy {

struct PotentialField {
  Field values;
  std::vector<std::size_t> excluded;  // nodes that coincide with an atom (value 0)
};

// N_alpha[omega] at the nodes of g.
PotentialField n_alpha_potential(const Grid& g, const std::vector<Atom>& omega, double alpha);

struct CapacityParams {
  double alpha = 1.0;
  double s = 2.0;      // capacity exponent; the dual norm uses s' = s/(s-1)
  double b = 1.0;      // weight d^b
  double theta = 0.0;  // weight d_Sigma^theta
};

struct CapacityOptions {
  double h = 1.0 / 16;   // quadrature grid spacing (full grid)
  bool refine_check = true;
  int max_rounds = 200;
  double improvement_cutoff = 1e-6;
  double initial_step = 0.5;
  double divergence_ratio = 1.5;  // refined / coarse dual norm for a single atom
};

struct CapacityEstimate {
  std::vector<Point> target;
  CapacityParams params;
  double bound = 0.0;                 // omega(E)^s
  std::vector<Atom> certificate;      // scaled so that the dual norm is 1
  double dual_norm = 0.0;             // of the certificate, on the quadrature grid
  double refined_dual_norm = 0.0;     // on the h/2 grid (0 if not checked)
  bool divergent = false;
  int rounds = 0;
};

// Quadrature of ||N_alpha[omega]||_{L^{s'}(d^b d_Sigma^theta)} on a full grid.
// Cells containing an atom are replaced by an equal-volume ball around the atom
// on which the leading |x-z|^{2-N} term is integrated radially.
struct DualNorm {
  double value = 0.0;
  bool divergent = false;  // (N-2) s' >= N: the singular cell is not integrable
};
DualNorm dual_norm(const Grid& full, const std::vector<Atom>& omega, const CapacityParams& cp);

// Lower bound on Cap^{b,theta}_{N_alpha,s}(E) from the dual formulation with
// atomic measures on E.
CapacityEstimate cap_lower_bound(const DomainSpec& dom, const std::vector<Point>& target, const CapacityParams& cp,
                                 const CapacityOptions& opts = {});

// theta * s > d, with theta > 0, s > 1, d >= 1.
bool bessel_singleton_criterion(double theta, double s, double d);

struct BallMeasure {
  double estimate = 0.0;
  double std_error = 0.0;
  double volume_law = 0.0;  // max{d,s}^b max{d_Sigma,s}^theta s^N
};

// Monte-Carlo omega(B(x, s) cap Omega) for omega = d^b d_Sigma^theta dx.
BallMeasure weighted_ball_measure(const DomainSpec& dom, const Point& x, double s, double b, double theta,
                                  std::size_t samples, std::uint64_t seed);

}  // namespace hardy
