#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "hardy/discretization.hpp"
#include "hardy/geometry.hpp"
#include "hardy/grid.hpp"

namespace hardy {

// Values with node masses (e.g. weight function times cell volume).
struct WeightedField {
  std::vector<double> values;
  std::vector<double> weights;

  // values of f with weights w(x_i) * mass_i on the unreduced lattice.
  static WeightedField on_grid(const Grid& g, const std::vector<double>& f,
                               const std::vector<double>* node_weight = nullptr);
  void validate() const;
};

struct WeakNormReport {
  double kappa = 0.0;
  double star = 0.0;
  double weak = 0.0;
  double log_weak = 0.0;
  double attaining_threshold = 0.0;  // a at which the star sup is reached
};

// Mass of {|f| > a}.
double distribution_function(const WeightedField& wf, double a);
// (sup_a a^kappa lambda_f(a))^{1/kappa}.
double weak_norm_star(const WeightedField& wf, double kappa, double* attaining = nullptr);
// sup_A int_A |f| / tau(A)^{1-1/kappa}.
double weak_norm(const WeightedField& wf, double kappa);
// Same with the denominator multiplied by ln(e + 1/tau(A)).
double log_weak_norm(const WeightedField& wf, double kappa);
WeakNormReport weak_norm_report(const WeightedField& wf, double kappa);
// (int |f|^kappa)^{1/kappa}.
double lebesgue_norm(const WeightedField& wf, double kappa);

using KernelFn = std::function<double(const Point& x, const Point& y)>;
using WeightFn = std::function<double(const Point& x)>;

struct BvivierOptions {
  std::size_t samples = 200000;  // Monte-Carlo points per atom
  std::uint64_t seed = 1;
  int ladder_levels = 16;
  std::size_t min_hits = 30;     // top of the ladder keeps this many sample hits
  double slope_tolerance = 0.25; // accepted shortfall of the fitted decay rate
};

struct BvivierResult {
  double C = 0.0;            // max over ladder and atoms of m_lambda lambda^kappa
  double decay_slope = 0.0;  // fitted -d log m / d log lambda (worst atom)
  double norm = 0.0;         // weak norm of H[omega] on the grid
  double bound = 0.0;        // (1 + C kappa/(kappa-1)) omega(total)
  bool fit_ok = true;
  bool pass = true;
};

// Checks the distribution-function hypothesis m_lambda(y) <= C lambda^{-kappa}
// at the atoms of omega by Monte Carlo, then the resulting weak-norm bound for
// H[omega] on the grid nodes.
BvivierResult bvivier_check(const Grid& g, const KernelFn& kernel, const WeightFn& eta,
                            const std::vector<Atom>& omega, double kappa, const BvivierOptions& opts);

}  // namespace hardy
