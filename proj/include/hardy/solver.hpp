#pragma once

#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "hardy/discretization.hpp"

namespace hardy {

// Scalar nonlinearity g with g(0) = 0.
struct Nonlinearity {
  std::function<double(double)> g;
  double a = 1.0;        // |g(s)| <= a |s|^q_tilde for |s| <= 1
  double q_tilde = 1.0;
  double q = 2.0;        // tail exponent used for Lambda_g
  // g is nondecreasing on |s| <= monotone_radius (infinite unless truncated).
  double monotone_radius = std::numeric_limits<double>::infinity();
  // Set for s -> max(s, 0)^p; lets the solvers skip the std::function call.
  std::optional<double> positive_power;
  std::string name;

  double operator()(double s) const;
  bool is_zero() const { return name == "zero"; }

  static Nonlinearity zero();
  static Nonlinearity linear();
  static Nonlinearity positive_power_of(double p);  // max(s,0)^p
  static Nonlinearity odd_power(double p);          // |s|^{p-1} s
};

struct LambdaG {
  double value = 0.0;
  bool divergent = false;
};

// int_1^inf s^{-q-1} (g(s) - g(-s)) ds: adaptive Gauss-Kronrod on [1, S] in
// log variables plus a power-law tail from the local decay rate at S.
// Divergent when the integrand decays no faster than s^{-1-1e-6}.
LambdaG lambda_g(const Nonlinearity& nl, double q);

// g_n = eta_n g with eta_n = 1 on |t| <= n, 0 on |t| >= n+1 and the C^1 cubic
// 1 - 3s^2 + 2s^3 (s = |t| - n) between.
Nonlinearity truncate(const Nonlinearity& nl, double n);

enum class IterationStatus { kConverged, kDiverged, kMaxIter };
const char* status_name(IterationStatus s);

struct PicardOptions {
  double rel_tol = 1e-10;     // relative weighted-L1 change
  double blowup = 1e12;       // weighted-L1 cap
  int max_iter = 10000;
  double monotone_tol = 1e-9; // relative to the sup norm of the iterate
  bool check_monotone = true;
  bool compute_residual = true;
  bool keep_history = true;
  // Increment solves: relative to the increment, floored at
  // solve_abs_factor * ||W g(u_k)||.
  double solve_rel_tol = 1e-10;
  double solve_abs_factor = 1e-14;
};

struct IterationTrace {
  std::vector<double> l1_norm;     // weighted L1 norm of u_k
  std::vector<double> sup_change;  // sup |u_k - u_{k-1}|
  IterationStatus status = IterationStatus::kMaxIter;
  Field solution;                  // u (diverged runs: last finite iterate)
  double p = 0.0;
  double rho = 0.0;
  double sigma = 0.0;
  int iterations = 0;
  bool monotone = true;
  double fixed_point_residual = std::numeric_limits<double>::quiet_NaN();
};

// Weight used for the weighted L1 norms: d d_Sigma^{-alpha_-}.
std::vector<double> l1_weight(const DiscreteOperator& op);

// Generic monotone scheme u_{k+1} = G[g(u_k)] + w from u_0 (zero if empty),
// run incrementally as u_{k+1} = u_k + G[g(u_k) - g(u_{k-1})].
IterationTrace iterate_fixed_point(const DiscreteOperator& op, const Nonlinearity& nl,
                                   const std::vector<double>& w, const std::vector<double>* u0,
                                   const PicardOptions& opts);

// v_1 = rho G[tau], v_{k+1} = G[v_k^p] + rho G[tau].
IterationTrace picard_source(const DiscreteOperator& op, const MeasureData& tau, double p, double rho,
                             const PicardOptions& opts = {});

// v_0 = 0, v_{k+1} = G[g(v_k + rho G[tau] + sigma K[nu])]; the solution is
// u = v + rho G[tau] + sigma K[nu].
IterationTrace picard_general(const DiscreteOperator& op, const Nonlinearity& nl, const MeasureData& tau,
                              const MeasureData& nu, double rho, double sigma,
                              const PicardOptions& opts = {}, const MartinOptions& mopts = {});

// || u - G[g(u)] - w || / || u || in weighted L1.
double fixed_point_residual(const DiscreteOperator& op, const Nonlinearity& nl, const std::vector<double>& u,
                            const std::vector<double>& w);

struct AnnulusValue {
  int j = 0;             // annulus 2^{-j-1} < d_Sigma <= 2^{-j}
  double max_ratio = 0.0;
  std::size_t nodes = 0;
};

struct DominationResult {
  double max_ratio = 0.0;        // over nodes with d_Sigma > 4h, d > 4h
  std::optional<double> best_c;  // smallest admissible C from the candidate list
  std::vector<AnnulusValue> profile;
  Field source_potential;        // G[tau]
  Field iterated_potential;      // G[(G[tau])^p]
};

DominationResult check_domination(const DiscreteOperator& op, const MeasureData& tau, double p,
                                  const std::vector<double>& c_candidates = {});

enum class DataKind { kTauInterior, kNuSigma, kNuBoundary };
const char* data_kind_name(DataKind k);

struct SweepOptions {
  PicardOptions picard;
  int bisect_steps = 0;        // refinement of each threshold by bisection
  MeasureData data;            // tau for kTauInterior, nu otherwise
  MartinOptions martin;
  // Nonlinearity per p; defaults to max(s,0)^p.
  std::function<Nonlinearity(double)> make_nonlinearity;
};

struct SweepCell {
  double p = 0.0;
  double coupling = 0.0;
  IterationStatus status = IterationStatus::kMaxIter;
  int iterations = 0;
  double final_l1 = 0.0;
};

struct SweepResult {
  DataKind kind = DataKind::kTauInterior;
  std::vector<double> p_list;
  std::vector<double> coupling_list;
  std::vector<SweepCell> cells;      // row-major: p outer, coupling inner
  std::vector<double> threshold;     // per p, largest converged coupling (0 if none)
  std::vector<SweepCell> bisection;  // extra runs made while bisecting
  bool downward_closed = true;
  std::optional<double> critical_p;  // midpoint rule on zero thresholds
  double critical_tolerance = 0.0;   // half the p spacing at the flag

  const SweepCell& cell(std::size_t ip, std::size_t ic) const { return cells[ip * coupling_list.size() + ic]; }
};

// Coupling lists must be ascending. Within a row each run starts from the last
// converged solution, which is a subsolution for larger couplings.
SweepResult threshold_sweep(const DiscreteOperator& op, DataKind kind, const std::vector<double>& p_list,
                            const std::vector<double>& coupling_list, const SweepOptions& opts);

// Midpoint between the largest p with a nonzero threshold and the smallest p
// with a zero threshold (p_list ascending).
std::optional<double> critical_from_thresholds(const std::vector<double>& p_list,
                                               const std::vector<bool>& zero_threshold, double* tolerance);

struct RefinementCollapse {
  std::vector<double> decay_exponent;  // per p, fitted s in threshold ~ h^s
  std::vector<bool> collapsed;         // decay_exponent (minus baseline) > s_tol
  double baseline = 0.0;
  std::optional<double> critical_p;
  double tolerance = 0.0;
};

// Grid version of "threshold is zero": the threshold vanishes under refinement
// at a rate h^s with s > s_tol. thresholds[level][ip]. With relative_to_first
// the rate of p_list[0] (taken as subcritical) is subtracted first, which
// removes the p-independent drift of coarse grids.
RefinementCollapse threshold_collapse(const std::vector<double>& p_list, const std::vector<double>& h_list,
                                      const std::vector<std::vector<double>>& thresholds, double s_tol,
                                      bool relative_to_first = false);

struct ConcentrationRow {
  double depth = 0.0;
  double integral = 0.0;
  double growth = 0.0;  // integral / previous integral (0 for the first)
};

struct ConcentrationReport {
  double p = 0.0;
  std::vector<ConcentrationRow> rows;
  double max_growth = 0.0;
  double min_growth = 0.0;
};

// int F(x, y_n)^p phi dx on the grid for y_n = (1 - depth_n) y* and
// F(x, y) = |x-y|^{2-N} phi(x) / max{d(x)^2, d(y)^2, |x-y|^2}, phi = d d_Sigma^{-alpha_-}.
ConcentrationReport boundary_concentration_experiment(const Grid& g, const SpectralParams& params, double p,
                                                      const Point& y_star, const std::vector<double>& depths);
inline ConcentrationReport boundary_concentration_experiment(const DiscreteOperator& op, double p,
                                                             const Point& y_star, const std::vector<double>& depths) {
  return boundary_concentration_experiment(op.grid(), op.params(), p, y_star, depths);
}

}  // namespace hardy
