#include "hardy/solver.hpp"

#include <algorithm>
#include <cmath>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "hardy/errors.hpp"

namespace hardy {

double Nonlinearity::operator()(double s) const {
  if (positive_power) return s > 0.0 ? std::pow(s, *positive_power) : 0.0;
  return g(s);
}

Nonlinearity Nonlinearity::zero() {
  Nonlinearity n;
  n.g = [](double) { return 0.0; };
  n.a = 0.0;
  n.name = "zero";
  return n;
}

Nonlinearity Nonlinearity::linear() {
  Nonlinearity n;
  n.g = [](double s) { return s; };
  n.a = 1.0;
  n.q_tilde = 1.0;
  n.name = "linear";
  return n;
}

Nonlinearity Nonlinearity::positive_power_of(double p) {
  if (!(p > 0.0)) throw PreconditionError("power nonlinearity needs p > 0");
  Nonlinearity n;
  n.g = [p](double s) { return s > 0.0 ? std::pow(s, p) : 0.0; };
  n.positive_power = p;
  n.q_tilde = p;
  n.name = "positive-power";
  return n;
}

Nonlinearity Nonlinearity::odd_power(double p) {
  if (!(p > 0.0)) throw PreconditionError("power nonlinearity needs p > 0");
  Nonlinearity n;
  n.g = [p](double s) { return std::copysign(std::pow(std::abs(s), p), s); };
  n.q_tilde = p;
  n.name = "odd-power";
  return n;
}

namespace {

void check_monotone_ladder(const Nonlinearity& nl, double smax) {
  const double lim = std::min(smax, nl.monotone_radius);
  std::vector<double> ladder;
  for (int i = 0; i <= 400; ++i) ladder.push_back(lim * std::pow(10.0, -8.0 + 8.0 * i / 400.0));
  double prev = nl(-ladder.back());
  for (auto it = ladder.rbegin(); it != ladder.rend(); ++it) {
    const double v = nl(-*it);
    if (v < prev) throw PreconditionError("nonlinearity is not monotone on the evaluation ladder");
    prev = v;
  }
  if (nl(0.0) < prev || nl(0.0) != 0.0) throw PreconditionError("nonlinearity must satisfy g(0) = 0 and be monotone");
  prev = 0.0;
  for (double s : ladder) {
    const double v = nl(s);
    if (v < prev) throw PreconditionError("nonlinearity is not monotone on the evaluation ladder");
    prev = v;
  }
}

}  // namespace

LambdaG lambda_g(const Nonlinearity& nl, double q) {
  if (!(q > 1.0)) throw PreconditionError("lambda_g needs q > 1");
  constexpr double kS = 1e6;
  check_monotone_ladder(nl, kS);
  auto integrand = [&](double s) { return std::pow(s, -q - 1.0) * (nl(s) - nl(-s)); };
  // s = e^t.
  auto f = [&](double t) {
    const double s = std::exp(t);
    return integrand(s) * s;
  };
  LambdaG out;
  double err = 0.0;
  const double body = boost::math::quadrature::gauss_kronrod<double, 61>::integrate(
      f, 0.0, std::log(kS), 20, 1e-13, &err);
  const double fS = integrand(kS);
  if (fS <= 0.0) {
    out.value = body;
    return out;
  }
  const double slope = std::log(fS / integrand(0.5 * kS)) / std::log(2.0);
  if (!(slope < -1.0 - 1e-6)) {
    out.divergent = true;
    out.value = std::numeric_limits<double>::infinity();
    return out;
  }
  out.value = body + fS * kS / (-slope - 1.0);
  return out;
}

Nonlinearity truncate(const Nonlinearity& nl, double n) {
  if (!(n >= 1.0)) throw PreconditionError("truncate needs n >= 1");
  Nonlinearity t = nl;
  t.positive_power.reset();
  auto base = nl;
  t.g = [base, n](double s) {
    const double a = std::abs(s);
    if (a <= n) return base(s);
    if (a >= n + 1.0) return 0.0;
    const double r = a - n;
    return (1.0 - 3.0 * r * r + 2.0 * r * r * r) * base(s);
  };
  t.monotone_radius = std::min(nl.monotone_radius, n);
  t.name = nl.name + "-truncated";
  return t;
}

const char* status_name(IterationStatus s) {
  switch (s) {
    case IterationStatus::kConverged: return "Converged";
    case IterationStatus::kDiverged: return "Diverged";
    case IterationStatus::kMaxIter: return "MaxIter";
  }
  return "unknown";
}

std::vector<double> l1_weight(const DiscreteOperator& op) {
  const Grid& g = op.grid();
  const double am = op.params().alpha_minus;
  std::vector<double> w(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) w[i] = g.d(i) * std::pow(g.d_sigma(i), -am);
  return w;
}

namespace {

double wl1(const Grid& g, const std::vector<double>& wt, const std::vector<double>& v) {
  double s = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) s += g.mass(i) * wt[i] * std::abs(v[i]);
  return s;
}

void eval_g(const Nonlinearity& nl, const std::vector<double>& u, std::vector<double>& out) {
  out.resize(u.size());
  if (nl.positive_power) {
    const double p = *nl.positive_power;
    for (std::size_t i = 0; i < u.size(); ++i) out[i] = u[i] > 0.0 ? std::pow(u[i], p) : 0.0;
  } else {
    for (std::size_t i = 0; i < u.size(); ++i) out[i] = nl(u[i]);
  }
}

bool all_finite(const std::vector<double>& v) {
  for (double x : v)
    if (!std::isfinite(x)) return false;
  return true;
}

// G[f] with f given per node; zero right-hand sides are short-cut.
void green_of(const DiscreteOperator& op, const std::vector<double>& f, std::vector<double>& x, double rel,
              double abs_floor) {
  const Grid& g = op.grid();
  std::vector<double> b(f.size());
  bool any = false;
  for (std::size_t i = 0; i < f.size(); ++i) {
    b[i] = g.weight(i) * f[i];
    any = any || b[i] != 0.0;
  }
  if (!any) {
    x.assign(f.size(), 0.0);
    return;
  }
  op.solve_scaled(b, x, rel, abs_floor);
}

double scaled_norm(const DiscreteOperator& op, const std::vector<double>& f) {
  const Grid& g = op.grid();
  double s = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) s += g.weight(i) * f[i] * f[i];
  return std::sqrt(s);
}

}  // namespace

double fixed_point_residual(const DiscreteOperator& op, const Nonlinearity& nl, const std::vector<double>& u,
                            const std::vector<double>& w) {
  const Grid& g = op.grid();
  const auto wt = l1_weight(op);
  std::vector<double> gu, x(u.size());
  eval_g(nl, u, gu);
  for (std::size_t i = 0; i < u.size(); ++i) x[i] = u[i] - w[i];
  green_of(op, gu, x, 1e-13, 0.0);
  std::vector<double> r(u.size());
  for (std::size_t i = 0; i < u.size(); ++i) r[i] = u[i] - x[i] - w[i];
  const double nu = wl1(g, wt, u);
  return nu > 0.0 ? wl1(g, wt, r) / nu : wl1(g, wt, r);
}

IterationTrace iterate_fixed_point(const DiscreteOperator& op, const Nonlinearity& nl, const std::vector<double>& w,
                                   const std::vector<double>* u0, const PicardOptions& opts) {
  const Grid& g = op.grid();
  const std::size_t n = g.size();
  if (w.size() != n) throw PreconditionError("iterate_fixed_point: data size mismatch");
  const auto wt = l1_weight(op);
  const bool check_mono = opts.check_monotone && std::isinf(nl.monotone_radius);
  IterationTrace tr;
  std::vector<double> u = u0 ? *u0 : std::vector<double>(n, 0.0);
  std::vector<double> gu, gu_prev, x(n, 0.0), unew(n), delta(n);

  // First step: u_1 = G[g(u_0)] + w.
  eval_g(nl, u, gu);
  green_of(op, gu, x, opts.solve_rel_tol, 0.0);
  for (std::size_t i = 0; i < n; ++i) unew[i] = x[i] + w[i];
  gu_prev = gu;

  for (int k = 1;; ++k) {
    tr.iterations = k;
    double change = 0.0, sup = 0.0, unorm = 0.0, worst = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double d = unew[i] - u[i];
      change += g.mass(i) * wt[i] * std::abs(d);
      sup = std::max(sup, std::abs(d));
      unorm = std::max(unorm, std::abs(unew[i]));
      worst = std::min(worst, d);
    }
    const double l1 = wl1(g, wt, unew);
    if (opts.keep_history) {
      tr.l1_norm.push_back(l1);
      tr.sup_change.push_back(sup);
    }
    if (!std::isfinite(l1) || !all_finite(unew) || l1 > opts.blowup) {
      tr.status = IterationStatus::kDiverged;
      tr.solution = Field(u);
      tr.solution.diverged = true;
      return tr;
    }
    if (check_mono && worst < -opts.monotone_tol * unorm) {
      tr.monotone = false;
      throw NumericalError("monotone iteration decreased: discretization breakdown");
    }
    u.swap(unew);
    if (change == 0.0 || change < opts.rel_tol * l1) {
      tr.status = IterationStatus::kConverged;
      break;
    }
    if (k >= opts.max_iter) {
      tr.status = IterationStatus::kMaxIter;
      break;
    }
    eval_g(nl, u, gu);
    bool finite = true;
    for (std::size_t i = 0; i < n; ++i) {
      delta[i] = gu[i] - gu_prev[i];
      finite = finite && std::isfinite(delta[i]);
    }
    if (!finite) {
      tr.status = IterationStatus::kDiverged;
      tr.solution = Field(u);
      tr.solution.diverged = true;
      return tr;
    }
    std::fill(x.begin(), x.end(), 0.0);
    green_of(op, delta, x, opts.solve_rel_tol, opts.solve_abs_factor * scaled_norm(op, gu));
    for (std::size_t i = 0; i < n; ++i) unew[i] = u[i] + x[i];
    gu_prev.swap(gu);
  }
  tr.solution = Field(u);
  if (tr.status == IterationStatus::kConverged && opts.compute_residual)
    tr.fixed_point_residual = fixed_point_residual(op, nl, u, w);
  return tr;
}

IterationTrace picard_source(const DiscreteOperator& op, const MeasureData& tau, double p, double rho,
                             const PicardOptions& opts) {
  if (!(p > 1.0)) throw PreconditionError("picard_source needs p > 1");
  if (!(rho >= 0.0)) throw PreconditionError("picard_source needs rho >= 0");
  tau.validate(op.grid().domain(), op.grid().h() / 10.0, true);
  std::vector<double> w(op.grid().size(), 0.0);
  if (rho > 0.0) {
    const Field gt = green_apply(op, tau);
    for (std::size_t i = 0; i < w.size(); ++i) w[i] = rho * gt[i];
  }
  // Start from v_1 = rho G[tau].
  IterationTrace tr = iterate_fixed_point(op, Nonlinearity::positive_power_of(p), w, &w, opts);
  tr.p = p;
  tr.rho = rho;
  return tr;
}

IterationTrace picard_general(const DiscreteOperator& op, const Nonlinearity& nl, const MeasureData& tau,
                              const MeasureData& nu, double rho, double sigma, const PicardOptions& opts,
                              const MartinOptions& mopts) {
  const Grid& g = op.grid();
  std::vector<double> w(g.size(), 0.0);
  if (rho != 0.0) {
    const Field gt = green_apply(op, tau);
    for (std::size_t i = 0; i < w.size(); ++i) w[i] += rho * gt[i];
  }
  if (sigma != 0.0) {
    const Field kn = martin_apply(op, nu, mopts);
    for (std::size_t i = 0; i < w.size(); ++i) w[i] += sigma * kn[i];
  }
  // v_0 = 0 corresponds to u_0 = w.
  IterationTrace tr = iterate_fixed_point(op, nl, w, &w, opts);
  tr.p = nl.positive_power.value_or(0.0);
  tr.rho = rho;
  tr.sigma = sigma;
  return tr;
}

DominationResult check_domination(const DiscreteOperator& op, const MeasureData& tau, double p,
                                  const std::vector<double>& c_candidates) {
  const Grid& g = op.grid();
  const std::size_t n = g.size();
  const double h = g.h();
  DominationResult res;
  res.source_potential = green_apply(op, tau);
  std::vector<double> f(n);
  for (std::size_t i = 0; i < n; ++i) f[i] = res.source_potential[i] > 0.0 ? std::pow(res.source_potential[i], p) : 0.0;
  std::vector<double> x(n, 0.0);
  green_of(op, f, x, op.options().rel_tol, 0.0);
  res.iterated_potential = Field(x);
  int jmax = 1;
  while (std::ldexp(1.0, -jmax - 1) > h) ++jmax;
  res.profile.resize(static_cast<std::size_t>(jmax));
  for (int j = 1; j <= jmax; ++j) res.profile[j - 1].j = j;
  for (std::size_t i = 0; i < n; ++i) {
    if (g.d(i) <= 4.0 * h) continue;
    const double gt = res.source_potential[i];
    const double ratio = gt > 0.0 ? x[i] / gt : 0.0;
    if (g.d_sigma(i) > 4.0 * h) res.max_ratio = std::max(res.max_ratio, ratio);
    const double ds = g.d_sigma(i);
    const int j = static_cast<int>(std::floor(-std::log2(ds)));
    // ds in (2^{-j-1}, 2^{-j}] means j = ceil(-log2 ds) - 1 except at exact powers.
    int jj = j;
    if (std::ldexp(1.0, -jj) < ds) --jj;
    if (jj >= 1 && jj <= jmax) {
      auto& a = res.profile[jj - 1];
      a.max_ratio = std::max(a.max_ratio, ratio);
      ++a.nodes;
    }
  }
  for (double c : c_candidates)
    if (res.max_ratio <= c && (!res.best_c || c < *res.best_c)) res.best_c = c;
  return res;
}

const char* data_kind_name(DataKind k) {
  switch (k) {
    case DataKind::kTauInterior: return "tau-interior";
    case DataKind::kNuSigma: return "nu-sigma";
    case DataKind::kNuBoundary: return "nu-boundary";
  }
  return "unknown";
}

std::optional<double> critical_from_thresholds(const std::vector<double>& p_list,
                                               const std::vector<bool>& zero_threshold, double* tolerance) {
  std::optional<double> nz_max, z_min;
  for (std::size_t i = 0; i < p_list.size(); ++i) {
    if (zero_threshold[i]) {
      if (!z_min || p_list[i] < *z_min) z_min = p_list[i];
    } else {
      if (!nz_max || p_list[i] > *nz_max) nz_max = p_list[i];
    }
  }
  if (!nz_max || !z_min || !(*nz_max < *z_min)) return std::nullopt;
  if (tolerance) *tolerance = 0.5 * (*z_min - *nz_max);
  return 0.5 * (*nz_max + *z_min);
}

SweepResult threshold_sweep(const DiscreteOperator& op, DataKind kind, const std::vector<double>& p_list,
                            const std::vector<double>& coupling_list, const SweepOptions& opts) {
  const Grid& g = op.grid();
  const DomainSpec& dom = g.domain();
  for (std::size_t i = 1; i < coupling_list.size(); ++i)
    if (!(coupling_list[i] > coupling_list[i - 1])) throw PreconditionError("coupling list must be ascending");
  SweepResult res;
  res.kind = kind;
  res.p_list = p_list;
  res.coupling_list = coupling_list;

  Field unit;
  if (kind == DataKind::kTauInterior) {
    opts.data.validate(dom, g.h() / 10.0, true);
    unit = green_apply(op, opts.data);
  } else {
    opts.data.validate(dom, g.h() / 10.0, true);
    for (const auto& a : opts.data.boundary) {
      const bool on_s = dist_to_sigma(a.x, dom) <= g.h() / 10.0;
      if (kind == DataKind::kNuSigma && !on_s) throw DomainError("nu-sigma data must live on Sigma");
      if (kind == DataKind::kNuBoundary && on_s) throw DomainError("nu-boundary data must live on the outer boundary");
    }
    unit = martin_apply(op, opts.data, opts.martin);
  }

  std::vector<double> w(g.size());
  auto run = [&](const Nonlinearity& nl, double c, const std::vector<double>* start) {
    for (std::size_t i = 0; i < w.size(); ++i) w[i] = c * unit[i];
    return iterate_fixed_point(op, nl, w, start ? start : &w, opts.picard);
  };

  for (double p : p_list) {
    const Nonlinearity nl = opts.make_nonlinearity ? opts.make_nonlinearity(p) : Nonlinearity::positive_power_of(p);
    std::optional<std::vector<double>> last_ok;
    double thr = 0.0;
    std::optional<std::size_t> first_fail;
    bool seen_fail = false;
    for (std::size_t ic = 0; ic < coupling_list.size(); ++ic) {
      const double c = coupling_list[ic];
      IterationTrace tr = run(nl, c, last_ok ? &*last_ok : nullptr);
      SweepCell cell{p, c, tr.status, tr.iterations, tr.l1_norm.empty() ? 0.0 : tr.l1_norm.back()};
      res.cells.push_back(cell);
      if (tr.status == IterationStatus::kConverged) {
        if (seen_fail) res.downward_closed = false;
        if (!seen_fail) {
          thr = c;
          last_ok = tr.solution.values;
        }
      } else if (!seen_fail) {
        seen_fail = true;
        first_fail = ic;
      }
    }
    if (first_fail && thr > 0.0 && opts.bisect_steps > 0) {
      double lo = thr, hi = coupling_list[*first_fail];
      for (int b = 0; b < opts.bisect_steps; ++b) {
        const double mid = std::sqrt(lo * hi);
        IterationTrace tr = run(nl, mid, &*last_ok);
        res.bisection.push_back({p, mid, tr.status, tr.iterations, tr.l1_norm.empty() ? 0.0 : tr.l1_norm.back()});
        if (tr.status == IterationStatus::kConverged) {
          lo = mid;
          last_ok = tr.solution.values;
        } else {
          hi = mid;
        }
      }
      thr = lo;
    }
    res.threshold.push_back(thr);
  }
  std::vector<bool> zero(p_list.size());
  for (std::size_t i = 0; i < p_list.size(); ++i) zero[i] = res.threshold[i] == 0.0;
  res.critical_p = critical_from_thresholds(p_list, zero, &res.critical_tolerance);
  return res;
}

RefinementCollapse threshold_collapse(const std::vector<double>& p_list, const std::vector<double>& h_list,
                                      const std::vector<std::vector<double>>& thresholds, double s_tol,
                                      bool relative_to_first) {
  if (h_list.size() < 2 || thresholds.size() != h_list.size())
    throw PreconditionError("threshold_collapse needs at least two grid levels");
  RefinementCollapse rc;
  for (std::size_t ip = 0; ip < p_list.size(); ++ip) {
    bool zero = false;
    double mx = 0, my = 0;
    for (std::size_t l = 0; l < h_list.size(); ++l) {
      if (!(thresholds[l][ip] > 0.0)) zero = true;
      if (!zero) {
        mx += std::log(h_list[l]);
        my += std::log(thresholds[l][ip]);
      }
    }
    double s = std::numeric_limits<double>::infinity();
    if (!zero) {
      const double m = static_cast<double>(h_list.size());
      mx /= m;
      my /= m;
      double sxy = 0, sxx = 0;
      for (std::size_t l = 0; l < h_list.size(); ++l) {
        const double dx = std::log(h_list[l]) - mx;
        sxy += dx * (std::log(thresholds[l][ip]) - my);
        sxx += dx * dx;
      }
      s = sxy / sxx;
    }
    rc.decay_exponent.push_back(s);
  }
  if (relative_to_first && !p_list.empty() && std::isfinite(rc.decay_exponent[0])) rc.baseline = rc.decay_exponent[0];
  for (double s : rc.decay_exponent) rc.collapsed.push_back(s - rc.baseline > s_tol);
  rc.critical_p = critical_from_thresholds(p_list, rc.collapsed, &rc.tolerance);
  return rc;
}

ConcentrationReport boundary_concentration_experiment(const Grid& g, const SpectralParams& params, double p,
                                                      const Point& y_star, const std::vector<double>& depths) {
  const DomainSpec& dom = g.domain();
  if (std::abs(y_star.norm() - dom.ball_radius) > 1e-9 * dom.ball_radius)
    throw DomainError("boundary concentration: y* must lie on the outer sphere");
  const int N = g.dim();
  const double am = params.alpha_minus;
  ConcentrationReport rep;
  rep.p = p;
  rep.min_growth = std::numeric_limits<double>::infinity();
  std::vector<double> phi(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) phi[i] = g.d(i) * std::pow(g.d_sigma(i), -am);
  const double ny = y_star.norm();
  for (double depth : depths) {
    const Point y = (1.0 - depth / ny) * y_star;
    const double dy = dist_to_boundary(y, dom);
    double s = 0.0;
    const auto n = static_cast<std::int64_t>(g.size());
#pragma omp parallel for schedule(static) reduction(+ : s)
    for (std::int64_t i = 0; i < n; ++i) {
      const auto ii = static_cast<std::size_t>(i);
      const Point x = g.node(ii);
      const double r = distance(x, y);
      if (r == 0.0) continue;
      const double m = std::max({g.d(ii) * g.d(ii), dy * dy, r * r});
      const double F = std::pow(r, 2.0 - N) * phi[ii] / m;
      s += g.mass(ii) * std::pow(F, p) * phi[ii];
    }
    ConcentrationRow row{depth, s, 0.0};
    if (!rep.rows.empty()) {
      row.growth = s / rep.rows.back().integral;
      rep.max_growth = std::max(rep.max_growth, row.growth);
      rep.min_growth = std::min(rep.min_growth, row.growth);
    }
    rep.rows.push_back(row);
  }
  return rep;
}

}  // namespace hardy
