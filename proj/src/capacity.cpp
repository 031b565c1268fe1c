#include "hardy/capacity.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "hardy/errors.hpp"
#include "hardy/rng.hpp"

namespace hardy {

namespace {

struct AtomGeom {
  Point z;
  double d = 0.0;
  double ds = 0.0;
};

AtomGeom atom_geom(const DomainSpec& dom, const Point& z) {
  if (z.norm() > dom.ball_radius * (1.0 + 1e-12)) throw PreconditionError("n_alpha_potential: atom outside the closed ball");
  AtomGeom a{z, std::max(0.0, dom.ball_radius - z.norm()), dist_to_sigma(z, dom)};
  return a;
}

// 1/N_alpha(x, z) from cached distances.
inline double reciprocal(double r, double dx, double sx, const AtomGeom& a, int N, double alpha) {
  const double md = std::max({r, dx, a.d});
  const double ms = std::max({r, sx, a.ds});
  return std::pow(r, N - 2) * md * md * (alpha == 0.0 ? 1.0 : std::pow(ms, -alpha));
}

void kernel_column(const Grid& g, const AtomGeom& a, double alpha, std::vector<double>& col,
                   std::vector<std::size_t>* excluded) {
  const int N = g.dim();
  const auto n = static_cast<std::int64_t>(g.size());
  col.resize(g.size());
#pragma omp parallel for schedule(static)
  for (std::int64_t i = 0; i < n; ++i) {
    const auto ii = static_cast<std::size_t>(i);
    const double r = distance(g.node(ii), a.z);
    col[ii] = r == 0.0 ? 0.0 : 1.0 / reciprocal(r, g.d(ii), g.d_sigma(ii), a, N, alpha);
  }
  if (excluded)
    for (std::size_t i = 0; i < g.size(); ++i)
      if (distance(g.node(i), a.z) == 0.0) excluded->push_back(i);
}

void require_full(const Grid& g) {
  const SymmetrySpec& s = g.symmetry();
  if (s.mirror_mask != 0 || s.perm_end - s.perm_begin >= 2)
    throw PreconditionError("capacity quadrature needs an unreduced grid");
}

double ball_volume(int N) { return sphere_area(N) / N; }

// Precomputed columns plus the singular-cell data for a fixed atom set.
class DualNormEvaluator {
 public:
  DualNormEvaluator(const Grid& g, const std::vector<Atom>& atoms, const CapacityParams& cp) : g_(g), cp_(cp) {
    const DomainSpec& dom = g.domain();
    const int N = g.dim();
    sp_ = cp.s / (cp.s - 1.0);
    expo_ = N - (N - 2) * sp_;
    divergent_ = !(expo_ > 0.0);
    geom_.reserve(atoms.size());
    for (const auto& a : atoms) geom_.push_back(atom_geom(dom, a.x));
    cols_.resize(atoms.size());
    for (std::size_t j = 0; j < atoms.size(); ++j) kernel_column(g, geom_[j], cp.alpha, cols_[j], nullptr);
    node_w_.resize(g.size());
    for (std::size_t i = 0; i < g.size(); ++i)
      node_w_[i] = g.cell_volume() * std::pow(g.d(i), cp.b) * std::pow(g.d_sigma(i), cp.theta);
    // Cells holding atoms.
    std::map<std::size_t, std::vector<std::size_t>> by_cell;
    for (std::size_t j = 0; j < atoms.size(); ++j) {
      int lat[kMaxDim];
      for (int a = 0; a < N; ++a) lat[a] = static_cast<int>(std::floor(geom_[j].z[a] / g.h()));
      if (auto c = g.find(lat)) by_cell[*c].push_back(j);
    }
    for (auto& [c, js] : by_cell) {
      cells_.push_back(c);
      cell_atoms_.push_back(js);
      node_w_[c] = 0.0;
    }
    rho_ = g.h() * std::pow(1.0 / ball_volume(N), 1.0 / N);
  }

  bool divergent() const { return divergent_; }

  double operator()(const std::vector<double>& w) const {
    if (divergent_) return std::numeric_limits<double>::infinity();
    const int N = g_.dim();
    const auto n = static_cast<std::int64_t>(g_.size());
    const std::size_t m = w.size();
    double sum = 0.0;
#pragma omp parallel for schedule(static) reduction(+ : sum)
    for (std::int64_t i = 0; i < n; ++i) {
      const auto ii = static_cast<std::size_t>(i);
      if (node_w_[ii] == 0.0) continue;
      double v = 0.0;
      for (std::size_t j = 0; j < m; ++j) v += w[j] * cols_[j][ii];
      if (v > 0.0) sum += node_w_[ii] * std::pow(v, sp_);
    }
    for (std::size_t c = 0; c < cells_.size(); ++c) {
      const auto& js = cell_atoms_[c];
      const AtomGeom& a0 = geom_[js.front()];
      double lead = 0.0, other = 0.0;
      for (std::size_t j = 0; j < m; ++j) {
        if (std::find(js.begin(), js.end(), j) != js.end()) {
          lead += w[j] * std::pow(std::max(a0.d, 1e-300), -2.0) * std::pow(std::max(a0.ds, 1e-300), cp_.alpha);
        } else {
          other += w[j] * cols_[j][cells_[c]];
        }
      }
      double wz = std::pow(a0.d, cp_.b) * std::pow(a0.ds, cp_.theta);
      // Atoms on Sigma or the boundary: use the weight at the cell center.
      if (!std::isfinite(wz) || wz == 0.0)
        wz = std::pow(g_.d(cells_[c]), cp_.b) * std::pow(g_.d_sigma(cells_[c]), cp_.theta);
      // r = rho t^{1/e}: the radial integral becomes rho^e/e int_0^1 (lead + other r^{N-2})^{s'} dt.
      auto f = [&](double t) {
        const double r = rho_ * std::pow(t, 1.0 / expo_);
        return std::pow(lead + other * std::pow(r, N - 2), sp_);
      };
      const double radial = boost::math::quadrature::gauss_kronrod<double, 15>::integrate(f, 0.0, 1.0, 5, 1e-12);
      sum += wz * sphere_area(N) * std::pow(rho_, expo_) / expo_ * radial;
    }
    return std::pow(sum, 1.0 / sp_);
  }

 private:
  const Grid& g_;
  CapacityParams cp_;
  double sp_ = 2.0;
  double expo_ = 1.0;
  bool divergent_ = false;
  double rho_ = 0.0;
  std::vector<AtomGeom> geom_;
  std::vector<std::vector<double>> cols_;
  std::vector<double> node_w_;
  std::vector<std::size_t> cells_;
  std::vector<std::vector<std::size_t>> cell_atoms_;
};

void check_params(const DomainSpec& dom, const CapacityParams& cp) {
  if (!(cp.s > 1.0)) throw PreconditionError("capacity needs s > 1");
  if (!(cp.b > 0.0)) throw PreconditionError("capacity needs b > 0");
  if (!(cp.theta > -dom.dim + dom.k)) throw PreconditionError("capacity needs theta > -N + k");
  if (cp.alpha > dom.dim - 2) throw PreconditionError("n_alpha needs alpha <= N-2");
}

}  // namespace

PotentialField n_alpha_potential(const Grid& g, const std::vector<Atom>& omega, double alpha) {
  if (alpha > g.dim() - 2) throw PreconditionError("n_alpha needs alpha <= N-2");
  PotentialField out;
  out.values = Field(g.size(), 0.0);
  std::vector<double> col;
  for (const auto& a : omega) {
    const AtomGeom geo = atom_geom(g.domain(), a.x);
    kernel_column(g, geo, alpha, col, &out.excluded);
    for (std::size_t i = 0; i < g.size(); ++i) out.values[i] += a.weight * col[i];
  }
  std::sort(out.excluded.begin(), out.excluded.end());
  out.excluded.erase(std::unique(out.excluded.begin(), out.excluded.end()), out.excluded.end());
  return out;
}

DualNorm dual_norm(const Grid& full, const std::vector<Atom>& omega, const CapacityParams& cp) {
  require_full(full);
  check_params(full.domain(), cp);
  DualNorm out;
  if (omega.empty()) return out;
  DualNormEvaluator ev(full, omega, cp);
  out.divergent = ev.divergent();
  std::vector<double> w;
  for (const auto& a : omega) w.push_back(a.weight);
  out.value = ev(w);
  return out;
}

CapacityEstimate cap_lower_bound(const DomainSpec& dom, const std::vector<Point>& target, const CapacityParams& cp,
                                 const CapacityOptions& opts) {
  check_params(dom, cp);
  CapacityEstimate est;
  est.target = target;
  est.params = cp;
  if (target.empty()) return est;
  const Grid g = build_grid(dom, opts.h);
  std::vector<Atom> atoms;
  for (const auto& x : target) atoms.push_back({x, 1.0});
  DualNormEvaluator ev(g, atoms, cp);
  if (ev.divergent()) {
    est.divergent = true;
    return est;
  }
  const std::size_t m = atoms.size();
  // Objective: omega(E) / ||N[omega]|| is scale invariant.
  auto objective = [&](const std::vector<double>& w) {
    double tot = 0.0;
    for (double x : w) tot += x;
    const double nrm = ev(w);
    return nrm > 0.0 && std::isfinite(nrm) ? tot / nrm : 0.0;
  };
  std::vector<double> best(m, 1.0 / static_cast<double>(m));
  double best_val = objective(best);
  if (m > 1) {
    for (std::size_t j = 0; j < m; ++j) {
      std::vector<double> w(m, 0.0);
      w[j] = 1.0;
      const double v = objective(w);
      if (v > best_val) {
        best_val = v;
        best = w;
      }
    }
    double step = opts.initial_step;
    for (int round = 0; round < opts.max_rounds; ++round) {
      est.rounds = round + 1;
      const double start = best_val;
      for (std::size_t j = 0; j < m; ++j) {
        for (double sgn : {1.0, -1.0}) {
          std::vector<double> w = best;
          w[j] = sgn > 0 ? (w[j] > 0.0 ? w[j] * (1.0 + step) : step / static_cast<double>(m)) : w[j] * (1.0 - step);
          double tot = 0.0;
          for (double x : w) tot += x;
          for (double& x : w) x /= tot;
          const double v = objective(w);
          if (v > best_val) {
            best_val = v;
            best = w;
          }
        }
      }
      if (best_val - start <= opts.improvement_cutoff * best_val) {
        step *= 0.5;
        if (step < 1e-3) break;
      }
    }
  }
  const double nrm = ev(best);
  std::vector<Atom> cert;
  for (std::size_t j = 0; j < m; ++j)
    if (best[j] > 0.0) cert.push_back({target[j], best[j] / nrm});
  est.certificate = cert;
  double mass = 0.0;
  std::vector<double> cw;
  for (const auto& a : cert) {
    mass += a.weight;
    cw.push_back(a.weight);
  }
  DualNormEvaluator cev(g, cert, cp);
  est.dual_norm = cev(cw);
  est.bound = std::pow(mass, cp.s);
  if (opts.refine_check) {
    const Grid fine = build_grid(dom, opts.h / 2.0);
    DualNormEvaluator fev(fine, cert, cp);
    est.refined_dual_norm = fev(cw);
    if (!(est.refined_dual_norm <= opts.divergence_ratio * est.dual_norm)) {
      est.divergent = true;
      est.bound = 0.0;
    }
  }
  return est;
}

bool bessel_singleton_criterion(double theta, double s, double d) {
  if (!(theta > 0.0) || !(s > 1.0) || !(d >= 1.0))
    throw PreconditionError("bessel_singleton_criterion needs theta > 0, s > 1, d >= 1");
  return theta * s > d;
}

BallMeasure weighted_ball_measure(const DomainSpec& dom, const Point& x, double s, double b, double theta,
                                  std::size_t samples, std::uint64_t seed) {
  if (!(s > 0.0)) throw PreconditionError("weighted_ball_measure needs s > 0");
  if (samples < 2) throw PreconditionError("weighted_ball_measure needs at least two samples");
  const int N = dom.dim;
  StreamRng rng(seed, 0);
  double sum = 0.0, sum2 = 0.0;
  double dir[kMaxDim];
  for (std::size_t i = 0; i < samples; ++i) {
    random_direction(rng, N, dir);
    const double r = s * std::pow(rng.uniform(), 1.0 / N);
    Point y(N);
    for (int a = 0; a < N; ++a) y[a] = x[a] + r * dir[a];
    double v = 0.0;
    if (inside_open_ball(y, dom)) {
      const double ds = dist_to_sigma(y, dom);
      if (ds > 0.0) v = std::pow(dist_to_boundary(y, dom), b) * std::pow(ds, theta);
    }
    sum += v;
    sum2 += v * v;
  }
  const double n = static_cast<double>(samples);
  const double vol = ball_volume(N) * std::pow(s, N);
  BallMeasure out;
  const double mean = sum / n;
  out.estimate = vol * mean;
  out.std_error = vol * std::sqrt(std::max(0.0, sum2 / n - mean * mean) / (n - 1.0));
  const double dx = inside_open_ball(x, dom) ? dist_to_boundary(x, dom) : 0.0;
  out.volume_law = std::pow(std::max(dx, s), b) * std::pow(std::max(dist_to_sigma(x, dom), s), theta) * std::pow(s, N);
  return out;
}

}  // namespace hardy
