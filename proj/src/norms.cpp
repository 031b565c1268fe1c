#include "hardy/norms.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

#include "hardy/errors.hpp"
#include "hardy/rng.hpp"

namespace hardy {

WeightedField WeightedField::on_grid(const Grid& g, const std::vector<double>& f,
                                     const std::vector<double>* node_weight) {
  WeightedField wf;
  wf.values = f;
  wf.weights.resize(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) wf.weights[i] = g.mass(i) * (node_weight ? (*node_weight)[i] : 1.0);
  return wf;
}

void WeightedField::validate() const {
  if (values.size() != weights.size()) throw PreconditionError("weighted field: size mismatch");
  for (double w : weights)
    if (!(w > 0.0)) throw PreconditionError("weighted field: weights must be positive");
}

namespace {

struct Sorted {
  std::vector<double> v;  // |f| descending
  std::vector<double> w;
};

Sorted sort_desc(const WeightedField& wf) {
  wf.validate();
  std::vector<std::size_t> idx(wf.values.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
    return std::abs(wf.values[a]) > std::abs(wf.values[b]);
  });
  Sorted s;
  s.v.reserve(idx.size());
  s.w.reserve(idx.size());
  for (std::size_t i : idx) {
    s.v.push_back(std::abs(wf.values[i]));
    s.w.push_back(wf.weights[i]);
  }
  return s;
}

void require_kappa(double kappa) {
  if (!(kappa > 1.0)) throw PreconditionError("weak norms need kappa > 1");
}

// Prefix sup of S(A) / psi(tau(A)) over the descending order. For a set A
// that is optimal, every node outside has |f| <= every node inside (compare
// F(A + i) and F(A - j) using concavity of psi), so A is a superlevel set;
// inside a tie group the quotient is quasi-convex in the added mass, so group
// endpoints suffice. Hence scanning prefixes is exact.
template <class Psi>
double prefix_sup(const Sorted& s, Psi psi) {
  double S = 0.0, M = 0.0, best = 0.0;
  for (std::size_t i = 0; i < s.v.size(); ++i) {
    S += s.v[i] * s.w[i];
    M += s.w[i];
    if (S > 0.0) best = std::max(best, S / psi(M));
  }
  return best;
}

}  // namespace

double distribution_function(const WeightedField& wf, double a) {
  if (!(a > 0.0)) throw PreconditionError("distribution_function needs a > 0");
  double m = 0.0;
  for (std::size_t i = 0; i < wf.values.size(); ++i)
    if (std::abs(wf.values[i]) > a) m += wf.weights[i];
  return m;
}

double weak_norm_star(const WeightedField& wf, double kappa, double* attaining) {
  require_kappa(kappa);
  const Sorted s = sort_desc(wf);
  // sup_a a^kappa lambda(a) is approached as a increases to a sample value v:
  // lambda(v-) is the mass of {|f| >= v}.
  double best = 0.0, arg = 0.0, M = 0.0;
  for (std::size_t i = 0; i < s.v.size();) {
    const double v = s.v[i];
    for (; i < s.v.size() && s.v[i] == v; ++i) M += s.w[i];
    const double val = v * std::pow(M, 1.0 / kappa);
    if (val > best) {
      best = val;
      arg = v;
    }
  }
  if (attaining) *attaining = arg;
  return best;
}

double weak_norm(const WeightedField& wf, double kappa) {
  require_kappa(kappa);
  const double beta = 1.0 - 1.0 / kappa;
  return prefix_sup(sort_desc(wf), [beta](double m) { return std::pow(m, beta); });
}

double log_weak_norm(const WeightedField& wf, double kappa) {
  require_kappa(kappa);
  const double beta = 1.0 - 1.0 / kappa;
  return prefix_sup(sort_desc(wf), [beta](double m) { return std::pow(m, beta) * std::log(std::numbers::e + 1.0 / m); });
}

WeakNormReport weak_norm_report(const WeightedField& wf, double kappa) {
  WeakNormReport r;
  r.kappa = kappa;
  r.star = weak_norm_star(wf, kappa, &r.attaining_threshold);
  r.weak = weak_norm(wf, kappa);
  r.log_weak = log_weak_norm(wf, kappa);
  return r;
}

double lebesgue_norm(const WeightedField& wf, double kappa) {
  wf.validate();
  double s = 0.0;
  for (std::size_t i = 0; i < wf.values.size(); ++i) s += std::pow(std::abs(wf.values[i]), kappa) * wf.weights[i];
  return std::pow(s, 1.0 / kappa);
}

BvivierResult bvivier_check(const Grid& g, const KernelFn& kernel, const WeightFn& eta,
                            const std::vector<Atom>& omega, double kappa, const BvivierOptions& o) {
  require_kappa(kappa);
  const DomainSpec& dom = g.domain();
  const int N = dom.dim;
  const double R = dom.ball_radius;
  const double vol = std::pow(std::numbers::pi, 0.5 * N) / std::tgamma(0.5 * N + 1.0) * std::pow(R, N);
  BvivierResult res;
  res.decay_slope = std::numeric_limits<double>::infinity();
  double total = 0.0;
  for (std::size_t a = 0; a < omega.size(); ++a) {
    total += omega[a].weight;
    StreamRng rng(o.seed, a);
    std::vector<std::pair<double, double>> hv;  // (kernel, eta)
    hv.reserve(o.samples);
    for (std::size_t s = 0; s < o.samples; ++s) {
      Point x(N);
      do {
        for (int c = 0; c < N; ++c) x[c] = R * (2.0 * rng.uniform() - 1.0);
      } while (!(x.norm2() < R * R) || dist_to_sigma(x, dom) == 0.0);
      if (distance(x, omega[a].x) == 0.0) continue;
      const double k = kernel(x, omega[a].x);
      if (k > 0.0) hv.emplace_back(k, eta(x));
    }
    if (hv.size() < o.min_hits) continue;
    std::sort(hv.begin(), hv.end(), [](const auto& p, const auto& q) { return p.first > q.first; });
    const double lam_hi = hv[o.min_hits - 1].first;
    const double lam_lo = hv[hv.size() / 2].first;
    if (!(lam_hi > lam_lo)) continue;
    const double per = vol / static_cast<double>(o.samples);
    std::vector<double> ll, lm;
    for (int l = 0; l < o.ladder_levels; ++l) {
      const double t = static_cast<double>(l) / (o.ladder_levels - 1);
      const double lam = lam_lo * std::pow(lam_hi / lam_lo, t);
      double m = 0.0;
      for (const auto& [k, e] : hv) {
        if (k <= lam) break;
        m += e * per;
      }
      if (m <= 0.0) continue;
      res.C = std::max(res.C, m * std::pow(lam, kappa));
      ll.push_back(std::log(lam));
      lm.push_back(std::log(m));
    }
    // Decay rate from the upper half of the ladder.
    const std::size_t start = ll.size() / 2;
    const std::size_t cnt = ll.size() - start;
    if (cnt >= 3) {
      double mx = 0, my = 0;
      for (std::size_t i = start; i < ll.size(); ++i) {
        mx += ll[i];
        my += lm[i];
      }
      mx /= cnt;
      my /= cnt;
      double sxy = 0, sxx = 0;
      for (std::size_t i = start; i < ll.size(); ++i) {
        sxy += (ll[i] - mx) * (lm[i] - my);
        sxx += (ll[i] - mx) * (ll[i] - mx);
      }
      res.decay_slope = std::min(res.decay_slope, -sxy / sxx);
    }
  }
  res.fit_ok = !(res.decay_slope < kappa - o.slope_tolerance);

  std::vector<double> field(g.size(), 0.0), w(g.size());
  const auto n = static_cast<std::int64_t>(g.size());
#pragma omp parallel for schedule(static)
  for (std::int64_t i = 0; i < n; ++i) {
    const Point x = g.node(static_cast<std::size_t>(i));
    double s = 0.0;
    for (const auto& a : omega)
      if (distance(x, a.x) > 0.0) s += a.weight * kernel(x, a.x);
    field[i] = s;
    w[i] = eta(x);
  }
  if (total > 0.0) res.norm = weak_norm(WeightedField::on_grid(g, field, &w), kappa);
  res.bound = (1.0 + res.C * kappa / (kappa - 1.0)) * total;
  res.pass = res.fit_ok && res.norm <= res.bound;
  return res;
}

}  // namespace hardy
