#include "hardy/discretization.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <fmt/format.h>

#include "hardy/errors.hpp"

namespace hardy {

void MeasureData::validate(const DomainSpec& dom, double tol, bool require_positive) const {
  for (const auto& a : interior) {
    if (require_positive && a.weight < 0.0) throw PreconditionError("negative interior atom weight");
    if (!(a.x.norm() < dom.ball_radius) || dist_to_sigma(a.x, dom) <= 0.0)
      throw DomainError("interior atom outside Omega minus Sigma");
  }
  for (const auto& a : boundary) {
    if (require_positive && a.weight < 0.0) throw PreconditionError("negative boundary atom weight");
    const bool on_b = std::abs(a.x.norm() - dom.ball_radius) <= tol;
    const bool on_s = dist_to_sigma(a.x, dom) <= tol;
    if (!on_b && !on_s) throw DomainError("boundary atom not on the boundary or Sigma");
  }
  if (density && require_positive)
    for (double v : *density)
      if (v < 0.0) throw PreconditionError("negative density");
}

CsrMatrix assemble_matrix(const Grid& g, const SpectralParams& params) {
  const int N = g.dim();
  const double h = g.h();
  const double ih2 = 1.0 / (h * h);
  const double R2 = g.domain().ball_radius * g.domain().ball_radius;
  CsrBuilder b(g.size());
  int j[kMaxDim];
  for (std::size_t i = 0; i < g.size(); ++i) {
    const std::int16_t* ji = g.lattice(i);
    const Point x = g.node(i);
    const double w = g.weight(i);
    double diag = -params.mu / (g.d_sigma(i) * g.d_sigma(i));
    for (int a = 0; a < N; ++a) {
      for (int s = -1; s <= 1; s += 2) {
        for (int c = 0; c < N; ++c) j[c] = ji[c];
        j[a] += s;
        Point y = x;
        y[a] += s * h;
        if (y.norm2() >= R2) {
          // Distance along the axis to the sphere: |x + t s e_a| = R.
          const double rest = R2 - x.norm2();
          const double t = -s * x[a] + std::sqrt(x[a] * x[a] + rest);
          const double theta = std::clamp(t / h, 1e-8, 1.0);
          diag += ih2 / theta;
          continue;
        }
        diag += ih2;
        const auto nb = g.find(j);
        if (!nb) throw NumericalError("assemble_matrix: interior neighbour missing from grid");
        b.add(static_cast<std::int32_t>(*nb), -w * ih2);
      }
    }
    b.add(static_cast<std::int32_t>(i), w * diag);
    b.finish_row();
  }
  return b.build();
}

DiscreteOperator::DiscreteOperator(Grid grid, const SpectralParams& params, OperatorOptions opts)
    : grid_(std::move(grid)), params_(params), opts_(opts) {
  const double H2 = params.H * params.H;
  if (params.mu > H2 * (1.0 + 1e-14)) throw PreconditionError("mu exceeds H^2");
  if (params.N != grid_.dim() || params.k != grid_.domain().k)
    throw PreconditionError("spectral parameters do not match the grid dimension");
  A_ = assemble_matrix(grid_, params_);
  inv_w_.resize(grid_.size());
  for (std::size_t i = 0; i < grid_.size(); ++i) inv_w_[i] = grid_.weight(i);
  if (opts_.preconditioning == Preconditioning::kMultigrid)
    precond_ = std::make_unique<MultigridPreconditioner>(grid_, A_, params_, opts_.exec);
  else
    precond_ = std::make_unique<JacobiPreconditioner>(A_);
}

CgResult DiscreteOperator::solve_scaled(const std::vector<double>& b, std::vector<double>& u,
                                        double rel_tol, double abs_tol) const {
  CgOptions o;
  o.rel_tol = rel_tol;
  o.abs_tol = abs_tol;
  o.max_iter = opts_.max_iter;
  o.exec = opts_.exec;
  o.inv_weights = &inv_w_;
  CgResult r = pcg(A_, *precond_, b, u, o);
  if (!r.converged) throw NumericalError("conjugate gradient did not converge");
  return r;
}

CgResult DiscreteOperator::solve(const std::vector<double>& f, std::vector<double>& u,
                                 double abs_tol) const {
  if (f.size() != grid_.size()) throw PreconditionError("solve: field size mismatch");
  std::vector<double> b(f.size());
  for (std::size_t i = 0; i < f.size(); ++i) b[i] = grid_.weight(i) * f[i];
  return solve_scaled(b, u, opts_.rel_tol, abs_tol);
}

void DiscreteOperator::apply(const std::vector<double>& u, std::vector<double>& y) const {
  y.resize(u.size());
  kernels::spmv(opts_.exec, A_, u.data(), y.data());
  for (std::size_t i = 0; i < y.size(); ++i) y[i] /= grid_.weight(i);
}

const std::vector<double>& DiscreteOperator::column(std::size_t node) const {
  {
    std::lock_guard<std::mutex> lock(cache_mutex_);
    auto it = cache_.find(node);
    if (it != cache_.end()) return it->second;
  }
  std::vector<double> b(grid_.size(), 0.0);
  b[node] = 1.0 / grid_.cell_volume();
  std::vector<double> u(grid_.size(), 0.0);
  solve_scaled(b, u, opts_.rel_tol, 0.0);
  std::lock_guard<std::mutex> lock(cache_mutex_);
  if (cache_.size() >= opts_.column_cache && !cache_.empty()) cache_.erase(cache_.begin());
  return cache_.emplace(node, std::move(u)).first->second;
}

double integrate(const Grid& g, const std::vector<double>& f) {
  double s = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) s += g.mass(i) * f[i];
  return s;
}

double weighted_l1(const Grid& g, const std::vector<double>& f, const std::vector<double>* w) {
  double s = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) s += g.mass(i) * std::abs(f[i]) * (w ? (*w)[i] : 1.0);
  return s;
}

namespace {

double full_norm(const Grid& g, const std::vector<double>& u) {
  double s = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) s += g.weight(i) * u[i] * u[i];
  return std::sqrt(s);
}

// Smallest eigenvalue of the generalized problem A u = lambda W u via inverse
// iteration on A - shift W, with a Jacobi-preconditioned inner solve. Used
// only when A itself is not positive definite.
EigenResult shifted_inverse_iteration(const DiscreteOperator& op, double shift, const EigenOptions& eo) {
  const Grid& g = op.grid();
  const std::size_t n = g.size();
  CsrMatrix S = op.matrix();
  for (std::size_t i = 0; i < n; ++i) S.val[S.diag_pos[i]] -= shift * g.weight(i);
  JacobiPreconditioner M(S);
  std::vector<double> u(n, 1.0), x(n, 0.0), b(n), Au(n);
  EigenResult res;
  res.positive_definite = false;
  for (int it = 1; it <= eo.max_iter; ++it) {
    const double nu = full_norm(g, u);
    for (std::size_t i = 0; i < n; ++i) {
      u[i] /= nu;
      b[i] = g.weight(i) * u[i];
    }
    CgOptions o;
    o.rel_tol = 1e-12;
    o.exec = op.options().exec;
    o.inv_weights = &op.inv_weights();
    pcg(S, M, b, x, o);
    u = x;
    const double nx = full_norm(g, u);
    for (double& v : u) v /= nx;
    op.apply(u, Au);
    double num = 0.0;
    for (std::size_t i = 0; i < n; ++i) num += g.weight(i) * u[i] * Au[i];
    res.lambda = num;
    double r2 = 0.0;
    for (std::size_t i = 0; i < n; ++i) r2 += g.weight(i) * std::pow(Au[i] - num * u[i], 2);
    res.residual = std::sqrt(r2);
    res.iterations = it;
    if (res.residual <= eo.tol) break;
  }
  res.phi = Field(u);
  return res;
}

}  // namespace

EigenResult principal_eigen(const DiscreteOperator& op, const EigenOptions& eo) {
  const Grid& g = op.grid();
  const std::size_t n = g.size();
  const double am = op.params().alpha_minus;
  std::vector<double> u(n), x(n), b(n), Au(n);
  for (std::size_t i = 0; i < n; ++i) u[i] = g.d(i) * std::pow(g.d_sigma(i), -am);
  double nu = full_norm(g, u);
  for (double& v : u) v /= nu;
  EigenResult res;
  double lambda = 0.0;
  try {
    for (int it = 1; it <= eo.max_iter; ++it) {
      for (std::size_t i = 0; i < n; ++i) {
        b[i] = g.weight(i) * u[i];
        x[i] = lambda > 0.0 ? u[i] / lambda : 0.0;
      }
      op.solve_scaled(b, x, 1e-12, 0.0);
      const double nx = full_norm(g, x);
      for (std::size_t i = 0; i < n; ++i) u[i] = x[i] / nx;
      op.apply(u, Au);
      double num = 0.0;
      for (std::size_t i = 0; i < n; ++i) num += g.weight(i) * u[i] * Au[i];
      lambda = num;
      double r2 = 0.0;
      for (std::size_t i = 0; i < n; ++i) r2 += g.weight(i) * std::pow(Au[i] - lambda * u[i], 2);
      res.residual = std::sqrt(r2);
      res.iterations = it;
      if (res.residual <= eo.tol) break;
    }
  } catch (const NumericalError&) {
    // Indefinite: shift below the Gershgorin bound of the unreduced rows.
    double lo = std::numeric_limits<double>::infinity();
    const CsrMatrix& A = op.matrix();
    for (std::size_t i = 0; i < n; ++i) {
      double off = 0.0;
      for (auto p = A.row_ptr[i]; p < A.row_ptr[i + 1]; ++p)
        if (static_cast<std::size_t>(A.col[p]) != i) off += std::abs(A.val[p]);
      lo = std::min(lo, (A.diag(i) - off) / g.weight(i));
    }
    res = shifted_inverse_iteration(op, lo - 1.0, eo);
    if (res.residual > eo.tol) throw NumericalError("principal_eigen: no convergence");
    res.positive_definite = res.lambda > 0.0;
    return res;
  }
  if (res.residual > eo.tol) throw NumericalError("principal_eigen: no convergence within the iteration cap");
  double s = 0.0;
  for (double v : u) s += v;
  if (s < 0.0)
    for (double& v : u) v = -v;
  res.lambda = lambda;
  res.phi = Field(u);
  res.positive_definite = lambda > 0.0;
  return res;
}

Field green_column(const DiscreteOperator& op, const Point& y) {
  if (dist_to_sigma(y, op.grid().domain()) <= 0.0) throw DomainError("green_column: pole on Sigma");
  return Field(op.column(op.grid().nearest_node(y)));
}

Field green_apply(const DiscreteOperator& op, const MeasureData& tau) {
  const Grid& g = op.grid();
  Field out(g.size(), 0.0);
  for (const auto& a : tau.interior) {
    if (a.weight == 0.0) continue;
    const auto& col = op.column(g.nearest_node(a.x));
    for (std::size_t i = 0; i < g.size(); ++i) out[i] += a.weight * col[i];
  }
  if (tau.density) {
    std::vector<double> u(g.size(), 0.0);
    op.solve(*tau.density, u);
    for (std::size_t i = 0; i < g.size(); ++i) out[i] += u[i];
  }
  return out;
}

std::size_t martin_reference_node(const Grid& g) {
  std::size_t best = 0;
  double v = -1.0;
  for (std::size_t i = 0; i < g.size(); ++i) {
    const double m = std::min(g.d(i), g.d_sigma(i));
    if (m > v) {
      v = m;
      best = i;
    }
  }
  return best;
}

Point martin_approach_point(const DomainSpec& dom, const Point& xi, double depth,
                            const std::optional<Point>& direction) {
  const double tol = 1e-9 * dom.ball_radius;
  const double r = xi.norm();
  if (std::abs(r - dom.ball_radius) <= 1e-6 * dom.ball_radius) return (1.0 - depth / r) * xi;
  if (dist_to_sigma(xi, dom) > 1e-6 * dom.ball_radius + tol)
    throw DomainError("martin: xi not on the boundary or Sigma");
  Point dir(dom.dim);
  if (direction) {
    dir = *direction;
  } else if (dom.sigma_kind == SigmaKind::kPoint) {
    dir[0] = 1.0;
  } else {
    double in = 0.0;
    for (int a = 0; a <= dom.k; ++a) in += xi[a] * xi[a];
    in = std::sqrt(in);
    // Radial in the plane of Sigma, toward the side with more room.
    const double sign = dom.r_sigma >= dom.ball_radius - dom.r_sigma ? -1.0 : 1.0;
    for (int a = 0; a <= dom.k; ++a) dir[a] = sign * xi[a] / in;
  }
  const double dn = dir.norm();
  const Point y = xi + (depth / dn) * dir;
  if (!inside_open_ball(y, dom)) throw PreconditionError("martin: approach depth leaves the domain");
  return y;
}

Field martin_column(const DiscreteOperator& op, const Point& xi, const MartinOptions& mo) {
  const Grid& g = op.grid();
  const DomainSpec& dom = g.domain();
  const double tol = std::max(1e-9, 1e-6 * dom.ball_radius);
  const bool on_b = std::abs(xi.norm() - dom.ball_radius) <= tol;
  const bool on_s = dist_to_sigma(xi, dom) <= tol;
  if (!on_b && !on_s) throw DomainError("martin_column: xi not on the boundary or Sigma");
  if (mo.depths_in_h.empty()) throw PreconditionError("martin_column: no approach depths");
  for (std::size_t i = 0; i < mo.depths_in_h.size(); ++i) {
    if (mo.depths_in_h[i] < 2.0) throw PreconditionError("martin_column: depths must be >= 2h");
    if (i > 0 && !(mo.depths_in_h[i] < mo.depths_in_h[i - 1]))
      throw PreconditionError("martin_column: depths must decrease");
  }
  const std::size_t x0 = martin_reference_node(g);
  std::vector<Field> cols;
  for (double dh : mo.depths_in_h) {
    const Point y = martin_approach_point(dom, xi, dh * g.h(), mo.direction);
    const auto& col = op.column(g.nearest_node(y));
    Field k(g.size());
    const double ref = col[x0];
    for (std::size_t i = 0; i < g.size(); ++i) k[i] = col[i] / ref;
    cols.push_back(std::move(k));
  }
  Field out = std::move(cols.back());
  if (cols.size() >= 2) {
    const Field& prev = cols[cols.size() - 2];
    std::vector<double> diff(g.size());
    for (std::size_t i = 0; i < g.size(); ++i) diff[i] = out[i] - prev[i];
    out.indicator = weighted_l1(g, diff) / weighted_l1(g, out.values);
    out.warning = out.indicator > 0.5;
  }
  return out;
}

Field martin_apply(const DiscreteOperator& op, const MeasureData& nu, const MartinOptions& mo) {
  const Grid& g = op.grid();
  Field out(g.size(), 0.0);
  for (const auto& a : nu.boundary) {
    if (a.weight == 0.0) continue;
    const Field k = martin_column(op, a.x, mo);
    for (std::size_t i = 0; i < g.size(); ++i) out[i] += a.weight * k[i];
    out.warning = out.warning || k.warning;
    out.indicator = std::max(out.indicator, k.indicator);
  }
  return out;
}

void write_field_csv(std::ostream& os, const Grid& g, const Field& f) {
  os << "node";
  for (int a = 0; a < g.dim(); ++a) os << ",x" << a + 1;
  os << ",value\n";
  for (std::size_t i = 0; i < g.size(); ++i) {
    const Point p = g.node(i);
    os << i;
    for (int a = 0; a < g.dim(); ++a) os << fmt::format(",{:.17g}", p[a]);
    os << fmt::format(",{:.17g}\n", f[i]);
  }
}

void write_operator_triplets(std::ostream& os, const DiscreteOperator& op) { op.matrix().write_triplets(os); }

}  // namespace hardy
