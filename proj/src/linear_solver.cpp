#include "hardy/linear_solver.hpp"

#include <cmath>

#include <Eigen/Dense>

#include "hardy/discretization.hpp"
#include "hardy/errors.hpp"

namespace hardy {

JacobiPreconditioner::JacobiPreconditioner(const CsrMatrix& A) : inv_diag_(A.n) {
  for (std::size_t i = 0; i < A.n; ++i) inv_diag_[i] = 1.0 / A.diag(i);
}

void JacobiPreconditioner::apply(const std::vector<double>& r, std::vector<double>& z) const {
  z.resize(r.size());
  for (std::size_t i = 0; i < r.size(); ++i) z[i] = r[i] * inv_diag_[i];
}

Colouring colour_by_parity(const Grid& g) {
  Colouring c;
  for (std::size_t i = 0; i < g.size(); ++i)
    (g.parity(i) == 0 ? c.red : c.black).push_back(static_cast<std::int32_t>(i));
  return c;
}

namespace {

constexpr std::size_t kCoarseDirectMax = 1200;
constexpr int kCoarseFallbackSweeps = 40;

struct Level {
  Grid grid;
  CsrMatrix owned;
  const CsrMatrix* A = nullptr;
  Colouring colour;
  std::vector<std::int32_t> parent;  // index on the next coarser level, -1 if none
  mutable std::vector<double> x, b, r;
};

}  // namespace

struct MultigridPreconditioner::Impl {
  std::vector<Level> levels;
  Eigen::LLT<Eigen::MatrixXd> llt;
  bool direct = false;
  Exec exec = Exec::kParallel;
  double restrict_scale = 1.0;

  void smooth(const Level& L, bool forward) const {
    const double* b = L.b.data();
    double* x = L.x.data();
    if (forward) {
      kernels::gauss_seidel_rows(exec, *L.A, b, x, L.colour.red);
      kernels::gauss_seidel_rows(exec, *L.A, b, x, L.colour.black);
    } else {
      kernels::gauss_seidel_rows(exec, *L.A, b, x, L.colour.black);
      kernels::gauss_seidel_rows(exec, *L.A, b, x, L.colour.red);
    }
  }

  void coarse_solve(const Level& L) const {
    const auto n = static_cast<Eigen::Index>(L.A->n);
    if (direct) {
      Eigen::Map<const Eigen::VectorXd> bb(L.b.data(), n);
      Eigen::Map<Eigen::VectorXd> xx(L.x.data(), n);
      xx = llt.solve(bb);
      return;
    }
    std::fill(L.x.begin(), L.x.end(), 0.0);
    for (int s = 0; s < kCoarseFallbackSweeps; ++s) {
      smooth(L, true);
      smooth(L, false);
    }
  }

  void vcycle(std::size_t l) const {
    const Level& L = levels[l];
    if (l + 1 == levels.size()) {
      coarse_solve(L);
      return;
    }
    const Level& C = levels[l + 1];
    std::fill(L.x.begin(), L.x.end(), 0.0);
    smooth(L, true);
    kernels::spmv(exec, *L.A, L.x.data(), L.r.data());
    std::fill(C.b.begin(), C.b.end(), 0.0);
    for (std::size_t i = 0; i < L.A->n; ++i) {
      const auto p = L.parent[i];
      if (p >= 0) C.b[p] += restrict_scale * (L.b[i] - L.r[i]);
    }
    vcycle(l + 1);
    for (std::size_t i = 0; i < L.A->n; ++i) {
      const auto p = L.parent[i];
      if (p >= 0) L.x[i] += C.x[p];
    }
    smooth(L, false);
  }
};

MultigridPreconditioner::MultigridPreconditioner(const Grid& fine, const CsrMatrix& fine_matrix,
                                                 const SpectralParams& params, Exec exec)
    : impl_(std::make_unique<Impl>()) {
  impl_->exec = exec;
  impl_->restrict_scale = std::pow(0.5, fine.dim());
  auto& lv = impl_->levels;
  lv.reserve(16);
  {
    Level L;
    L.grid = fine;
    L.A = &fine_matrix;
    lv.push_back(std::move(L));
  }
  const double R = fine.domain().ball_radius;
  while (lv.back().grid.size() > kCoarseDirectMax) {
    const double hc = 2.0 * lv.back().grid.h();
    if (hc > R / 2.0) break;
    Grid cg = build_grid_unchecked(fine.domain(), hc, fine.symmetry());
    if (cg.size() < 8) break;
    Level C;
    C.grid = std::move(cg);
    C.owned = assemble_matrix(C.grid, params);
    lv.push_back(std::move(C));
  }
  for (auto& L : lv) {
    L.A = L.A ? L.A : &L.owned;
    L.colour = colour_by_parity(L.grid);
    L.x.assign(L.A->n, 0.0);
    L.b.assign(L.A->n, 0.0);
    L.r.assign(L.A->n, 0.0);
  }
  // Re-point owned matrices after the vector settled.
  for (std::size_t l = 1; l < lv.size(); ++l) lv[l].A = &lv[l].owned;
  for (std::size_t l = 0; l + 1 < lv.size(); ++l) {
    const Grid& g = lv[l].grid;
    const Grid& c = lv[l + 1].grid;
    lv[l].parent.assign(g.size(), -1);
    int j[kMaxDim];
    for (std::size_t i = 0; i < g.size(); ++i) {
      const std::int16_t* jj = g.lattice(i);
      for (int a = 0; a < g.dim(); ++a) j[a] = static_cast<int>(std::floor(jj[a] / 2.0));
      if (auto p = c.find(j)) lv[l].parent[i] = static_cast<std::int32_t>(*p);
    }
  }
  const Level& last = lv.back();
  if (last.A->n <= 2 * kCoarseDirectMax) {
    const auto n = static_cast<Eigen::Index>(last.A->n);
    Eigen::MatrixXd dense = Eigen::MatrixXd::Zero(n, n);
    for (std::size_t i = 0; i < last.A->n; ++i)
      for (auto p = last.A->row_ptr[i]; p < last.A->row_ptr[i + 1]; ++p)
        dense(static_cast<Eigen::Index>(i), last.A->col[p]) = last.A->val[p];
    impl_->llt.compute(dense);
    impl_->direct = impl_->llt.info() == Eigen::Success;
  }
}

MultigridPreconditioner::~MultigridPreconditioner() = default;

std::size_t MultigridPreconditioner::levels() const { return impl_->levels.size(); }
bool MultigridPreconditioner::coarse_direct() const { return impl_->direct; }

void MultigridPreconditioner::apply(const std::vector<double>& r, std::vector<double>& z) const {
  const Level& L = impl_->levels.front();
  std::copy(r.begin(), r.end(), L.b.begin());
  impl_->vcycle(0);
  z.assign(L.x.begin(), L.x.end());
}

CgResult pcg(const CsrMatrix& A, const Preconditioner& M, const std::vector<double>& b,
             std::vector<double>& x, const CgOptions& opts) {
  const std::size_t n = A.n;
  const Exec ex = opts.exec;
  if (b.size() != n) throw PreconditionError("pcg: right-hand side size mismatch");
  if (x.size() != n) x.assign(n, 0.0);
  std::vector<double> ones;
  const double* w = nullptr;
  if (opts.inv_weights) w = opts.inv_weights->data();
  auto norm = [&](const std::vector<double>& v) {
    return std::sqrt(w ? kernels::dot_inv_weight(ex, n, v.data(), v.data(), w)
                       : kernels::dot(ex, n, v.data(), v.data()));
  };
  CgResult res;
  res.rhs_norm = norm(b);
  std::vector<double> r(n), z(n), p(n), Ap(n);
  kernels::spmv(ex, A, x.data(), r.data());
  for (std::size_t i = 0; i < n; ++i) r[i] = b[i] - r[i];
  const double target = std::max(opts.rel_tol * res.rhs_norm, opts.abs_tol);
  res.residual = norm(r);
  if (res.residual <= target) {
    res.converged = true;
    return res;
  }
  M.apply(r, z);
  p = z;
  double rz = kernels::dot(ex, n, r.data(), z.data());
  for (int it = 1; it <= opts.max_iter; ++it) {
    kernels::spmv(ex, A, p.data(), Ap.data());
    const double pAp = kernels::dot(ex, n, p.data(), Ap.data());
    if (!(pAp > 0.0)) throw NumericalError("pcg: non-positive curvature (matrix not positive definite)");
    const double alpha = rz / pAp;
    kernels::axpy(ex, n, alpha, p.data(), x.data());
    kernels::axpy(ex, n, -alpha, Ap.data(), r.data());
    res.iterations = it;
    res.residual = norm(r);
    if (!std::isfinite(res.residual)) throw NumericalError("pcg: non-finite residual");
    if (res.residual <= target) {
      res.converged = true;
      return res;
    }
    M.apply(r, z);
    const double rz_new = kernels::dot(ex, n, r.data(), z.data());
    kernels::xpby(ex, n, z.data(), rz_new / rz, p.data());
    rz = rz_new;
  }
  return res;
}

}  // namespace hardy
