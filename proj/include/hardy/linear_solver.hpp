#pragma once

#include <memory>
#include <vector>

#include "hardy/grid.hpp"
#include "hardy/kernels.hpp"
#include "hardy/sparse.hpp"
#include "hardy/spectral.hpp"

namespace hardy {

class Preconditioner {
 public:
  virtual ~Preconditioner() = default;
  // z = M^{-1} r; must be symmetric positive definite.
  virtual void apply(const std::vector<double>& r, std::vector<double>& z) const = 0;
};

class JacobiPreconditioner final : public Preconditioner {
 public:
  explicit JacobiPreconditioner(const CsrMatrix& A);
  void apply(const std::vector<double>& r, std::vector<double>& z) const override;

 private:
  std::vector<double> inv_diag_;
};

// Cell-centred geometric multigrid V(1,1) cycle. Coarse operators are
// rediscretized on the 2h half-offset lattice; prolongation copies the parent
// value, restriction is its transpose scaled by 2^{-N}. Red-black
// Gauss-Seidel in symmetric order keeps the cycle symmetric.
class MultigridPreconditioner final : public Preconditioner {
 public:
  MultigridPreconditioner(const Grid& fine, const CsrMatrix& fine_matrix, const SpectralParams& params,
                          Exec exec);
  ~MultigridPreconditioner() override;
  void apply(const std::vector<double>& r, std::vector<double>& z) const override;
  std::size_t levels() const;
  bool coarse_direct() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

struct CgOptions {
  double rel_tol = 1e-10;  // relative to the norm of b
  double abs_tol = 0.0;
  int max_iter = 100000;
  Exec exec = Exec::kParallel;
  // Norm weights: residual norms use sum r_i^2 / w_i (orbit sizes on reduced
  // grids, so the norm is that of the unreduced lattice). Null means w = 1.
  const std::vector<double>* inv_weights = nullptr;
};

struct CgResult {
  int iterations = 0;
  double residual = 0.0;  // final residual norm
  double rhs_norm = 0.0;
  bool converged = false;
};

// Preconditioned CG for A x = b starting from the given x. Throws
// NumericalError when a non-positive curvature p^T A p <= 0 is met, which
// signals an indefinite matrix.
CgResult pcg(const CsrMatrix& A, const Preconditioner& M, const std::vector<double>& b,
             std::vector<double>& x, const CgOptions& opts);

// Row ordering by lattice parity; rows of one colour do not couple.
struct Colouring {
  std::vector<std::int32_t> red;
  std::vector<std::int32_t> black;
};
Colouring colour_by_parity(const Grid& g);

}  // namespace hardy
