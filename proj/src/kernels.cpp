#include "hardy/kernels.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace hardy {

namespace {

inline double row_dot(const CsrMatrix& A, std::size_t i, const double* x) {
  double s = 0.0;
  for (auto p = A.row_ptr[i]; p < A.row_ptr[i + 1]; ++p) s += A.val[p] * x[A.col[p]];
  return s;
}

inline void gs_row(const CsrMatrix& A, std::size_t i, const double* b, double* x) {
  double s = b[i];
  double diag = 1.0;
  for (auto p = A.row_ptr[i]; p < A.row_ptr[i + 1]; ++p) {
    const auto c = static_cast<std::size_t>(A.col[p]);
    if (c == i) {
      diag = A.val[p];
    } else {
      s -= A.val[p] * x[c];
    }
  }
  x[i] = s / diag;
}

}  // namespace

namespace kernels::serial {

void spmv(const CsrMatrix& A, const double* x, double* y) {
  for (std::size_t i = 0; i < A.n; ++i) y[i] = row_dot(A, i, x);
}

double dot(std::size_t n, const double* x, const double* y) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += x[i] * y[i];
  return s;
}

double dot_inv_weight(std::size_t n, const double* x, const double* y, const double* w) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += x[i] * y[i] / w[i];
  return s;
}

void axpy(std::size_t n, double a, const double* x, double* y) {
  for (std::size_t i = 0; i < n; ++i) y[i] += a * x[i];
}

void xpby(std::size_t n, const double* x, double b, double* y) {
  for (std::size_t i = 0; i < n; ++i) y[i] = x[i] + b * y[i];
}

void gauss_seidel_rows(const CsrMatrix& A, const double* b, double* x,
                       const std::vector<std::int32_t>& rows) {
  for (std::int32_t r : rows) gs_row(A, static_cast<std::size_t>(r), b, x);
}

}  // namespace kernels::serial

namespace kernels::omp {

void spmv(const CsrMatrix& A, const double* x, double* y) {
  const auto n = static_cast<std::int64_t>(A.n);
#pragma omp parallel for schedule(static)
  for (std::int64_t i = 0; i < n; ++i) y[i] = row_dot(A, static_cast<std::size_t>(i), x);
}

double dot(std::size_t n, const double* x, const double* y) {
  double s = 0.0;
  const auto m = static_cast<std::int64_t>(n);
#pragma omp parallel for schedule(static) reduction(+ : s)
  for (std::int64_t i = 0; i < m; ++i) s += x[i] * y[i];
  return s;
}

double dot_inv_weight(std::size_t n, const double* x, const double* y, const double* w) {
  double s = 0.0;
  const auto m = static_cast<std::int64_t>(n);
#pragma omp parallel for schedule(static) reduction(+ : s)
  for (std::int64_t i = 0; i < m; ++i) s += x[i] * y[i] / w[i];
  return s;
}

void axpy(std::size_t n, double a, const double* x, double* y) {
  const auto m = static_cast<std::int64_t>(n);
#pragma omp parallel for schedule(static)
  for (std::int64_t i = 0; i < m; ++i) y[i] += a * x[i];
}

void xpby(std::size_t n, const double* x, double b, double* y) {
  const auto m = static_cast<std::int64_t>(n);
#pragma omp parallel for schedule(static)
  for (std::int64_t i = 0; i < m; ++i) y[i] = x[i] + b * y[i];
}

void gauss_seidel_rows(const CsrMatrix& A, const double* b, double* x,
                       const std::vector<std::int32_t>& rows) {
  const auto m = static_cast<std::int64_t>(rows.size());
#pragma omp parallel for schedule(static)
  for (std::int64_t t = 0; t < m; ++t) gs_row(A, static_cast<std::size_t>(rows[t]), b, x);
}

}  // namespace kernels::omp

void set_thread_count(int n) {
#ifdef _OPENMP
  if (n > 0) omp_set_num_threads(n);
#else
  (void)n;
#endif
}

int thread_count() {
#ifdef _OPENMP
  return omp_get_max_threads();
#else
  return 1;
#endif
}

}  // namespace hardy
