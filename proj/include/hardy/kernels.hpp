#pragma once

#include <cstdint>
#include <vector>

#include "hardy/sparse.hpp"

namespace hardy {

enum class Exec { kSerial, kParallel };

// Level-1/2 kernels of the solvers. `serial` is the reference
// implementation; `omp` runs the same arithmetic per entry under OpenMP.
// Results agree exactly except for reductions, whose summation order differs.
namespace kernels {

namespace serial {
void spmv(const CsrMatrix& A, const double* x, double* y);
double dot(std::size_t n, const double* x, const double* y);
// sum x_i y_i / w_i
double dot_inv_weight(std::size_t n, const double* x, const double* y, const double* w);
void axpy(std::size_t n, double a, const double* x, double* y);
// y = x + b y
void xpby(std::size_t n, const double* x, double b, double* y);
// One Gauss-Seidel pass over the listed rows; rows in `rows` must not couple.
void gauss_seidel_rows(const CsrMatrix& A, const double* b, double* x,
                       const std::vector<std::int32_t>& rows);
}  // namespace serial

namespace omp {
void spmv(const CsrMatrix& A, const double* x, double* y);
double dot(std::size_t n, const double* x, const double* y);
double dot_inv_weight(std::size_t n, const double* x, const double* y, const double* w);
void axpy(std::size_t n, double a, const double* x, double* y);
void xpby(std::size_t n, const double* x, double b, double* y);
void gauss_seidel_rows(const CsrMatrix& A, const double* b, double* x,
                       const std::vector<std::int32_t>& rows);
}  // namespace omp

inline void spmv(Exec e, const CsrMatrix& A, const double* x, double* y) {
  e == Exec::kSerial ? serial::spmv(A, x, y) : omp::spmv(A, x, y);
}
inline double dot(Exec e, std::size_t n, const double* x, const double* y) {
  return e == Exec::kSerial ? serial::dot(n, x, y) : omp::dot(n, x, y);
}
inline double dot_inv_weight(Exec e, std::size_t n, const double* x, const double* y, const double* w) {
  return e == Exec::kSerial ? serial::dot_inv_weight(n, x, y, w) : omp::dot_inv_weight(n, x, y, w);
}
inline void axpy(Exec e, std::size_t n, double a, const double* x, double* y) {
  e == Exec::kSerial ? serial::axpy(n, a, x, y) : omp::axpy(n, a, x, y);
}
inline void xpby(Exec e, std::size_t n, const double* x, double b, double* y) {
  e == Exec::kSerial ? serial::xpby(n, x, b, y) : omp::xpby(n, x, b, y);
}
inline void gauss_seidel_rows(Exec e, const CsrMatrix& A, const double* b, double* x,
                              const std::vector<std::int32_t>& rows) {
  e == Exec::kSerial ? serial::gauss_seidel_rows(A, b, x, rows) : omp::gauss_seidel_rows(A, b, x, rows);
}

}  // namespace kernels

// Sets the OpenMP thread count (no-op without OpenMP).
void set_thread_count(int n);
int thread_count();

}  // namespace hardy
