// Serial reference kernels against their OpenMP counterparts, plus a full
// multigrid-preconditioned solve under each execution policy.
//
//   ./bench_kernels --benchmark_filter=Spmv
// Thread count follows OMP_NUM_THREADS.

#include <benchmark/benchmark.h>

#include <map>
#include <memory>

#include "hardy/discretization.hpp"
#include "hardy/kernels.hpp"
#include "hardy/linear_solver.hpp"

using namespace hardy;

namespace {

struct Problem {
  Grid grid;
  CsrMatrix A;
  Colouring colour;
  std::vector<double> x, y, w;
};

// Full N=3 lattice of spacing 1/n, built once per size.
const Problem& problem(int n) {
  static std::map<int, std::unique_ptr<Problem>> cache;
  auto& p = cache[n];
  if (!p) {
    Grid g = build_grid(DomainSpec::point(3), 1.0 / n);
    CsrMatrix A = assemble_matrix(g, exponents(0.1875, 3, 0));
    Colouring c = colour_by_parity(g);
    p = std::make_unique<Problem>(Problem{std::move(g), std::move(A), std::move(c), {}, {}, {}});
    StreamRng rng(11, 0);
    for (std::size_t i = 0; i < p->grid.size(); ++i) {
      p->x.push_back(rng.uniform() - 0.5);
      p->y.push_back(rng.uniform() - 0.5);
      p->w.push_back(1.0 + rng.uniform());
    }
  }
  return *p;
}

Exec exec_of(const benchmark::State& s) { return s.range(1) == 0 ? Exec::kSerial : Exec::kParallel; }

void label(benchmark::State& s, const Problem& p) {
  s.SetLabel(exec_of(s) == Exec::kSerial ? "serial" : "omp");
  s.counters["nodes"] = static_cast<double>(p.grid.size());
}

void BM_Spmv(benchmark::State& s) {
  const Problem& p = problem(static_cast<int>(s.range(0)));
  std::vector<double> out(p.grid.size());
  for (auto _ : s) {
    kernels::spmv(exec_of(s), p.A, p.x.data(), out.data());
    benchmark::DoNotOptimize(out.data());
  }
  label(s, p);
  s.SetItemsProcessed(s.iterations() * static_cast<std::int64_t>(p.A.nnz()));
}

void BM_Dot(benchmark::State& s) {
  const Problem& p = problem(static_cast<int>(s.range(0)));
  for (auto _ : s) benchmark::DoNotOptimize(kernels::dot(exec_of(s), p.x.size(), p.x.data(), p.y.data()));
  label(s, p);
  s.SetItemsProcessed(s.iterations() * static_cast<std::int64_t>(p.x.size()));
}

void BM_DotInvWeight(benchmark::State& s) {
  const Problem& p = problem(static_cast<int>(s.range(0)));
  for (auto _ : s)
    benchmark::DoNotOptimize(kernels::dot_inv_weight(exec_of(s), p.x.size(), p.x.data(), p.y.data(), p.w.data()));
  label(s, p);
  s.SetItemsProcessed(s.iterations() * static_cast<std::int64_t>(p.x.size()));
}

void BM_Axpy(benchmark::State& s) {
  const Problem& p = problem(static_cast<int>(s.range(0)));
  std::vector<double> out = p.y;
  for (auto _ : s) {
    kernels::axpy(exec_of(s), p.x.size(), 1e-9, p.x.data(), out.data());
    benchmark::DoNotOptimize(out.data());
  }
  label(s, p);
  s.SetItemsProcessed(s.iterations() * static_cast<std::int64_t>(p.x.size()));
}

void BM_GaussSeidel(benchmark::State& s) {
  const Problem& p = problem(static_cast<int>(s.range(0)));
  std::vector<double> u(p.grid.size(), 0.0);
  for (auto _ : s) {
    kernels::gauss_seidel_rows(exec_of(s), p.A, p.x.data(), u.data(), p.colour.red);
    kernels::gauss_seidel_rows(exec_of(s), p.A, p.x.data(), u.data(), p.colour.black);
    benchmark::DoNotOptimize(u.data());
  }
  label(s, p);
  s.SetItemsProcessed(s.iterations() * static_cast<std::int64_t>(p.grid.size()));
}

void BM_Solve(benchmark::State& s) {
  const int n = static_cast<int>(s.range(0));
  OperatorOptions oo;
  oo.exec = exec_of(s);
  DiscreteOperator op(build_grid(DomainSpec::point(3), 1.0 / n), exponents(0.1875, 3, 0), oo);
  const std::vector<double> f(op.grid().size(), 1.0);
  int iters = 0;
  for (auto _ : s) {
    std::vector<double> u;
    iters = op.solve(f, u).iterations;
    benchmark::DoNotOptimize(u.data());
  }
  s.SetLabel(oo.exec == Exec::kSerial ? "serial" : "omp");
  s.counters["nodes"] = static_cast<double>(op.grid().size());
  s.counters["cg_iters"] = iters;
}

void sizes(benchmark::internal::Benchmark* b) {
  for (int n : {16, 32, 64})
    for (int e : {0, 1}) b->Args({n, e});
}

}  // namespace

BENCHMARK(BM_Spmv)->Apply(sizes);
BENCHMARK(BM_Dot)->Apply(sizes);
BENCHMARK(BM_DotInvWeight)->Apply(sizes);
BENCHMARK(BM_Axpy)->Apply(sizes);
BENCHMARK(BM_GaussSeidel)->Apply(sizes);
BENCHMARK(BM_Solve)->Args({16, 0})->Args({16, 1})->Args({32, 0})->Args({32, 1})->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
