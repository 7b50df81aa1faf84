// OpenMP kernels against their serial references. Run with OMP_NUM_THREADS
// set to compare thread counts; the Arg is the node count.

#include <benchmark/benchmark.h>

#include "hopscope/generators.hpp"
#include "hopscope/kernels.hpp"
#include "hopscope/normalization.hpp"

using namespace hopscope;

namespace {

// About 8 out-edges per node.
SparseCountMatrix bench_graph(std::size_t n) {
  Rng rng(n);
  return erdos_renyi(n, 8.0 / static_cast<double>(n), rng);
}

DenseMatrix bench_dense(std::size_t r, std::size_t c) {
  Rng rng(r * 31 + c);
  DenseMatrix m(r, c);
  for (double& v : m.data()) v = normal01(rng);
  return m;
}

template <auto Kernel>
void spgemm_count(benchmark::State& state) {
  auto a = bench_graph(static_cast<std::size_t>(state.range(0)));
  auto a2 = Kernel(a, a);
  for (auto _ : state) benchmark::DoNotOptimize(Kernel(a2, a));
}

template <auto Kernel>
void spgemm_support(benchmark::State& state) {
  auto a = bench_graph(static_cast<std::size_t>(state.range(0)));
  auto p = support(a);
  for (int i = 0; i < 3; ++i) p = Kernel(p, a);
  for (auto _ : state) benchmark::DoNotOptimize(Kernel(p, a));
}

template <auto Kernel>
void spmm(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  auto adj = normalize(bench_graph(n), NormScheme::sym);
  auto h = bench_dense(n, 64);
  for (auto _ : state) benchmark::DoNotOptimize(Kernel(adj, h));
}

template <auto Kernel>
void gemm(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  auto a = bench_dense(n, 64);
  auto b = bench_dense(64, 64);
  for (auto _ : state) benchmark::DoNotOptimize(Kernel(a, b));
}

}  // namespace

BENCHMARK(spgemm_count<kernels::spgemm_count>)->Name("spgemm_count/omp")->Arg(2000)->Arg(8000);
BENCHMARK(spgemm_count<kernels::serial::spgemm_count>)->Name("spgemm_count/serial")->Arg(2000)->Arg(8000);
BENCHMARK(spgemm_support<kernels::spgemm_support>)->Name("spgemm_support/omp")->Arg(2000)->Arg(8000);
BENCHMARK(spgemm_support<kernels::serial::spgemm_support>)->Name("spgemm_support/serial")->Arg(2000)->Arg(8000);
BENCHMARK(spmm<kernels::spmm>)->Name("spmm/omp")->Arg(2000)->Arg(20000);
BENCHMARK(spmm<kernels::serial::spmm>)->Name("spmm/serial")->Arg(2000)->Arg(20000);
BENCHMARK(gemm<kernels::gemm>)->Name("gemm/omp")->Arg(2000)->Arg(20000);
BENCHMARK(gemm<kernels::serial::gemm>)->Name("gemm/serial")->Arg(2000)->Arg(20000);

BENCHMARK_MAIN();
