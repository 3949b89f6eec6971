// Serial reference vs OpenMP for the three exact-diagonalization hot loops.
// Run with OMP_NUM_THREADS set to compare scaling.

#include <random>

#include <benchmark/benchmark.h>

#include "entangle/ggm.hpp"
#include "entangle/kernels.hpp"

using namespace entangle;

namespace {

CVector random_state(int N) {
  std::mt19937_64 rng(1);
  std::normal_distribution<double> g;
  CVector v(std::int64_t{1} << N);
  for (auto& x : v) x = cplx(g(rng), g(rng));
  return v.normalized();
}

template <auto Fn>
void assemble(benchmark::State& st) {
  const int N = static_cast<int>(st.range(0));
  const auto terms = model_terms(ModelSpec::xyz(1, 0.5, 0.6));
  for (auto _ : st) benchmark::DoNotOptimize(Fn(terms, N, Boundary::Periodic));
  st.SetLabel("N=" + std::to_string(N));
}

template <auto Fn>
void partial_trace(benchmark::State& st) {
  const int N = static_cast<int>(st.range(0));
  const CVector psi = random_state(N);
  std::vector<int> keep;
  for (int i = 0; i < N / 2; ++i) keep.push_back(2 * i);
  for (auto _ : st) benchmark::DoNotOptimize(Fn(psi, N, 2, keep));
}

template <auto Fn>
void subset_scan(benchmark::State& st) {
  const int N = static_cast<int>(st.range(0));
  const CVector psi = random_state(N);
  const auto subsets = enumerate_subsets(N, N / 2);
  for (auto _ : st) benchmark::DoNotOptimize(Fn(psi, N, 2, subsets));
  st.counters["subsets"] = static_cast<double>(subsets.size());
}

}  // namespace

BENCHMARK(assemble<kernels::assemble_serial>)->Name("assemble/serial")->Arg(10)->Arg(12)->Arg(14)->Unit(benchmark::kMillisecond);
BENCHMARK(assemble<kernels::assemble_omp>)->Name("assemble/omp")->Arg(10)->Arg(12)->Arg(14)->Unit(benchmark::kMillisecond);
BENCHMARK(partial_trace<kernels::partial_trace_serial>)->Name("partial_trace/serial")->Arg(10)->Arg(12)->Unit(benchmark::kMillisecond);
BENCHMARK(partial_trace<kernels::partial_trace_omp>)->Name("partial_trace/omp")->Arg(10)->Arg(12)->Unit(benchmark::kMillisecond);
BENCHMARK(subset_scan<kernels::subset_scan_serial>)->Name("subset_scan/serial")->Arg(8)->Arg(10)->Arg(12)->Unit(benchmark::kMillisecond);
BENCHMARK(subset_scan<kernels::subset_scan_omp>)->Name("subset_scan/omp")->Arg(8)->Arg(10)->Arg(12)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
