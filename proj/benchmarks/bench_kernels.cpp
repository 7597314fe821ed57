// Microbenchmarks comparing the OpenMP kernels against their serial twins:
// the segmented sieve vs the serial reference sieve, and the thread scaling
// of the prime-sum and Monte Carlo kernels (deterministic by construction,
// so thread count changes speed, never results).
#include <benchmark/benchmark.h>

#include <thread>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "densitylab/characters.hpp"
#include "densitylab/primesums.hpp"
#include "densitylab/rmt.hpp"
#include "densitylab/testfuncs.hpp"

namespace {

void set_threads(int n) {
#ifdef _OPENMP
  if (n > 0) omp_set_num_threads(n);
#else
  (void)n;
#endif
}

void thread_args(benchmark::internal::Benchmark* b) {
  b->Arg(1);
  const int hw = static_cast<int>(std::thread::hardware_concurrency());
  if (hw > 1) b->Arg(hw);
}

const dlab::PrimeTable& shared_table() {
  static const dlab::PrimeTable table(20'000'000);
  return table;
}

}  // namespace

static void BM_sieve_parallel(benchmark::State& state) {
  set_threads(static_cast<int>(std::thread::hardware_concurrency()));
  for (auto _ : state) {
    dlab::PrimeTable table(state.range(0));
    benchmark::DoNotOptimize(table.primes().size());
  }
}
BENCHMARK(BM_sieve_parallel)->Arg(10'000'000)->Unit(benchmark::kMillisecond);

static void BM_sieve_serial_reference(benchmark::State& state) {
  for (auto _ : state) {
    auto primes = dlab::PrimeTable::reference_sieve(state.range(0));
    benchmark::DoNotOptimize(primes.size());
  }
}
BENCHMARK(BM_sieve_serial_reference)->Arg(10'000'000)->Unit(benchmark::kMillisecond);

static void BM_prime_sum_kernel(benchmark::State& state) {
  set_threads(static_cast<int>(state.range(0)));
  const auto chi = dlab::enumerate_real_primitive(1)[0];
  const auto phi = dlab::TestFunction::fejer(0.8);
  const auto& table = shared_table();  // Q^0.8 = 1.58e7 stays inside the table
  for (auto _ : state) {
    auto res = dlab::lemma_sum(1, 1, chi, phi, 1e9, 1, 1, table);
    benchmark::DoNotOptimize(res.value);
  }
}
BENCHMARK(BM_prime_sum_kernel)->Apply(thread_args)->Unit(benchmark::kMillisecond);

static void BM_mc_moment_kernel(benchmark::State& state) {
  set_threads(static_cast<int>(state.range(0)));
  const auto phi = dlab::TestFunction::fejer(0.5);
  for (auto _ : state) {
    auto est = dlab::centered_moment_mc(dlab::GroupTag::U, 32, phi, 2, 1000, 42);
    benchmark::DoNotOptimize(est.estimate);
  }
}
BENCHMARK(BM_mc_moment_kernel)->Apply(thread_args)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
