// Serial reference kernel vs the OpenMP pair kernel.
//   ./bench_kernels --benchmark_counters_tabular=true
// Thread count follows OMP_NUM_THREADS.

#include <benchmark/benchmark.h>
#include <omp.h>

#include <random>

#include "relnbody/kernels.hpp"

namespace {

struct Cloud {
  std::vector<double> masses;
  std::vector<relnbody::Vec3> separations;
};

Cloud make_cloud(std::size_t n) {
  std::mt19937_64 rng(n);
  std::uniform_real_distribution<double> pos(-10.0, 10.0);
  std::uniform_real_distribution<double> mass(0.1, 10.0);
  std::vector<relnbody::Vec3> r(n);
  Cloud c;
  for (auto& p : r) {
    p = {pos(rng), pos(rng), pos(rng)};
    c.masses.push_back(mass(rng));
  }
  c.separations = relnbody::kernels::separations_from_positions(r);
  return c;
}

void BM_Reference(benchmark::State& state) {
  const auto c = make_cloud(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(relnbody::kernels::pair_fields_reference(c.masses, 1.0, c.separations));
  state.counters["pairs/s"] = benchmark::Counter(static_cast<double>(c.separations.size()),
                                                 benchmark::Counter::kIsIterationInvariantRate);
}

void BM_Parallel(benchmark::State& state) {
  const auto c = make_cloud(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(relnbody::kernels::pair_fields(c.masses, 1.0, c.separations));
  state.counters["pairs/s"] = benchmark::Counter(static_cast<double>(c.separations.size()),
                                                 benchmark::Counter::kIsIterationInvariantRate);
  state.counters["threads"] = omp_get_max_threads();
}

}  // namespace

BENCHMARK(BM_Reference)->RangeMultiplier(4)->Range(16, 1024)->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_Parallel)->RangeMultiplier(4)->Range(16, 1024)->Unit(benchmark::kMicrosecond);

BENCHMARK_MAIN();
