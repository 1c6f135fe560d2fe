// Serial vs OpenMP MMD kernels.
//
//   bench_kernels --benchmark_filter=Mmd
//
// Args are {batch size, topic count}.

#include <benchmark/benchmark.h>

#include "wlda/kernels.hpp"
#include "wlda/rng.hpp"
#include "wlda/simplex.hpp"

using namespace wlda;

namespace {

struct Sets {
  std::vector<SimplexVector> q, p;
};

Sets make_sets(std::size_t m, std::size_t k) {
  Rng rng(17);
  const auto prior = simplex::DirichletParams::symmetric(k, 0.1);
  return {simplex::sample_dirichlet_batch(prior, m, rng), simplex::sample_dirichlet_batch(prior, m, rng)};
}

template <kernels::Exec E>
void BM_Mmd(benchmark::State& state) {
  const auto s = make_sets(state.range(0), state.range(1));
  for (auto _ : state) benchmark::DoNotOptimize(kernels::mmd(s.q, s.p, true, E).value);
  state.SetItemsProcessed(state.iterations() * state.range(0) * state.range(0) * 3);
}

template <kernels::Exec E>
void BM_Gram(benchmark::State& state) {
  const auto s = make_sets(state.range(0), state.range(1));
  for (auto _ : state) {
    auto g = E == kernels::Exec::parallel ? kernels::gram_parallel(s.q) : kernels::gram_serial(s.q);
    benchmark::DoNotOptimize(g);
  }
  state.SetItemsProcessed(state.iterations() * state.range(0) * state.range(0));
}

void shapes(benchmark::internal::Benchmark* b) {
  for (int m : {64, 256, 1024})
    for (int k : {5, 50}) b->Args({m, k});
}

}  // namespace

BENCHMARK(BM_Mmd<kernels::Exec::serial>)->Name("Mmd/serial")->Apply(shapes)->UseRealTime();
BENCHMARK(BM_Mmd<kernels::Exec::parallel>)->Name("Mmd/parallel")->Apply(shapes)->UseRealTime();
BENCHMARK(BM_Gram<kernels::Exec::serial>)->Name("Gram/serial")->Apply(shapes)->UseRealTime();
BENCHMARK(BM_Gram<kernels::Exec::parallel>)->Name("Gram/parallel")->Apply(shapes)->UseRealTime();

BENCHMARK_MAIN();
