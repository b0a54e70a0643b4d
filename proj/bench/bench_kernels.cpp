// Parallel kernels against their serial reference loops.
// Thread count follows OMP_NUM_THREADS / CHNS_THREADS.

#include <benchmark/benchmark.h>

#include <cmath>
#include <random>

#include "chns/grid.hpp"
#include "chns/hydro.hpp"

using namespace chns;

namespace {

GridSpec grid_for(const benchmark::State& st) {
  const int n = static_cast<int>(st.range(0));
  return {n, n, static_cast<double>(n), static_cast<double>(n)};
}

ScalarField field(const GridSpec& g, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> d(-1.0, 1.0);
  ScalarField f(g);
  for (std::size_t k = 0; k < f.size(); ++k) f[k] = d(rng);
  return f;
}

MacVelocity velocity(const GridSpec& g) {
  return from_stream_function(g, [&](double x, double y) {
    return std::sin(M_PI * x / g.lx) * std::sin(M_PI * y / g.ly);
  });
}

template <ScalarField (*Kernel)(const ScalarField&)>
void scalar_kernel(benchmark::State& st) {
  const GridSpec g = grid_for(st);
  const ScalarField f = field(g, 1);
  for (auto _ : st) benchmark::DoNotOptimize(Kernel(f));
  st.SetItemsProcessed(st.iterations() * static_cast<long>(g.cells()));
}

void advect_parallel(benchmark::State& st) {
  const GridSpec g = grid_for(st);
  const ScalarField f = field(g, 2);
  const MacVelocity w = velocity(g);
  for (auto _ : st) benchmark::DoNotOptimize(advect_scalar(w, f, 1e300));
  st.SetItemsProcessed(st.iterations() * static_cast<long>(g.cells()));
}

void advect_serial(benchmark::State& st) {
  const GridSpec g = grid_for(st);
  const ScalarField f = field(g, 2);
  const MacVelocity w = velocity(g);
  for (auto _ : st) benchmark::DoNotOptimize(serial::advect_scalar(w, f));
  st.SetItemsProcessed(st.iterations() * static_cast<long>(g.cells()));
}

template <bool Parallel>
void viscous(benchmark::State& st) {
  const GridSpec g = grid_for(st);
  const MacVelocity w = velocity(g);
  ScalarField nu = field(g, 3);
  for (std::size_t k = 0; k < nu.size(); ++k) nu[k] = 1.5 + 0.5 * nu[k];
  for (auto _ : st) {
    if constexpr (Parallel)
      benchmark::DoNotOptimize(viscous_force(w, nu));
    else
      benchmark::DoNotOptimize(serial::viscous_force(w, nu));
  }
  st.SetItemsProcessed(st.iterations() * static_cast<long>(g.cells()));
}

template <bool Parallel>
void momentum(benchmark::State& st) {
  const GridSpec g = grid_for(st);
  const MacVelocity w = velocity(g);
  for (auto _ : st) {
    if constexpr (Parallel)
      benchmark::DoNotOptimize(momentum_advection(w));
    else
      benchmark::DoNotOptimize(serial::momentum_advection(w));
  }
  st.SetItemsProcessed(st.iterations() * static_cast<long>(g.cells()));
}

}  // namespace

#define SIZES ->RangeMultiplier(2)->Range(64, 512)

BENCHMARK_TEMPLATE(scalar_kernel, laplacian_neumann)->Name("laplacian/parallel") SIZES;
BENCHMARK_TEMPLATE(scalar_kernel, serial::laplacian_neumann)->Name("laplacian/serial") SIZES;
BENCHMARK(advect_parallel)->Name("advect/parallel") SIZES;
BENCHMARK(advect_serial)->Name("advect/serial") SIZES;
BENCHMARK_TEMPLATE(viscous, true)->Name("viscous_force/parallel") SIZES;
BENCHMARK_TEMPLATE(viscous, false)->Name("viscous_force/serial") SIZES;
BENCHMARK_TEMPLATE(momentum, true)->Name("momentum_advection/parallel") SIZES;
BENCHMARK_TEMPLATE(momentum, false)->Name("momentum_advection/serial") SIZES;

BENCHMARK_MAIN();
