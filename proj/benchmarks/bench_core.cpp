// Microbenchmarks for the hot paths: spectral derivatives, dealiased
// products, Lie derivatives, and a full SPDE step.

#include <benchmark/benchmark.h>

#include <cmath>
#include <optional>

#include "lasalt/expectation.hpp"
#include "lasalt/lie.hpp"
#include "lasalt/ops.hpp"
#include "lasalt/spde.hpp"

using namespace lasalt;

namespace {

ScalarField test_field(const GridPtr& grid) {
  ScalarField f(grid);
  for (int j = 0; j < grid->n(); ++j)
    for (int i = 0; i < grid->n(); ++i)
      f.at(i, j) = std::sin(grid->x(i)) * std::cos(2.0 * grid->y(j)) +
                   0.3 * std::cos(3.0 * grid->x(i));
  return f;
}

void bm_deriv(benchmark::State& state) {
  auto grid = make_grid(int(state.range(0)));
  ScalarField f = test_field(grid);
  for (auto _ : state) benchmark::DoNotOptimize(deriv(f, 0));
  state.SetItemsProcessed(state.iterations() * long(grid->size()));
}

void bm_dealias_product(benchmark::State& state) {
  auto grid = make_grid(int(state.range(0)));
  ScalarField f = test_field(grid);
  for (auto _ : state) benchmark::DoNotOptimize(dealias_product(f, f));
  state.SetItemsProcessed(state.iterations() * long(grid->size()));
}

void bm_biot_savart(benchmark::State& state) {
  auto grid = make_grid(int(state.range(0)));
  ScalarField w = test_field(grid);
  subtract_mean(w);
  for (auto _ : state) benchmark::DoNotOptimize(biot_savart(w));
}

void bm_lie_scalar(benchmark::State& state) {
  auto grid = make_grid(int(state.range(0)));
  ScalarField f = test_field(grid);
  ScalarField w = test_field(grid);
  subtract_mean(w);
  VectorField xi = biot_savart(w);
  for (auto _ : state) benchmark::DoNotOptimize(lie_scalar(xi, f));
}

void bm_spde_step(benchmark::State& state) {
  auto grid = make_grid(int(state.range(0)));
  NoiseBasis basis = build_noise_basis(NoiseSpec::canonical(0.2), grid);
  ScalarField om = test_field(grid);
  subtract_mean(om);
  ExpectationOptions eo;
  eo.dt = 1e-3;
  eo.t_end = 2e-3;
  auto traj = run_expectation(basis, om, test_field(grid), {0, 0}, eo);
  BrownianPath path = sample_path(1, 0, 2, 1e-3, basis.count());
  SpdeState init = make_initial_state(traj.snapshots.front().Theta,
                                      traj.snapshots.front().Omega,
                                      std::nullopt);
  SpdeOptions so;
  so.dt = 1e-3;
  for (auto _ : state) {
    SpdeState s = run_member(traj, basis, so, path, init);
    benchmark::DoNotOptimize(s);
  }
}

}  // namespace

BENCHMARK(bm_deriv)->Arg(32)->Arg(64)->Arg(128);
BENCHMARK(bm_dealias_product)->Arg(32)->Arg(64)->Arg(128);
BENCHMARK(bm_biot_savart)->Arg(32)->Arg(64)->Arg(128);
BENCHMARK(bm_lie_scalar)->Arg(32)->Arg(64)->Arg(128);
BENCHMARK(bm_spde_step)->Arg(32)->Arg(64);

BENCHMARK_MAIN();
