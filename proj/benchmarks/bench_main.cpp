#include <benchmark/benchmark.h>

#include <random>
#include <vector>

#include "lbmcf/flow_engine.hpp"

namespace {

using namespace lbmcf;

Background bump_background(int n) {
  BackgroundSpec spec;
  spec.bump_amplitude = 0.1;
  spec.bump_modes = {parse_trig_product("s1:c0:s1:c0")};
  return make_background(GridSpec(n), spec);
}

void BM_PencilEigenvalues(benchmark::State& state) {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(-3.0, 3.0);
  const AlphaFrame frame(hermitian(1.5, 0.8, Complex(0.2, 0.1)));
  std::vector<Mat2> fs;
  for (int k = 0; k < 1024; ++k) fs.push_back(hermitian(u(rng), u(rng), Complex(u(rng), u(rng))));
  for (auto _ : state) {
    double acc = 0.0;
    for (const Mat2& f : fs) acc += frame.eigenvalues(f).hi;
    benchmark::DoNotOptimize(acc);
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(fs.size()));
}
BENCHMARK(BM_PencilEigenvalues);

void BM_ComplexHessian(benchmark::State& state) {
  const GridSpec g(static_cast<int>(state.range(0)));
  const ScalarField phi = random_band_limited(g, 3, 0.1, 1);
  for (auto _ : state) benchmark::DoNotOptimize(complex_hessian(phi));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(g.size()));
}
BENCHMARK(BM_ComplexHessian)->Arg(8)->Arg(16)->Unit(benchmark::kMillisecond);

void BM_PhaseField(benchmark::State& state) {
  const Background bg = bump_background(static_cast<int>(state.range(0)));
  const ScalarField phi = random_band_limited(bg.grid(), 2, 0.003, 2);
  for (auto _ : state) benchmark::DoNotOptimize(compute_phase_field(phi, bg));
}
BENCHMARK(BM_PhaseField)->Arg(8)->Arg(16)->Unit(benchmark::kMillisecond);

void BM_FlowStep(benchmark::State& state) {
  const Background bg = bump_background(static_cast<int>(state.range(0)));
  const Scheme scheme = static_cast<Scheme>(state.range(1));
  const FlowState s = make_state(0.0, ScalarField(bg.grid()), bg);
  const double dt = cfl_time_step(s, 0.2);
  for (auto _ : state) benchmark::DoNotOptimize(step(s, bg, dt, scheme));
  state.SetLabel(scheme_name(scheme));
}
BENCHMARK(BM_FlowStep)
    ->Args({16, static_cast<int>(Scheme::ExplicitRk4)})
    ->Args({16, static_cast<int>(Scheme::Imex)})
    ->Unit(benchmark::kMillisecond);

void BM_Newton(benchmark::State& state) {
  const Background bg = bump_background(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(newton_dhym(ScalarField(bg.grid()), bg));
}
BENCHMARK(BM_Newton)->Arg(8)->Arg(16)->Unit(benchmark::kMillisecond);

}  // namespace
BENCHMARK_MAIN();
