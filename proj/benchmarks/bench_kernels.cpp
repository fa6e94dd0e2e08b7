// Throughput benchmarks for the hot kernels: split-step evolution, Fourier
// multipliers, dilation resampling, and cutoff evaluation.

#include <benchmark/benchmark.h>

#include <cmath>

#include "tdho/cutoffs.hpp"
#include "tdho/grid.hpp"
#include "tdho/oscillator.hpp"
#include "tdho/potential.hpp"
#include "tdho/propagator.hpp"
#include "tdho/spectral.hpp"

using namespace tdho;

namespace {

OscillatorModel model_a() {
  return OscillatorModel::make(1.0, 3.0 / 16.0, 1.0, InnerProfile::constant(0.0));
}

WaveFunction packet(int n, double half_width) {
  return make_gaussian(Grid::make(1, n, half_width), {0.0, 0.0}, {1.0, 0.0}, 2.0);
}

void BM_split_step(benchmark::State& state) {
  const OscillatorModel model = model_a();
  const PotentialSpec bump = PotentialSpec::static_bump(1.0, 2.0, model.lambda);
  const WaveFunction psi = packet(static_cast<int>(state.range(0)), 48.0);
  // fixed nominal step, no verification halvings: raw stepping cost
  const StepPolicy policy{0.125, 1e9, 0};
  for (auto _ : state) {
    WaveFunction out = evolve_full(model, &bump, psi, 0.0, 1.0, policy);
    benchmark::DoNotOptimize(out.amp.data());
  }
  state.SetItemsProcessed(state.iterations() * 8);  // steps per run
}
BENCHMARK(BM_split_step)->Arg(1024)->Arg(4096)->Unit(benchmark::kMillisecond);

void BM_fourier_multiplier(benchmark::State& state) {
  const WaveFunction psi = packet(static_cast<int>(state.range(0)), 48.0);
  for (auto _ : state) {
    WaveFunction out = quadratic_momentum_phase(psi, 0.125);
    benchmark::DoNotOptimize(out.amp.data());
  }
}
BENCHMARK(BM_fourier_multiplier)->Arg(1024)->Arg(4096)->Arg(16384);

void BM_dilate(benchmark::State& state) {
  const WaveFunction psi = packet(static_cast<int>(state.range(0)), 48.0);
  for (auto _ : state) {
    WaveFunction out = dilate(psi, 0.2);
    benchmark::DoNotOptimize(out.amp.data());
  }
}
BENCHMARK(BM_dilate)->Arg(1024)->Arg(4096);

void BM_cutoff_eval(benchmark::State& state) {
  const CutoffSpec band = CutoffSpec::bandpass(0.05, 0.1, 8.0, 16.0);
  double s = 0.0;
  for (auto _ : state) {
    double acc = 0.0;
    for (int i = 0; i < 1024; ++i) acc += band.eval(0.02 * i + s);
    benchmark::DoNotOptimize(acc);
    s = std::fmod(s + 1e-4, 0.02);
  }
  state.SetItemsProcessed(state.iterations() * 1024);
}
BENCHMARK(BM_cutoff_eval);

}  // namespace

BENCHMARK_MAIN();
