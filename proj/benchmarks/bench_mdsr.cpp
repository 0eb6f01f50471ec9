#include <benchmark/benchmark.h>

#include "mdsr/bloch.hpp"
#include "mdsr/fitting.hpp"
#include "mdsr/pumping.hpp"
#include "mdsr/spectrum.hpp"

using namespace mdsr;

namespace {

const auto kPops = PopulationDistribution::from_percent(32, 36, 32);

void BM_SynthSpectrum(benchmark::State& state) {
  const ExperimentModel model = make_experiment_model({});
  const auto grid = make_grid(-80.0, 80.0, 160.0 / static_cast<double>(state.range(0) - 1));
  for (auto _ : state) benchmark::DoNotOptimize(synth_spectrum(model, kPops, grid));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(grid.size()));
}
BENCHMARK(BM_SynthSpectrum)->Arg(161)->Arg(3201);

void BM_FitNoisy(benchmark::State& state) {
  const ExperimentModel model = make_experiment_model({});
  const Spectrum noisy = add_noise(synth_spectrum(model, kPops, make_grid(-80.0, 80.0, 1.0)), 0.01, 7);
  const FitProblem problem = FitProblem::from(noisy, model);
  for (auto _ : state) benchmark::DoNotOptimize(fit_populations(problem));
}
BENCHMARK(BM_FitNoisy)->Unit(benchmark::kMillisecond);

void BM_WeakProbeResponse(benchmark::State& state) {
  const ExperimentModel model = make_experiment_model({});
  const std::pair<Sublevel, double> pops[] = {
      {{Manifold::G1, -1}, 1.0}, {{Manifold::G1, 0}, 1.0}, {{Manifold::G1, 1}, 1.0}};
  const DensityMatrix rho0 = DensityMatrix::from_populations(model.scheme, pops);
  for (auto _ : state) {
    benchmark::DoNotOptimize(weak_probe_response(model.scheme, model.coupling, model.probe, model.decay, rho0));
  }
}
BENCHMARK(BM_WeakProbeResponse)->Unit(benchmark::kMicrosecond);

void BM_SteadyState(benchmark::State& state) {
  const ExperimentModel model = make_experiment_model({});
  const LaserField fields[] = {model.coupling, model.probe};
  const Liouvillian l = build_liouvillian(build_hamiltonian(model.scheme, fields), model.scheme, model.decay);
  const std::pair<Sublevel, double> pops[] = {{{Manifold::G1, -1}, 1.0}};
  const DensityMatrix rho0 = DensityMatrix::from_populations(model.scheme, pops);
  for (auto _ : state) benchmark::DoNotOptimize(steady_state(l, rho0));
}
BENCHMARK(BM_SteadyState)->Unit(benchmark::kMillisecond);

void BM_PumpDesign(benchmark::State& state) {
  const LevelScheme scheme = build_level_scheme(0.15, true);
  const LaserField coupling = pumping_coupling(scheme, 78.0);
  const auto target = PopulationDistribution::from_percent(64, 18, 18);
  for (auto _ : state) benchmark::DoNotOptimize(design_pump(target, scheme, coupling, 1e-4));
}
BENCHMARK(BM_PumpDesign)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
