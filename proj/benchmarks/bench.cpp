#include <benchmark/benchmark.h>

#include "optomode/eigenmodes.hpp"
#include "optomode/oracle.hpp"
#include "optomode/readout.hpp"
#include "optomode/spectral.hpp"

using namespace optomode;

static void BM_FindModes(benchmark::State& state) {
  const DimensionlessParams dp = reference_params();
  for (auto _ : state) benchmark::DoNotOptimize(find_modes(dp));
}
BENCHMARK(BM_FindModes);

static void BM_QuadraturePsd(benchmark::State& state) {
  const DimensionlessParams dp = reference_params();
  const ModeSet modes = find_modes(dp);
  const ModulationParams mod = resonant_modulation(modes, 0.5);
  const auto grid = linear_grid(-0.2, 0.2, static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(quadrature_psd(modes, mod, grid, dp));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_QuadraturePsd)->Arg(201)->Arg(2001);

static void BM_LadderDemodPsd(benchmark::State& state) {
  const DimensionlessParams dp = reference_params();
  const ModeSet modes = find_modes(dp);
  const ModulationParams mod = resonant_modulation(modes, 0.5);
  LadderOptions opts;
  opts.sidebands = static_cast<int>(state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(ladder_demod_psd(0.01, modes[0].frequency, 0.0, dp, mod,
                                              NoiseModel::vacuum(), opts));
  }
}
BENCHMARK(BM_LadderDemodPsd)->Arg(4)->Arg(8)->Arg(16);

static void BM_Simulate(benchmark::State& state) {
  SimulationConfig cfg;
  cfg.modulation = resonant_modulation(find_modes(cfg.params), 0.5);
  cfg.steps = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(simulate(cfg));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_Simulate)->Arg(1 << 15)->Arg(1 << 17)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
