// Serial vs OpenMP timings for the three parallel kernels.

#include <benchmark/benchmark.h>

#include <vector>

#include "indi/frequency.hpp"
#include "indi/loop.hpp"
#include "indi/metrics.hpp"
#include "indi/plant.hpp"
#include "indi/stability.hpp"

using namespace indi;

namespace {

LoopConfig desk_loop() {
  LoopConfig c;
  c.K_p = 8.0;
  c.K_v = 20.0;
  c.K_r = 5.0;
  c.T_act = 0.02;
  c.tau_a = 0.005;
  c.T_sensor = 0.01;
  c.tau_s = 0.01;
  c.T_diff = 1.0 / 30.0;
  c.B_hat = -12.0;
  c.comp_filter = c.comp_sensor = true;
  return c;
}

PlantModel desk_plant() { return make_short_period(-1.2, -0.1, -8.0, -1.5, -12.0); }

LoopConfig roll_region_loop() {
  LoopConfig c;
  c.K_p = 5.0;
  c.K_v = 50.0;
  c.K_r = 5.0;
  c.T_act = 0.02;
  c.B_hat = 1.0;
  return c;
}

std::vector<double> delay_axis(size_t n) {
  std::vector<double> v(n);
  for (size_t i = 0; i < n; ++i) v[i] = 0.1 * static_cast<double>(i) / static_cast<double>(n - 1);
  return v;
}

template <bool Parallel>
void BM_StabilityGrid(benchmark::State& state) {
  const auto axis = delay_axis(static_cast<size_t>(state.range(0)));
  const auto m = make_roll(5.0, 1.0);
  for (auto _ : state) {
    auto g = Parallel ? delay_stability_grid(roll_region_loop(), m, axis, axis)
                      : delay_stability_grid_serial(roll_region_loop(), m, axis, axis);
    benchmark::DoNotOptimize(g.verdict.data());
  }
  state.SetItemsProcessed(state.iterations() * state.range(0) * state.range(0));
}

template <bool Parallel>
void BM_MonteCarlo(benchmark::State& state) {
  SimScenario sc;
  sc.kind = ScenarioKind::robustness;
  sc.duration = 3.0;
  sc.dt = 1e-3;
  sc.mc_samples = static_cast<int>(state.range(0));
  sc.uncertainty = {{"M_alpha", 0.2}, {"M_q", 0.2}, {"M_eta", 0.2}};
  for (auto _ : state) {
    auto r = Parallel ? robustness_mc(desk_loop(), desk_plant(), sc) : robustness_mc_serial(desk_loop(), desk_plant(), sc);
    benchmark::DoNotOptimize(r.sigma);
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

template <bool Parallel>
void BM_FreqResponse(benchmark::State& state) {
  const auto omegas = log_space(1e-3, 1e4, static_cast<size_t>(state.range(0)));
  const TFExpr L = open_loop(desk_loop(), desk_plant());
  for (auto _ : state) {
    auto fr = Parallel ? freq_response(L, omegas) : freq_response_serial(L, omegas);
    benchmark::DoNotOptimize(fr.value.data());
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

}  // namespace

BENCHMARK(BM_StabilityGrid<false>)->Arg(21)->Arg(81)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_StabilityGrid<true>)->Arg(21)->Arg(81)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_MonteCarlo<false>)->Arg(32)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_MonteCarlo<true>)->Arg(32)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_FreqResponse<false>)->Arg(801)->Arg(8001)->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_FreqResponse<true>)->Arg(801)->Arg(8001)->Unit(benchmark::kMicrosecond)->UseRealTime();

BENCHMARK_MAIN();
