#include <map>

#include <benchmark/benchmark.h>

#include <ccep/dgp.hpp>
#include <ccep/estimator.hpp>
#include <ccep/montecarlo.hpp>
#include <ccep/variance.hpp>

namespace {

using namespace ccep;

const PanelDataset& panel(Index units) {
  static std::map<Index, PanelDataset> cache;
  auto it = cache.find(units);
  if (it == cache.end()) it = cache.emplace(units, generate(preset("bsw-correlated-loadings"), units, 1).data).first;
  return it->second;
}

void BM_Generate(benchmark::State& state) {
  const auto cfg = preset("bsw-correlated-loadings");
  const Index n = state.range(0);
  for (auto _ : state) benchmark::DoNotOptimize(generate(cfg, n, 7, static_cast<int>(state.range(1))));
  state.SetItemsProcessed(state.iterations() * n);
}
BENCHMARK(BM_Generate)->Args({1000, 1})->Args({10000, 1})->Args({10000, 4});

void BM_Fit(benchmark::State& state) {
  const auto& ds = panel(state.range(0));
  const EstimatorSpec spec{parse_proxy_list(state.range(1) ? "const,mean_x,mean_y" : "mean_x"),
                           state.range(1) ? DeterministicSpec::time_dummies() : DeterministicSpec::none()};
  for (auto _ : state) benchmark::DoNotOptimize(ccep_fit(ds, spec));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_Fit)->Args({1000, 0})->Args({10000, 0})->Args({10000, 1});

void BM_Variance(benchmark::State& state) {
  const auto& ds = panel(state.range(0));
  const auto fit = ccep_fit(ds, EstimatorSpec{parse_proxy_list("mean_x"), {}});
  VarianceOptions opts;
  opts.jobs = static_cast<int>(state.range(1));
  for (auto _ : state) benchmark::DoNotOptimize(estimate_variance(ds, fit, opts));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_Variance)->Args({1000, 1})->Args({10000, 1})->Args({10000, 4});

void BM_Jacobian(benchmark::State& state) {
  const auto fit = ccep_fit(panel(1000), EstimatorSpec{parse_proxy_list("mean_x"), {}});
  for (auto _ : state) benchmark::DoNotOptimize(jacobian_correction(fit.proxy));
}
BENCHMARK(BM_Jacobian);

void BM_Replications(benchmark::State& state) {
  McConfig c;
  c.dgp = preset("bsw-correlated-loadings");
  c.estimators = {{"CCEP_X", {preset_proxy(Preset::CcepX), {}}}};
  c.units = 1000;
  c.reps = 20;
  for (auto _ : state) benchmark::DoNotOptimize(run(c));
  state.SetItemsProcessed(state.iterations() * c.reps);
}
BENCHMARK(BM_Replications)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
