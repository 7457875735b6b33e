#include <benchmark/benchmark.h>

#include "orb/evaluation.hpp"
#include "orb/features.hpp"
#include "orb/lasso.hpp"
#include "orb/rng.hpp"
#include "orb/synth.hpp"

namespace {

orb::Stamp bench_stamp(int half_width) {
  orb::SceneSpec spec;
  spec.scene = orb::SceneKind::EyeEyewall;
  spec.eye_temp_c = -5.0;
  spec.noise_sd_c = 2.0;
  spec.half_width_px = half_width;
  spec.seed = 7;
  return orb::make_stamp(spec, "BENCH", orb::UtcHour{0}).first;
}

void BM_ExtractFeatures(benchmark::State& state) {
  orb::Stamp stamp = bench_stamp(static_cast<int>(state.range(0)));
  for (auto _ : state) {
    auto features = orb::extract_features(stamp);
    benchmark::DoNotOptimize(features.size.values.data());
  }
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_ExtractFeatures)->Arg(100)->Arg(180)->Unit(benchmark::kMillisecond);

void BM_LassoPath(benchmark::State& state) {
  const std::size_t n = 2000, d = 50;
  orb::Rng rng(11);
  orb::DesignMatrix x;
  x.n_rows = n;
  x.columns.resize(d);
  x.data.resize(n * d);
  for (std::size_t j = 0; j < d; ++j) {
    x.columns[j] = "P" + std::to_string(j);
    for (std::size_t i = 0; i < n; ++i) x.data[j * n + i] = rng.normal();
  }
  std::vector<int> y(n);
  for (std::size_t i = 0; i < n; ++i) {
    double eta = -1.0 + 2.0 * x.at(i, 0) - 2.0 * x.at(i, 1);
    y[i] = rng.bernoulli(1.0 / (1.0 + std::exp(-eta))) ? 1 : 0;
  }
  for (auto _ : state) {
    auto grid = orb::lambda_grid(orb::lambda_max(x, y));
    orb::LassoFit fit;
    for (std::size_t i = 0; i < grid.size(); ++i)
      fit = orb::fit_logistic_lasso(x, y, grid[i], i == 0 ? nullptr : &fit);
    benchmark::DoNotOptimize(fit.beta.data());
  }
}
BENCHMARK(BM_LassoPath)->Unit(benchmark::kMillisecond);

void BM_PermutationTest(benchmark::State& state) {
  const std::size_t n = 600;
  orb::Rng rng(3);
  std::vector<double> px(n), py(n);
  std::vector<int> y(n);
  for (std::size_t i = 0; i < n; ++i) {
    y[i] = rng.bernoulli(0.3) ? 1 : 0;
    px[i] = rng.uniform() + 0.3 * y[i];
    py[i] = rng.uniform() + 0.2 * y[i];
  }
  orb::PermutationOptions opts;
  opts.rounds = 1000;
  opts.seed = 5;
  for (auto _ : state) {
    auto result = orb::permutation_test(px, py, y, orb::TailDirection::Greater, opts);
    benchmark::DoNotOptimize(result.p_value);
  }
}
BENCHMARK(BM_PermutationTest)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
