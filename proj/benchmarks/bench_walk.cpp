#include <benchmark/benchmark.h>

#include <random>

#include "qwalk/recurrence.hpp"
#include "qwalk/spectral.hpp"

using namespace qwalk;

namespace {

void BM_Step(benchmark::State& state) {
    const int warmup = int(state.range(0));
    const BiasParams params{0.5, 1};
    const CoinMatrix coin = build_coin(params);
    AmplitudeField base = new_localized(params, build_initial_state({0.5, kPi / 2}));
    evolve(base, coin, warmup);
    for (auto _ : state) {
        AmplitudeField field = base;
        step(field, coin);
        benchmark::DoNotOptimize(field.amps.data());
    }
    state.SetItemsProcessed(state.iterations() * base.window.sites());
}
BENCHMARK(BM_Step)->Arg(64)->Arg(256);

void BM_Eigendecompose(benchmark::State& state) {
    const BiasParams params{0.5, 1};
    const CoinMatrix coin = build_coin(params);
    std::mt19937 rng(5);
    std::uniform_real_distribution<double> dist(-kPi, kPi);
    std::vector<Mat4c> ops;
    for (int i = 0; i < 256; ++i)
        ops.push_back(momentum_operator(params, {dist(rng), dist(rng)}, coin));
    std::size_t i = 0;
    for (auto _ : state) {
        const auto sys = eigendecompose_numeric(ops[i++ & 255]);
        benchmark::DoNotOptimize(sys.values[0]);
    }
}
BENCHMARK(BM_Eigendecompose);

void BM_OriginSeries(benchmark::State& state) {
    const int t_max = int(state.range(0));
    const BiasParams params{0.5, 1};
    const CoinMatrix coin = build_coin(params);
    const CoinState4 init = build_initial_state({1.0, 0.0});
    std::vector<int> times;
    for (int t = 0; t <= t_max; t += 2) times.push_back(t);
    for (auto _ : state) {
        const auto series = amplitude_at_origin_series(init, params, coin, times);
        benchmark::DoNotOptimize(series.back());
    }
}
BENCHMARK(BM_OriginSeries)->Arg(32)->Arg(64)->Unit(benchmark::kMillisecond);

void BM_InverseTransform(benchmark::State& state) {
    const int t = int(state.range(0));
    const BiasParams params{0.5, 1};
    const CoinMatrix coin = build_coin(params);
    int n = 1;
    while (n < 2 * t + 1) n *= 2;
    const MomentumState ms = fourier_evolve(build_initial_state({1.0, 0.0}), params, coin, t, n);
    for (auto _ : state) {
        const AmplitudeField field = inverse_transform(ms, params);
        benchmark::DoNotOptimize(field.amps.data());
    }
    state.SetLabel("grid " + std::to_string(n));
}
BENCHMARK(BM_InverseTransform)->Arg(32)->Arg(100)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
